"""Magnetization, giant-Zeeman g factor, line prediction, and field-dependence fits.

The conduction-electron g factor in a diluted magnetic well is the bare
value enhanced by s-d exchange with the field-aligned Mn moments:

    |g_c(B)| = |g_bare| + N0_alpha * x_eff * <S(B,T_eff)> / (mu_B * B)

with <S> = S_Mn * B_S(g_Mn mu_B S_Mn B / (k_B T_eff)) and B_S the Brillouin
function.  The exchange term carries the sign that enlarges |g_c|; the
returned value keeps the sign of g_bare.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import K_B, MEV_TO_CM1, MU_B
from .errors import NumericError, ValidationError


@dataclass
class MagneticParams:
    """Material constants and fit parameters for Cd(1-x)Mn(x)Te wells.

    n0_alpha and n0_beta are the s-d and p-d exchange constants in meV;
    n0_cations is the cation density in cm^-3.  x_eff and T_eff are the
    effective Mn fraction and spin temperature used in the Brillouin model.
    """

    g_bare: float = -1.64
    n0_alpha: float = 220.0
    n0_beta: float = 880.0
    x_eff: float = 0.003
    t_eff: float = 2.0
    g_mn: float = 2.0
    n0_cations: float = 1.469e22
    s_mn: float = 2.5

    def validate(self) -> None:
        if self.n0_alpha <= 0 or self.n0_beta <= 0:
            raise ValidationError("exchange constants n0_alpha, n0_beta must be > 0")
        if not 0 <= self.x_eff <= 1:
            raise ValidationError(f"x_eff must lie in [0, 1], got {self.x_eff}")
        if self.t_eff <= 0:
            raise ValidationError(f"t_eff must be > 0 K, got {self.t_eff}")
        if self.n0_cations <= 0:
            raise ValidationError("n0_cations must be > 0")
        if self.s_mn <= 0:
            raise ValidationError("s_mn must be > 0")


def brillouin(s: float, y) -> float | np.ndarray:
    """Brillouin function B_s(y).

    B_s(y) = ((2s+1)/(2s)) coth(((2s+1)/(2s)) y) - (1/(2s)) coth(y/(2s)).
    Odd in y, saturates at +-1.  For |y| < 1e-6 the linear expansion
    (s+1) y / (3 s) is used to avoid cancellation.
    """
    if s <= 0:
        raise ValidationError(f"brillouin requires s > 0, got {s}")
    y = np.asarray(y, dtype=float)
    a = (2 * s + 1) / (2 * s)
    b = 1 / (2 * s)
    small = np.abs(y) < 1e-6
    safe = np.where(small, 1.0, y)
    with np.errstate(over="ignore"):
        full = a / np.tanh(a * safe) - b / np.tanh(b * safe)
    lin = (s + 1) * y / (3 * s)
    out = np.where(small, lin, full)
    return float(out) if out.ndim == 0 else out


def mn_spin_expectation(b_field: float, params: MagneticParams) -> float:
    """Thermal <S_Mn> along the field at temperature t_eff."""
    if b_field == 0:
        return 0.0
    y = params.g_mn * MU_B * params.s_mn * b_field / (K_B * params.t_eff)
    return params.s_mn * float(brillouin(params.s_mn, y))


def effective_g(b_field: float, params: MagneticParams | None = None) -> float:
    """Field-dependent conduction-electron g factor (signed like g_bare).

    At B = 0 the ratio <S>/B is replaced by its linear-response limit
    s(s+1) g_Mn mu_B / (3 k_B T_eff), so the function is continuous there.
    """
    if params is None:
        params = MagneticParams()
    params.validate()
    if b_field < 0:
        raise ValidationError(f"b_field must be >= 0, got {b_field}")
    if b_field < 1e-12:
        # linear response: <S>/(mu_B B) -> s(s+1) g_Mn / (3 k_B T)
        ratio = (
            params.s_mn
            * (params.s_mn + 1)
            * params.g_mn
            / (3 * K_B * params.t_eff)
        )
    else:
        ratio = mn_spin_expectation(b_field, params) / (MU_B * b_field)
    mag = abs(params.g_bare) + params.n0_alpha * params.x_eff * ratio
    return math.copysign(mag, params.g_bare) if params.g_bare != 0 else mag


def predict_lines(
    b_fields,
    b_e: float = 0.0,
    params: MagneticParams | None = None,
) -> dict[str, np.ndarray]:
    """Predicted line positions (cm^-1) versus field.

    nu_PR  : Mn paramagnetic resonance, g_Mn mu_B B.
    nu_PRe : Mn resonance in the exciton exchange field, g_Mn mu_B sqrt(B^2+B_e^2).
    nu_SF  : electron spin flip, |g_c(B)| mu_B B, plus the 2x and 3x overtones.
    """
    if params is None:
        params = MagneticParams()
    params.validate()
    if b_e < 0:
        raise ValidationError(f"b_e must be >= 0, got {b_e}")
    b = np.atleast_1d(np.asarray(b_fields, dtype=float))
    if np.any(b < 0):
        raise ValidationError("b_fields must be >= 0")
    nu_pr = params.g_mn * MU_B * b * MEV_TO_CM1
    nu_pre = params.g_mn * MU_B * np.sqrt(b * b + b_e * b_e) * MEV_TO_CM1
    g_abs = np.array([abs(effective_g(bi, params)) for bi in b])
    nu_sf = g_abs * MU_B * b * MEV_TO_CM1
    return {
        "B_T": b,
        "nu_PR": nu_pr,
        "nu_PRe": nu_pre,
        "nu_SF": nu_sf,
        "nu_2SF": 2.0 * nu_sf,
        "nu_3SF": 3.0 * nu_sf,
    }


@dataclass
class FitResult:
    params: dict[str, float]
    residual_rms: float
    iterations: int
    converged: bool
    covariance: list[list[float]]


def _gauss_newton(residual_fn, p0: np.ndarray, max_iter: int = 200) -> tuple[np.ndarray, int, bool]:
    """Damped Gauss-Newton with step halving on a residual vector function."""
    p = np.asarray(p0, dtype=float).copy()
    r = residual_fn(p)
    cost = float(r @ r)
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        jac = np.empty((r.size, p.size))
        for k in range(p.size):
            h = 1e-7 * max(abs(p[k]), 1e-3)
            pk = p.copy()
            pk[k] += h
            jac[:, k] = (residual_fn(pk) - r) / h
        try:
            step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"Gauss-Newton linear solve failed: {exc}") from exc
        # halve the step until the cost decreases (or give up on this direction)
        alpha = 1.0
        improved = False
        for _ in range(30):
            p_try = p + alpha * step
            r_try = residual_fn(p_try)
            cost_try = float(r_try @ r_try)
            if cost_try <= cost:
                improved = cost - cost_try > 1e-10 * max(cost, 1e-300)
                p, r, new_cost = p_try, r_try, cost_try
                break
            alpha *= 0.5
        else:
            break
        if not improved or new_cost <= 1e-30:
            cost = new_cost
            converged = True
            break
        cost = new_cost
    return p, it, converged


def _covariance(residual_fn, p: np.ndarray) -> list[list[float]]:
    r = residual_fn(p)
    jac = np.empty((r.size, p.size))
    for k in range(p.size):
        h = 1e-7 * max(abs(p[k]), 1e-3)
        pk = p.copy()
        pk[k] += h
        jac[:, k] = (residual_fn(pk) - r) / h
    dof = max(r.size - p.size, 1)
    sigma2 = float(r @ r) / dof
    try:
        cov = sigma2 * np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        cov = np.full((p.size, p.size), np.nan)
    return cov.tolist()


def fit_field_dependence(
    b_fields,
    nu_cm1,
    model: str,
    params: MagneticParams | None = None,
    init: dict[str, float] | None = None,
    scale: float = 1.0,
) -> FitResult:
    """Fit measured line positions vs field to one of the predicted models.

    model: 'PR' fits g_mn (linear), 'PRe' fits (g_mn, B_e), 'SF' fits
    (x_eff, t_eff) inside the effective-g expression.  Non-convergence is
    flagged, never silently accepted.  `scale` multiplies the model output
    so data in rescaled units fit to identical parameters.
    """
    if params is None:
        params = MagneticParams()
    params.validate()
    b = np.asarray(b_fields, dtype=float)
    nu = np.asarray(nu_cm1, dtype=float)
    if b.shape != nu.shape or b.ndim != 1 or b.size < 2:
        raise ValidationError("fit needs matching 1-D arrays with >= 2 points")
    if np.any(b < 0):
        raise ValidationError("b_fields must be >= 0")
    conv = MU_B * MEV_TO_CM1 * scale

    if model == "PR":
        denom = float(conv * (b @ b))
        if denom == 0:
            raise ValidationError("PR fit needs at least one nonzero field")
        g = float((nu @ b) / denom)
        resid = g * conv * b - nu
        rms = float(np.sqrt(np.mean(resid**2)))

        def rfn(p):
            return p[0] * conv * b - nu

        return FitResult(
            params={"g_mn": g},
            residual_rms=rms,
            iterations=1,
            converged=True,
            covariance=_covariance(rfn, np.array([g])),
        )

    if model == "PRe":

        def rfn(p):
            g_mn, b_e = p
            return g_mn * conv * np.sqrt(b * b + b_e * b_e) - nu

        if init is not None:
            seeds = [np.array([init.get("g_mn", 2.0), init.get("B_e", 1.0)])]
        else:
            bmax = max(float(np.max(b)), 1.0)
            g0 = float(np.max(nu) / (conv * bmax)) if np.max(b) > 0 else 2.0
            seeds = [np.array([g0, be]) for be in np.linspace(0.0, 2 * bmax, 10)]
        best = None
        for p0 in seeds:
            r0 = rfn(p0)
            c0 = float(r0 @ r0)
            if best is None or c0 < best[1]:
                best = (p0, c0)
        p, it, ok = _gauss_newton(rfn, best[0])
        p[1] = abs(p[1])
        resid = rfn(p)
        return FitResult(
            params={"g_mn": float(p[0]), "B_e": float(p[1])},
            residual_rms=float(np.sqrt(np.mean(resid**2))),
            iterations=it,
            converged=ok,
            covariance=_covariance(rfn, p),
        )

    if model == "SF":

        def rfn(p):
            x_eff, t_eff = p
            x_eff = abs(x_eff)
            t_eff = max(abs(t_eff), 1e-3)
            local = MagneticParams(
                g_bare=params.g_bare,
                n0_alpha=params.n0_alpha,
                n0_beta=params.n0_beta,
                x_eff=x_eff,
                t_eff=t_eff,
                g_mn=params.g_mn,
                n0_cations=params.n0_cations,
                s_mn=params.s_mn,
            )
            model_nu = np.array(
                [abs(effective_g(bi, local)) * conv * bi for bi in b]
            )
            return model_nu - nu

        if init is not None:
            seeds = [np.array([init.get("x_eff", 0.003), init.get("t_eff", 2.0)])]
        else:
            seeds = [
                np.array([x0, t0])
                for x0 in np.geomspace(1e-4, 2e-2, 10)
                for t0 in np.linspace(0.5, 20.0, 10)
            ]
        best = None
        for p0 in seeds:
            r0 = rfn(p0)
            c0 = float(r0 @ r0)
            if best is None or c0 < best[1]:
                best = (p0, c0)
        p, it, ok = _gauss_newton(rfn, best[0])
        p = np.array([abs(p[0]), max(abs(p[1]), 1e-3)])
        resid = rfn(p)
        return FitResult(
            params={"x_eff": float(p[0]), "t_eff": float(p[1])},
            residual_rms=float(np.sqrt(np.mean(resid**2))),
            iterations=it,
            converged=ok,
            covariance=_covariance(rfn, p),
        )

    raise ValidationError(f"unknown fit model {model!r}; expected PR, PRe, or SF")


def estimate_exchange_chain(
    nu_pre_zero_field_cm1: float,
    b_field: float,
    params: MagneticParams | None = None,
) -> dict[str, float]:
    """Back out the exciton exchange field and hole localization from nu_PRe(B=0).

    Chain: nu -> B_e = nu/(g_Mn mu_B); peak hole density
    |Psi|^2 = 3 mu_B g_Mn B_e / (beta J) with beta = n0_beta/n0_cations and
    J = 3/2; a uniform sphere |Psi|^2 = 3/(4 pi R^3) gives the radius;
    n_ions = x_eff * n0_cations * (4 pi/3) R^3; the Huang-Rhys factor uses
    S_tot = n_ions * 5/2 at the supplied field.
    """
    if params is None:
        params = MagneticParams()
    params.validate()
    if nu_pre_zero_field_cm1 <= 0:
        raise ValidationError("nu_PRe(0) must be > 0 cm^-1")
    if b_field < 0:
        raise ValidationError(f"b_field must be >= 0, got {b_field}")
    e_mev = nu_pre_zero_field_cm1 / MEV_TO_CM1
    b_e = e_mev / (params.g_mn * MU_B)
    beta = params.n0_beta / params.n0_cations  # meV cm^3
    j_hole = 1.5
    psi_sq = 3.0 * MU_B * params.g_mn * b_e / (beta * j_hole)  # cm^-3
    r_cm = (3.0 / (4.0 * math.pi * psi_sq)) ** (1.0 / 3.0)
    radius_a = r_cm * 1e8
    sphere_volume = 4.0 * math.pi * r_cm**3 / 3.0
    n_ions = params.x_eff * params.n0_cations * sphere_volume
    s_tot = n_ions * 2.5
    from .vibronic import huang_rhys_factor

    hr = huang_rhys_factor(s_tot, b_field, b_e)
    return {
        "B_e_T": b_e,
        "psi_sq_peak_cm3": psi_sq,
        "radius_A": radius_a,
        "length_A": 2.0 * radius_a,
        "n_ions": n_ions,
        "S_tot": s_tot,
        "huang_rhys": hr,
    }
