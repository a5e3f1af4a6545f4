"""Command-line front end.

Subcommands:
  simulate   run the pump/probe pipeline from a config -> trace.csv,
             spectrum.csv, modes.json, report.json (optionally plot.svg)
  analyze    matrix-pencil mode fit of an existing trace.csv
  predict    line positions vs magnetic field -> field_sweep.csv
  fit        fit measured line positions (B_T, nu_cm1 CSV) to a line model
  entangle   entanglement report for a demo state or the pumped system
  chain      exchange-field / localization / vibronic-coupling estimate
  fc         Franck-Condon overtone table -> CSV

Exit codes: 0 ok, 2 usage or config error, 3 numeric failure, 4 I/O error.
"""

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import __version__
from .config import default_config, load_config
from .dynamics import Trace, ensemble_simulate, pump, simulate
from .entangle import (
    SymmetricSuperposition,
    dicke_state,
    entanglement_report,
    partial_trace,
    superposition_state,
)
from .errors import NumericError, ValidationError
from .fileio import (
    TRACE_HEADER,
    atomic_write_text,
    read_xy_csv,
    write_fc_csv,
    write_json,
    write_modes_json,
    write_spectrum_csv,
    write_sweep_csv,
    write_trace_csv,
)
from .magnetics import (
    MagneticParams,
    estimate_exchange_chain,
    fit_field_dependence,
    predict_lines,
)
from .spectral import fft_spectrum, fit_damped_sinusoids
from .svgplot import two_panel_svg
from .system import build_hamiltonians, resonance_factor, thermal_state
from .vibronic import VibronicSpec, huang_rhys_factor, raman_overtone_ladder


def _emit_json(doc: dict, output: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if output:
        atomic_write_text(output, text)
    else:
        sys.stdout.write(text)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g-bare", type=float, default=None, help="bare electron g-factor")
    p.add_argument("--n0-alpha", type=float, default=None, help="s-d exchange N0*alpha (meV)")
    p.add_argument("--n0-beta", type=float, default=None, help="p-d exchange N0*beta (meV)")
    p.add_argument("--x-eff", type=float, default=None, help="effective Mn fraction")
    p.add_argument("--t-eff", type=float, default=None, help="effective spin temperature (K)")
    p.add_argument("--g-mn", type=float, default=None, help="Mn g-factor")


def _magnetic_params(args) -> MagneticParams:
    params = MagneticParams()
    for flag, field_name in (
        ("g_bare", "g_bare"),
        ("n0_alpha", "n0_alpha"),
        ("n0_beta", "n0_beta"),
        ("x_eff", "x_eff"),
        ("t_eff", "t_eff"),
        ("g_mn", "g_mn"),
    ):
        value = getattr(args, flag)
        if value is not None:
            params = dataclasses.replace(params, **{field_name: value})
    params.validate()
    return params


def cmd_simulate(args) -> int:
    cfg = load_config(args.config) if args.config else default_config()
    if args.output_dir:
        cfg.output_dir = args.output_dir
        cfg.resolved["output_dir"] = args.output_dir
    seed = None
    if cfg.ensemble is not None:
        if args.seed is not None:
            cfg.ensemble = dataclasses.replace(cfg.ensemble, seed=args.seed)
            cfg.resolved["ensemble.seed"] = args.seed
        seed = cfg.ensemble.seed

    os.makedirs(cfg.output_dir, exist_ok=True)
    if cfg.ensemble is not None:
        trace = ensemble_simulate(
            cfg.system, cfg.pulse, cfg.ensemble, t_max=cfg.t_max_ps, dt=cfg.dt_ps
        )
    else:
        trace = simulate(cfg.system, cfg.pulse, t_max=cfg.t_max_ps, dt=cfg.dt_ps)

    trace_path = os.path.join(cfg.output_dir, "trace.csv")
    write_trace_csv(trace_path, trace.t, trace.y)
    freq, power = fft_spectrum(trace.t, trace.y)
    write_spectrum_csv(os.path.join(cfg.output_dir, "spectrum.csv"), freq, power)
    modes = fit_damped_sinusoids(
        trace.t, trace.y, max_order=cfg.max_order, sv_threshold=cfg.sv_threshold
    )
    write_modes_json(os.path.join(cfg.output_dir, "modes.json"), modes)

    files = ["trace.csv", "spectrum.csv", "modes.json", "report.json"]
    if args.plot:
        svg = two_panel_svg(trace.t, trace.y, freq, power, title="simulated beat trace")
        atomic_write_text(os.path.join(cfg.output_dir, "plot.svg"), svg)
        files.append("plot.svg")

    report = {
        "version": __version__,
        "command": "simulate",
        "seed": seed,
        "config": cfg.resolved,
        "derived": {
            "g_electron": cfg.system.resolved_g_electron(),
            "dim_ground": int(np.prod(cfg.system.site_dims_ground)),
            "dim_excited": int(np.prod(cfg.system.site_dims_excited)),
            "n_modes": len(modes.modes),
            "residual_rms": modes.residual_rms,
        },
        "files": files,
    }
    write_json(os.path.join(cfg.output_dir, "report.json"), report)
    print(f"wrote {', '.join(files)} to {cfg.output_dir}")
    return 0


def cmd_analyze(args) -> int:
    t, y = read_xy_csv(args.trace_csv, TRACE_HEADER)
    trace = Trace(t=t, y=y)
    trace.validate()
    modes = fit_damped_sinusoids(
        t, y, max_order=args.max_order, sv_threshold=args.sv_threshold
    )
    doc = modes.to_dict()
    doc["source"] = args.trace_csv
    _emit_json(doc, args.output)
    return 0


def cmd_predict(args) -> int:
    if args.b_min < 0 or args.b_min >= args.b_max:
        raise ValidationError(
            f"need 0 <= --b-min < --b-max, got {args.b_min} .. {args.b_max}"
        )
    if args.steps < 1:
        raise ValidationError(f"--steps must be >= 1, got {args.steps}")
    params = _magnetic_params(args)
    fields = np.linspace(args.b_min, args.b_max, args.steps)
    table = predict_lines(fields, b_e=args.b_e, params=params)
    write_sweep_csv(args.output, table)
    print(f"wrote {args.output} ({args.steps} rows)")
    return 0


def cmd_fit(args) -> int:
    b, nu = read_xy_csv(args.data_csv, ("B_T", "nu_cm1"))
    params = _magnetic_params(args)
    result = fit_field_dependence(b, nu, model=args.model, params=params, scale=args.scale)
    data_rms = float(np.sqrt(np.mean(nu**2)))
    doc = {
        "model": args.model,
        "params": result.params,
        "residual_rms": result.residual_rms,
        "iterations": result.iterations,
        "converged": result.converged,
        "exact_recovery": bool(result.residual_rms <= 1e-6 * max(data_rms, 1e-12)),
        "covariance": result.covariance,
        "n_points": int(b.size),
    }
    _emit_json(doc, args.output)
    return 0


def _demo_state(opts: dict):
    """State vector and site dims for the named demo state."""
    name = opts["state"]
    n = opts["n_spins"]
    if name == "bell":
        coef = np.array([1.0, 0.0, 1.0]) / np.sqrt(2.0)
        psi = superposition_state(SymmetricSuperposition(2, 0.5, coef))
        return psi, [2, 2]
    if name == "ghz":
        coef = np.zeros(n + 1)
        coef[0] = coef[-1] = 1.0 / np.sqrt(2.0)
        psi = superposition_state(SymmetricSuperposition(n, 0.5, coef))
        return psi, [2] * n
    if name == "w":
        return dicke_state(n, 0.5, 1), [2] * n
    if name == "dicke":
        dim = round(2 * opts["spin_s"] + 1)
        return dicke_state(n, opts["spin_s"], opts["k"]), [dim] * n
    raise ValidationError(f"unknown demo state {name!r}")  # pragma: no cover


def cmd_entangle(args) -> int:
    cfg = load_config(args.config) if args.config else default_config()
    opts = dict(cfg.entangle)
    for key in ("state", "n_spins", "spin_s", "k", "sector"):
        value = getattr(args, key)
        if value is not None:
            opts[key] = value
    if opts["state"] != "pump":
        psi, dims = _demo_state(opts)
        report = entanglement_report(psi, dims)
        report["state"] = opts["state"]
        _emit_json(report, args.output)
        return 0

    spec = cfg.system
    if spec.n_donors + spec.n_mn < 2:
        raise ValidationError(
            "pump entanglement report needs at least two spins (donors + impurities)"
        )
    pair = build_hamiltonians(spec)
    state = pump(thermal_state(pair), pair, cfg.pulse, resonance_factor(spec))
    if opts["sector"] == "excited":
        rho = state.rho_ee_site()
        dims = list(pair.site_dims_excited)
    else:
        rho = state.rho_gg_site()
        dims = list(pair.site_dims_ground)
    tr = float(np.real(np.trace(rho)))
    if tr <= 1e-15:
        raise ValidationError(f"pump left the {opts['sector']} sector empty")
    rho = rho / tr  # condition on the sector: unit-trace state for the report
    n_spins = spec.n_donors + spec.n_mn
    if len(dims) > n_spins:  # trace out the exciton electron
        rho = partial_trace(rho, dims, keep=range(n_spins))
        dims = dims[:n_spins]
    report = entanglement_report(rho, dims)
    report["state"] = "pump"
    report["sector"] = opts["sector"]
    report["site_roles"] = ["donor"] * spec.n_donors + ["mn"] * spec.n_mn
    _emit_json(report, args.output)
    return 0


def cmd_chain(args) -> int:
    params = _magnetic_params(args)
    result = estimate_exchange_chain(args.nu_pre_zero, args.b_field, params=params)
    if args.s_tot is not None:
        result["S_tot"] = args.s_tot
        result["huang_rhys"] = huang_rhys_factor(
            args.s_tot, args.b_field, result["B_e_T"]
        )
    result["nu_PRe_zero_field_cm1"] = args.nu_pre_zero
    result["B_T"] = args.b_field
    _emit_json(result, args.output)
    return 0


def cmd_fc(args) -> int:
    spec = VibronicSpec(
        huang_rhys=args.huang_rhys,
        n_levels=args.n_levels,
        thermal_occupation=args.thermal_occupation,
    )
    ladder = raman_overtone_ladder(spec, k_max=args.k_max)
    write_fc_csv(args.output, ladder)
    print(f"wrote {args.output} (k = 0 .. {args.k_max})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinweave",
        description="coherent spin-beat simulator and analysis toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the pump/probe pipeline from a config")
    p.add_argument("--config", default=None, help="config file (default: built-in)")
    p.add_argument("--output-dir", default=None, help="override output_dir")
    p.add_argument("--seed", type=int, default=None, help="override ensemble seed")
    p.add_argument("--plot", action="store_true", help="also write plot.svg")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="fit damped sinusoids to a trace.csv")
    p.add_argument("trace_csv")
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--sv-threshold", type=float, default=1e-3)
    p.add_argument("--output", default=None, help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("predict", help="line positions vs field -> CSV")
    p.add_argument("--b-min", type=float, default=0.0)
    p.add_argument("--b-max", type=float, default=7.0)
    p.add_argument("--steps", type=int, default=15)
    p.add_argument("--b-e", type=float, default=5.02, help="exciton exchange field (T)")
    _add_param_flags(p)
    p.add_argument("--output", default="field_sweep.csv")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("fit", help="fit line positions (CSV: B_T,nu_cm1) to a model")
    p.add_argument("data_csv")
    p.add_argument("--model", choices=("PR", "PRe", "SF"), required=True)
    p.add_argument("--scale", type=float, default=1.0)
    _add_param_flags(p)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("entangle", help="entanglement report (demo state or pump)")
    p.add_argument("--config", default=None)
    p.add_argument("--state", choices=("pump", "bell", "ghz", "w", "dicke"),
                   default=None, help="override entangle.state")
    p.add_argument("--n-spins", dest="n_spins", type=int, default=None)
    p.add_argument("--spin-s", dest="spin_s", type=float, default=None)
    p.add_argument("--k", type=int, default=None, help="dicke flip count")
    p.add_argument("--sector", choices=("excited", "ground"), default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("chain", help="exchange field / localization / coupling chain")
    p.add_argument("nu_pre_zero", type=float, help="nu_PRe at B = 0 (cm^-1)")
    p.add_argument("b_field", type=float, help="field for the coupling estimate (T)")
    p.add_argument("--s-tot", type=float, default=None,
                   help="assume this total spin instead of the derived one")
    _add_param_flags(p)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("fc", help="vibronic overtone intensity table -> CSV")
    p.add_argument("--huang-rhys", type=float, required=True)
    p.add_argument("--n-levels", type=int, default=40)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--thermal-occupation", type=float, default=0.0)
    p.add_argument("--output", default="fc.csv")
    p.set_defaults(func=cmd_fc)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:  # includes ConfigError
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
