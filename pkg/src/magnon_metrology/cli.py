"""Command-line entry point: ``magmetro <command> [options]``.

Exit codes: 0 success, 1 validation failure, 2 unstable operating point for a
steady-state request, 3 configuration error.
"""
import argparse
import json
import sys

import numpy as np

from . import __version__
from .config import load_params
from .dynamics import integrate
from .errors import ConfigError, NotHurwitz
from .measurements import UNIT_HETERODYNE_NOISE, HETERODYNE_NOISE, cfi_vs_qfi_profile
from .model import PhysicalParams, build_model
from .pipeline import QUANTITIES, Conventions, estimate
from .presets import figure_presets, preset
from .stability import routh_hurwitz
from .sweep import SweepSpec, emit, format_cell, run_sweep

EXIT_OK, EXIT_VALIDATION, EXIT_UNSTABLE, EXIT_CONFIG = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser):
    p.add_argument("--params", help="parameter file (key = value [unit], or JSON); defaults to the baseline")
    p.add_argument("--paper-literal-het", action="store_true",
                   help="heterodyne outcome covariance C + I instead of C + I/2")
    p.add_argument("--drive-couples-gamma", choices=("on", "off"), default="on",
                   help="include d(epsilon_L)/d(gamma_c) in the gamma_c sensitivity")
    p.add_argument("--bmi-rule", choices=("max", "min"), default="max")
    p.add_argument("--subsystem", choices=("full", "cavity"), default="full")
    p.add_argument("--format", choices=("csv", "json", "table"), default=None)
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 3), not the unstable-point code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="magmetro", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("steady", help="steady-state QFIMs, bounds and CFIs for (g_mc, gamma_c)")
    _common(p)
    p.add_argument("--repetitions", type=int, default=1,
                   help="also report the bounds divided by this number of repetitions")

    p = sub.add_parser("dynamics", help="moments (and sensitivities) along a time grid from the vacuum")
    _common(p)
    p.add_argument("--t-max-us", type=float, default=0.05)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--sensitivities", action="store_true", help="also write dd and dC for g_mc, gamma_c")

    p = sub.add_parser("stability", help="Routh-Hurwitz verdict and drift eigenvalues")
    _common(p)

    p = sub.add_parser("sweep", help="run a figure preset or a JSON sweep spec")
    _common(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="preset name (see --list)")
    src.add_argument("--spec", help="JSON sweep specification file")
    src.add_argument("--list", action="store_true", help="list the presets")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--all-quantities", action="store_true", help="emit every quantity, not only the preset's")

    p = sub.add_parser("validate", help="run the number-basis oracle suite")
    p.add_argument("--out", default="-")

    p = sub.add_parser("profile", help="per-time SLD QFI and heterodyne/homodyne CFIs")
    _common(p)
    p.add_argument("--t-max-us", type=float, default=0.05)
    p.add_argument("--points", type=int, default=201)
    return ap


def _conventions(args) -> Conventions:
    return Conventions(
        het_noise=UNIT_HETERODYNE_NOISE if args.paper_literal_het else HETERODYNE_NOISE,
        drive_couples_gamma=args.drive_couples_gamma == "on",
        bmi_rule=args.bmi_rule,
        subsystem=args.subsystem,
    )


def _params(args) -> PhysicalParams:
    return load_params(args.params) if args.params else PhysicalParams.baseline()


def _write(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _csv(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(format_cell(x) for x in r) for r in rows]
    return "\n".join(lines) + "\n"


def cmd_steady(args) -> int:
    conv = _conventions(args)
    rep = estimate(_params(args), None, conv)
    d = rep.as_dict()
    d["conventions"] = conv.as_dict()
    M = args.repetitions
    if M < 1:
        raise ConfigError("--repetitions must be >= 1")
    if M > 1 and rep.bounds is not None:
        d["bounds_per_repetitions"] = {"M": M, "b_s": rep.bounds.b_s / M, "b_r": rep.bounds.b_r / M,
                                       "bmi": rep.bounds.bmi / M}
    if (args.format or "json") == "json":
        _write(json.dumps(d, indent=1) + "\n", args.out)
        return EXIT_OK
    b = rep.bounds
    lines = [f"{'B_S':12s} {format_cell(b.b_s) if b else 'n/a'}",
             f"{'B_R':12s} {format_cell(b.b_r) if b else 'n/a'}",
             f"{'BMI':12s} {format_cell(b.bmi) if b else 'n/a'} ({b.chosen if b else 'singular'}, rule {conv.bmi_rule})",
             f"{'H_gg':12s} {format_cell(rep.H[0, 0])}", f"{'H_yy':12s} {format_cell(rep.H[1, 1])}"]
    lines += [f"{k:12s} {format_cell(v)}" for k, v in rep.cfis.items()]
    if M > 1 and b is not None:
        lines += [f"{'B_S/M':12s} {format_cell(b.b_s / M)}", f"{'B_R/M':12s} {format_cell(b.b_r / M)}",
                  f"{'BMI/M':12s} {format_cell(b.bmi / M)} (M = {M})"]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_dynamics(args) -> int:
    conv = _conventions(args)
    model = build_model(_params(args), drive_couples_gamma=conv.drive_couples_gamma)
    t = np.linspace(0.0, args.t_max_us * 1e-6, args.points)
    traj = integrate(model, t, with_sensitivities=args.sensitivities)
    iu = np.triu_indices(4)
    cols = ["t_us"] + [f"d{i + 1}" for i in range(4)] + [f"C{i + 1}{j + 1}" for i, j in zip(*iu)]
    if args.sensitivities:
        for p in traj.params:
            cols += [f"dd{i + 1}_{p}" for i in range(4)] + [f"dC{i + 1}{j + 1}_{p}" for i, j in zip(*iu)]
    rows = []
    for k in range(len(traj)):
        row = [traj.times[k] * 1e6, *traj.d[k], *traj.C[k][iu]]
        if args.sensitivities:
            for a in range(len(traj.params)):
                row += [*traj.dd[k, a], *traj.dC[k, a][iu]]
        rows.append(row)
    if args.format == "json":
        _write(json.dumps({"columns": cols, "rows": [[float(format_cell(x)) for x in r] for r in rows]}) + "\n",
               args.out)
    else:
        _write(_csv(cols, rows), args.out)
    return EXIT_OK


def cmd_stability(args) -> int:
    v = routh_hurwitz(build_model(_params(args)).drift)
    if args.format == "json":
        _write(json.dumps(v.as_dict(), indent=1) + "\n", args.out)
    else:
        lines = [f"stable          {v.stable}", f"marginal        {v.marginal}",
                 f"max Re(eig)     {format_cell(v.max_real_eig)} rad/s"]
        lines += [f"hurwitz[{i + 1}]      {format_cell(h)}" for i, h in enumerate(v.hurwitz_values)]
        lines += [f"eig             {format_cell(e.real)} {'+' if e.imag >= 0 else '-'} {format_cell(abs(e.imag))}i"
                  for e in v.eigenvalues]
        _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK if v.stable else EXIT_UNSTABLE


def cmd_sweep(args) -> int:
    if args.list:
        for name, sp in figure_presets().items():
            fam = f" x {sp.family} {list(sp.family_values)}" if sp.family else ""
            print(f"{name:6s} {sp.regime:8s} {sp.axis} [{sp.grid.min}, {sp.grid.max}] x{sp.grid.count}{fam}")
        return EXIT_OK
    if args.preset:
        spec = preset(args.preset)
    else:
        try:
            with open(args.spec) as fh:
                spec = SweepSpec.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.spec}: {exc}") from exc
    if args.params:
        spec = spec.with_(base=load_params(args.params))
    if args.all_quantities:
        spec = spec.with_(quantities=QUANTITIES)
    result = run_sweep(spec, workers=args.workers, conventions=_conventions(args))
    text = emit(result, None, "json" if args.format == "json" else "csv")
    _write(text, args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import format_table, run_oracle_suite
    checks = run_oracle_suite()
    _write(format_table(checks) + "\n", args.out)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


def cmd_profile(args) -> int:
    conv = _conventions(args)
    t = np.linspace(0.0, args.t_max_us * 1e-6, args.points)
    cols = cfi_vs_qfi_profile(_params(args), t, subsystem=conv.subsystem, noise=conv.het_noise,
                              drive_couples_gamma=conv.drive_couples_gamma)
    names = list(cols)
    rows = [[cols[n][i] for n in names] for i in range(len(t))]
    _write(_csv(names, rows), args.out)
    return EXIT_OK


COMMANDS = {"steady": cmd_steady, "dynamics": cmd_dynamics, "stability": cmd_stability,
            "sweep": cmd_sweep, "validate": cmd_validate, "profile": cmd_profile}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NotHurwitz as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (ConfigError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
