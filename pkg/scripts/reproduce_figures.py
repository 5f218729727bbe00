"""Write every figure preset as CSV (and JSON with metadata) into an output directory.

    python3 scripts/reproduce_figures.py --out figures --workers 4
"""
import argparse
from pathlib import Path
import time

from magnon_metrology.pipeline import QUANTITIES, Conventions
from magnon_metrology.presets import figure_presets
from magnon_metrology.sweep import emit, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", nargs="*", help="subset of preset names")
    ap.add_argument("--all-quantities", action="store_true")
    ap.add_argument("--bmi-rule", choices=("max", "min"), default="max")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    conv = Conventions(bmi_rule=args.bmi_rule)
    for name, spec in figure_presets().items():
        if args.only and name not in args.only:
            continue
        if args.all_quantities:
            spec = spec.with_(quantities=QUANTITIES)
        t0 = time.perf_counter()
        res = run_sweep(spec, workers=args.workers, conventions=conv)
        emit(res, out / f"{name}.csv")
        emit(res, out / f"{name}.json", "json")
        flagged = sum(r[-1] != "ok" for r in res.rows)
        print(f"{name:6s} {len(res.rows):5d} points  {flagged:4d} flagged  {time.perf_counter() - t0:6.1f}s")


if __name__ == "__main__":
    main()
