"""Write sweep tables (T, rate, NSAoI interval, EMSE) for a few (p, q) pairs.

One CSV per pair lands in the output directory, ready for any plotter:

    python scripts/reproduce_sweeps.py --tmax 20 --out results/
"""
import argparse
from pathlib import Path

from threshold_aoi.cli import SWEEP_COLUMNS, render, sweep_record
from threshold_aoi.planner import min_update_rate, sweep

PAIRS = [(0.5, 0.5), (0.4, 0.4), (0.3, 0.3), (0.6, 0.2), (0.4, 0.1)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tmax", type=int, default=20)
    ap.add_argument("--epsilon", type=float, default=1e-6)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for p, q in PAIRS:
        rows = [sweep_record(r) for r in sweep(p, q, 1, args.tmax, args.epsilon)]
        path = args.out / f"sweep_p{p}_q{q}.csv"
        path.write_text(render("csv", "sweep", {}, None, SWEEP_COLUMNS, rows))
        print(f"wrote {path} ({len(rows)} rows)")

    # the design example: both ceilings, then a looser error ceiling
    for ceilings in ((21, 2.5), (21, 8)):
        res = min_update_rate(0.5, 0.5, *ceilings, T_search_max=args.tmax, epsilon=args.epsilon)
        print(f"p=q=0.5, NSAoI<={ceilings[0]}, EMSE<={ceilings[1]}: "
              f"T={res.chosen_T}, lambda_min={res.lambda_min}, binding={res.binding_constraint}")


if __name__ == "__main__":
    main()
