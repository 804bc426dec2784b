"""Empirical coverage of the sample-size bounds across a sweep of p.

For each p the bound's sample size is drawn repeatedly and the fraction of
trials in which every probe is covered is compared with p.

    python3 scripts/validate_bounds.py --shape circle-r5 -e 0.1 --ps 0.1,0.5,0.9 --trials 400
"""

import argparse
import json
import time

from cloudcurv.shapes import CURVES
from cloudcurv.validation import validate_curve_bound, validate_surface_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shape", default="circle-r5")
    ap.add_argument("-e", "--epsilon", type=float, default=0.1)
    ap.add_argument("--ps", default="0.1,0.5,0.9")
    ap.add_argument("--trials", type=int, default=400)
    ap.add_argument("--probes", type=int, default=None)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", help="one JSON report per line")
    args = ap.parse_args()

    curve = args.shape in CURVES
    fn = validate_curve_bound if curve else validate_surface_bound
    probes = args.probes or (32 if curve else 16)
    for p in (float(v) for v in args.ps.split(",")):
        t0 = time.perf_counter()
        rep = fn(args.shape, args.epsilon, p, args.trials, probes, args.seed)
        if args.json:
            print(json.dumps(rep.to_dict(), sort_keys=True))
            continue
        verdict = "holds" if rep.claim_holds else "VIOLATED"
        print(f"p={p:<5g} m={rep.m_used:<10d} rate={rep.empirical_rate:.4f} "
              f"wilson_lower={rep.wilson_lower:.4f} {verdict} ({time.perf_counter() - t0:.1f} s)", flush=True)


if __name__ == "__main__":
    main()
