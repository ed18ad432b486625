"""Sup-norm error against particle count, with an optional log-log plot.

    python scripts/convergence_sweep.py --plot sweep.png
"""
import argparse
from collections import defaultdict

import numpy as np

from lattice_wigner.cli_io import build_config, sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--particles", type=int, nargs="+", default=[1000, 10_000, 100_000, 1_000_000])
    ap.add_argument("--seeds", type=int, default=4)
    ap.add_argument("--time", type=float, default=1.0)
    ap.add_argument("--plot", help="write a PNG (needs matplotlib)")
    args = ap.parse_args()

    cfg = build_config({"preset": "sz3", "sweep": {"particles": args.particles, "time": args.time, "seeds": args.seeds}})
    rows, slope = sweep(cfg)
    by_m = defaultdict(list)
    for M, _, err in rows:
        by_m[M].append(err)
    for M, errs in sorted(by_m.items()):
        print(f"M={M:>8d}  mean sup error {np.mean(errs):.3e}")
    print(f"log-log slope {slope:.3f} (M^-1/2 gives -0.5)")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        Ms = np.array(sorted(by_m))
        errs = np.array([np.mean(by_m[M]) for M in Ms])
        fig, ax = plt.subplots(figsize=(4, 3))
        ax.loglog(Ms, errs, "o-", label="engine")
        ax.loglog(Ms, errs[0] * np.sqrt(Ms[0] / Ms), "k--", label="M^-1/2")
        ax.set_xlabel("particles")
        ax.set_ylabel("sup |rho_est - rho_exact|")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)


if __name__ == "__main__":
    main()
