#!/usr/bin/env python3
"""Trotter-step-duration study at N = 120.

Compares the continuous quench sweep (tau_q = 1..8) against Trotterized
quenches with dt in {0.1, 0.2, 0.25, 0.5}, even step counts up to 16 and
tau_q = dt * steps >= 1.  For each dataset the best-fit collapse
exponents are printed against the closed-system reference (0.5, 0.125);
intermediate step durations land closest.

Usage: python scripts/run_trotter_dt_study.py [--out runs/dt_study]
"""

import argparse
import time

from kzchain.cli import _out_root, _recipe_collapse, _trotter_steps
from kzchain.collapse import QKZ_EXPONENTS
from kzchain.config import RunConfig
from kzchain.protocol import Evolution

DTS = [0.1, 0.2, 0.25, 0.5]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=120)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    root = _out_root(args.out) / "dt_study"

    cfg = RunConfig(n_sites=args.n, tau_sweep=[float(t) for t in range(1, 9)])
    t0 = time.time()
    _, res = _recipe_collapse(cfg, root, "continuous")
    print(f"continuous      : best (a, b) = {res.best}  "
          f"[reference {QKZ_EXPONENTS}]  [{time.time() - t0:.0f}s]")

    for dt in DTS:
        steps = _trotter_steps(dt)
        cfg = RunConfig(n_sites=args.n, evolution=Evolution.TROTTER,
                        dt=dt, steps=steps)
        t0 = time.time()
        _, res = _recipe_collapse(cfg, root, f"dt{dt:g}")
        dev = max(abs(res.best[0] - QKZ_EXPONENTS[0]),
                  abs(res.best[1] - QKZ_EXPONENTS[1]))
        print(f"dt = {dt:4g} ({len(steps)} quenches): best (a, b) = {res.best}, "
              f"max deviation {dev:.3f}  [{time.time() - t0:.0f}s]")


if __name__ == "__main__":
    main()
