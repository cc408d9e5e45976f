#!/usr/bin/env python3
"""Emit the Trotterized quench circuits used in the hardware protocol.

Writes OpenQASM 3 files for the N = 20, 16-step, dt = 0.2 quench to the
critical point in both measurement bases and prints the gate accounting.

Usage: python scripts/emit_circuits.py [--n 20] [--steps 16] [--dt 0.2]
"""

import argparse
from pathlib import Path

from kzchain.circuit import emit_program, gate_counts, to_qasm3
from kzchain.cli import _out_root
from kzchain.protocol import Evolution, QuenchProtocol


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--steps", type=int, default=16)
    ap.add_argument("--dt", type=float, default=0.2)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    out = _out_root(args.out) / "circuits"
    out.mkdir(parents=True, exist_ok=True)

    p = QuenchProtocol(tau_q=args.steps * args.dt, evolution=Evolution.TROTTER,
                       dt=args.dt, steps=args.steps)
    for basis in ("z", "x"):
        prog = emit_program(p, args.n, measure_basis=basis)
        path = out / f"tfim_N{args.n}_dt{args.dt:g}_steps{args.steps}_{basis}.qasm"
        path.write_text(to_qasm3(prog))
        print(f"{path}: {gate_counts(prog)}")


if __name__ == "__main__":
    main()
