#!/usr/bin/env python3
"""Radius error of a swept circle versus sampling density, and cost of the mesh."""

import argparse
import time

import numpy as np

from procgen.cylinder import GeneralisedCylinder, cylinder_mesh


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--around", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--along", type=int, default=8)
    ap.add_argument("--points", type=int, default=5)
    a = ap.parse_args()
    gc = GeneralisedCylinder()
    for i in range(a.points):
        gc.add([0.0, float(i), 0.0], np.eye(3), 1.0, 0)
    print(f"{'around':>6} {'faces':>7} {'max |r-1|':>10} {'ms':>7}")
    for n in a.around:
        t0 = time.perf_counter()
        m = cylinder_mesh(gc, n, a.along)
        ms = 1000 * (time.perf_counter() - t0)
        p = m.positions()
        err = np.abs(np.hypot(p[:, 0], p[:, 2]) - 1).max()
        print(f"{n:6d} {m.n_faces:7d} {err:10.2e} {ms:7.2f}")


if __name__ == "__main__":
    main()
