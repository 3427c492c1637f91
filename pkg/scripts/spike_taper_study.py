#!/usr/bin/env python3
"""Ring taper and tip displacement of one spike across step sizes and shrink modes.

Segment mode should give the same ring ratios for every dt; frame mode
compounds the shrink on each update, so its taper depends on dt.
"""

import argparse

import numpy as np

from procgen.mesh import sphere
from procgen.ops import ring_radius
from procgen.spike import SpikeConfig, spike_new


def grow(cfg: SpikeConfig, dt: float):
    m = sphere(3)
    m.sync()
    g = spike_new(m, m.vertex(100), cfg)
    updates = 0
    while g.update(dt):
        updates += 1
    radii = [ring_radius(np.array([h.p for h in ring])) for ring in g.rings]
    ratios = [b / a for a, b in zip(radii, radii[1:])]
    return float(np.dot(g.v.p - g.origin, g.n)), ratios, updates


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dts", type=float, nargs="+", default=[1 / 60, 1 / 120, 1 / 240, 1 / 1000])
    ap.add_argument("--shrink", type=float, default=0.8)
    a = ap.parse_args()
    print(f"{'mode':8} {'dt':>9} {'updates':>8} {'tip':>8}  ring ratios")
    for mode in ("segment", "frame"):
        for dt in a.dts:
            cfg = SpikeConfig(shrink=a.shrink, shrink_mode=mode)
            tip, ratios, n = grow(cfg, dt)
            print(f"{mode:8} {dt:9.5f} {n:8d} {tip:8.4f}  " + " ".join(f"{r:.4f}" for r in ratios))


if __name__ == "__main__":
    main()
