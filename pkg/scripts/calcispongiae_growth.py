#!/usr/bin/env python3
"""Develop the bundled branching sponge model and report (optionally export) its growth.

Prints module, branch and cylinder counts at regular times; with --out it
writes one OBJ per report time.
"""

import argparse
from pathlib import Path

from procgen.lsystem import bundled_lsys, load_lsystem
from procgen.mesh.io import save_obj
from procgen.mesh.kernel import Mesh
from procgen.turtle import InterpretationMap, interpret


def merged(meshes) -> Mesh:
    m = Mesh()
    for part in meshes:
        base = m.add_vertices(part.positions())
        m.add_faces_indices(part.face_indices() + base[0] if len(base) else part.face_indices())
    return m


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--file", default=None, help="an .lsys file (default: the bundled model)")
    ap.add_argument("--dt", type=float, default=0.05)
    ap.add_argument("--until", type=float, default=40.0)
    ap.add_argument("--every", type=float, default=4.0)
    ap.add_argument("--out", type=Path, default=None)
    a = ap.parse_args()

    ls = load_lsystem(a.file or bundled_lsys("calcispongiae"))
    imap = InterpretationMap(ignore=frozenset("ABC"))
    if a.out:
        a.out.mkdir(parents=True, exist_ok=True)
    print(f"{'t':>6} {'modules':>8} {'branches':>9} {'cylinders':>10} {'faces':>8}")
    next_report = 0.0
    while True:
        if ls.clock >= next_report - 1e-9:
            meshes = interpret(ls.modules, imap, ls.growth)
            faces = sum(m.n_faces for m in meshes)
            branches = sum(m.symbol == "[" for m in ls.modules)
            print(f"{ls.clock:6.2f} {len(ls.modules):8d} {branches:9d} {len(meshes):10d} {faces:8d}")
            if a.out and meshes:
                save_obj(merged(meshes), a.out / f"calcispongiae_t{ls.clock:06.2f}.obj")
            next_report += a.every
        if ls.clock >= a.until - 1e-9:
            break
        ls.derive_timed(a.dt)


if __name__ == "__main__":
    main()
