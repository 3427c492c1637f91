"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import ProcgenError
from .lsystem import bundled_lsys, load_lsystem
from .mesh.io import load_obj
from .scene import export_frame, frame_name, run_simulation
from .scenes import SCENES, get_scene

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="procgen", description="Procedural mesh growth: scenes, L-systems and mesh tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate a scene and export one mesh file per frame")
    run.add_argument("scene")
    run.add_argument("--frames", type=int, default=60)
    run.add_argument("--dt", type=float, default=1 / 60)
    run.add_argument("--out", default="frames")
    run.add_argument("--format", choices=("obj", "ply"), default="obj")
    run.add_argument("--subdivide", type=int, default=0, metavar="L")
    run.add_argument("--seed", type=int, default=None, help="defaults to $PROCGEN_SEED, else 0")
    run.add_argument("--param", action="append", default=[], metavar="K=V")

    sub.add_parser("scenes", help="list registered scenes and their parameters")

    ls = sub.add_parser("lsys", help="L-system tools")
    lsub = ls.add_subparsers(dest="lsys_command", required=True, parser_class=_Parser)
    d = lsub.add_parser("derive", help="print successive derivations")
    d.add_argument("file", help="an .lsys file, or the name of a bundled one")
    mode = d.add_mutually_exclusive_group()
    mode.add_argument("--steps", type=int)
    mode.add_argument("--time", type=float)
    d.add_argument("--dt", type=float, default=None)

    mesh = sub.add_parser("mesh", help="mesh tools")
    msub = mesh.add_subparsers(dest="mesh_command", required=True, parser_class=_Parser)
    info = msub.add_parser("info", help="counts, Euler characteristic, manifold check")
    info.add_argument("file")
    return p


def _seed(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("PROCGEN_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"PROCGEN_SEED must be an integer, got {env!r}") from None


def _params(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects K=V, got {item!r}")
        out[key.strip()] = value
    return out


def _lsys_file(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    try:
        return bundled_lsys(p.stem)
    except FileNotFoundError:
        raise ProcgenError(f"no such L-system file: {name}") from None


def cmd_run(a, out) -> int:
    if a.frames < 1:
        raise UsageError("--frames must be >= 1")
    if not a.dt > 0:
        raise UsageError("--dt must be positive")
    if a.subdivide < 0:
        raise UsageError("--subdivide must be >= 0")
    try:
        scene = get_scene(a.scene)
        params = scene.resolve(_params(a.param))
    except (KeyError, ValueError) as err:
        raise UsageError(str(err.args[0])) from None
    outdir = Path(a.out)
    outdir.mkdir(parents=True, exist_ok=True)

    def save(i, u):
        export_frame(u, outdir / frame_name(i, a.format), a.format, a.subdivide)

    u = run_simulation(scene, a.frames, a.dt, params, seed=_seed(a.seed), on_frame=save)
    print(f"{a.scene}: wrote {a.frames} frame(s) to {outdir} (t={u.t:.6g})", file=out)
    return EXIT_OK


def cmd_scenes(a, out) -> int:
    for name in sorted(SCENES):
        s = SCENES[name]
        print(f"{name}: {s.description}", file=out)
        for k, v in s.params.items():
            need = " (required)" if k in s.required else ""
            print(f"    {k} = {v!r} [{type(v).__name__}]{need}", file=out)
    return EXIT_OK


def cmd_lsys_derive(a, out) -> int:
    ls = load_lsystem(_lsys_file(a.file))
    if a.time is not None:
        if a.dt is None or not a.dt > 0 or a.time < 0:
            raise UsageError("--time needs a positive --dt")
        n = round(a.time / a.dt)
        for _ in range(n):
            ls.derive_timed(a.dt)
            print(f"t={ls.clock:.6g}: {ls}", file=out)
        return EXIT_OK
    if a.dt is not None:
        raise UsageError("--dt only applies with --time")
    steps = 1 if a.steps is None else a.steps
    if steps < 0:
        raise UsageError("--steps must be >= 0")
    for _ in range(steps):
        ls.derive()
        print(ls, file=out)
    return EXIT_OK


def cmd_mesh_info(a, out) -> int:
    m = load_obj(a.file)
    V, E, F = m.n_vertices, m.n_edges, m.n_faces
    print(f"V={V} E={E} F={F}", file=out)
    print(f"euler={V - E + F}", file=out)
    print(f"manifold={'true' if m.is_manifold() else 'false'}", file=out)
    print(f"closed={'true' if m.is_closed() else 'false'}", file=out)
    return EXIT_OK


def cli_main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        a = build_parser().parse_args(argv)
        if a.command == "run":
            return cmd_run(a, out)
        if a.command == "scenes":
            return cmd_scenes(a, out)
        if a.command == "lsys":
            return cmd_lsys_derive(a, out)
        return cmd_mesh_info(a, out)
    except UsageError as e:
        print(str(e).rstrip(), file=err)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except (ProcgenError, OSError) as e:
        print(f"procgen: error: {e}", file=err)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(cli_main())
