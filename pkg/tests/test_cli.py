import io

import pytest

from procgen.cli import cli_main
from procgen.mesh.io import save_obj
from procgen.mesh.primitives import icosahedron


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_run_writes_one_file_per_frame(tmp_path):
    code, out, _ = run("run", "listing1", "--frames", "3", "--dt", "0.0166", "--out", str(tmp_path))
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == [f"frame_00000{i}.obj" for i in range(3)]
    assert "wrote 3 frame(s)" in out


def test_run_ply_and_subdivide(tmp_path):
    code, _, _ = run("run", "listing1", "--frames", "1", "--out", str(tmp_path), "--format", "ply",
                     "--subdivide", "1", "--param", "level=1")
    assert code == 0 and (tmp_path / "frame_000000.ply").exists()


def test_lsys_derive_countdown_trace():
    code, out, _ = run("lsys", "derive", "examples/listing4.lsys", "--steps", "3")
    assert code == 0
    assert out.splitlines() == ["B(1) A(4,4.14159)", "B(0) A(4,4.14159)", "C(0) A(4,4.14159)"]


def test_lsys_derive_timed(tmp_path):
    f = tmp_path / "t.lsys"
    f.write_text("axiom: (A(0),0)\nrule: (A(x),1) -> (A(x+1),0)\n")
    code, out, _ = run("lsys", "derive", str(f), "--time", "2", "--dt", "0.5")
    assert code == 0
    assert out.splitlines()[-1] == "t=2: (A(2),0)"


def test_mesh_info(tmp_path):
    path = tmp_path / "ico.obj"
    save_obj(icosahedron(), path)
    code, out, _ = run("mesh", "info", str(path))
    assert code == 0
    assert "V=12 E=30 F=20" in out and "euler=2" in out and "manifold=true" in out


def test_scenes_command():
    code, out, _ = run("scenes")
    assert code == 0
    for name in ("listing1", "spikes", "suckers", "bunny-stalks", "calcispongiae", "hybrid"):
        assert f"{name}:" in out
    assert "(required)" in out


@pytest.mark.parametrize("argv", [
    ["run", "nosuchscene"],
    ["run", "listing1", "--bogus"],
    ["run", "listing1", "--param", "nope=1"],
    ["run", "listing1", "--param", "level"],
    ["run", "listing1", "--frames", "0"],
    ["run", "bunny-stalks"],
    ["lsys", "derive", "examples/listing4.lsys", "--time", "1"],
    ["lsys", "derive", "examples/listing4.lsys", "--steps", "1", "--time", "1"],
    [],
])
def test_usage_errors_exit_1(argv, tmp_path):
    code, _, err = run(*argv, *(["--out", str(tmp_path)] if argv[:1] == ["run"] else []))
    assert code == 1 and err


def test_runtime_errors_exit_2(tmp_path):
    assert run("mesh", "info", str(tmp_path / "missing.obj"))[0] == 2
    bad = tmp_path / "bad.lsys"
    bad.write_text("axiom: A(\n")
    assert run("lsys", "derive", str(bad))[0] == 2
    assert run("lsys", "derive", "no_such_system")[0] == 2


def test_help_exits_0():
    assert run("--help")[0] == 0


def test_seed_from_environment(tmp_path, monkeypatch):
    obj = tmp_path / "ico.obj"
    save_obj(icosahedron(), obj)
    outs = {}
    for label, env, flag in (("env", "5", []), ("flag", None, ["--seed", "5"]), ("other", "6", [])):
        if env is None:
            monkeypatch.delenv("PROCGEN_SEED", raising=False)
        else:
            monkeypatch.setenv("PROCGEN_SEED", env)
        d = tmp_path / label
        code, _, _ = run("run", "bunny-stalks", "--frames", "2", "--out", str(d), "--param", f"obj={obj}",
                         "--param", "count=3", *flag)
        assert code == 0
        outs[label] = [p.read_bytes() for p in sorted(d.iterdir())]
    assert outs["env"] == outs["flag"]
    monkeypatch.setenv("PROCGEN_SEED", "x")
    assert run("run", "listing1", "--frames", "1", "--out", str(tmp_path / "z"))[0] == 1
