"""Wavefront OBJ and binary PLY reading/writing."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import MeshFormatError
from .kernel import Mesh


def _obj_index(tok: str, nv: int, path, lineno: int) -> int:
    head = tok.split("/")[0]
    try:
        i = int(head)
    except ValueError:
        raise MeshFormatError(f"bad face index {tok!r}", path, lineno) from None
    if i < 0:
        i = nv + i
    else:
        i -= 1
    if not 0 <= i < nv:
        raise MeshFormatError(f"face index {tok!r} out of range", path, lineno)
    return i


def load_obj(path) -> Mesh:
    """Read ``v``/``f`` records; polygons are fan-triangulated, other records ignored."""
    path = Path(path)
    if not path.exists():
        raise MeshFormatError("no such file", path)
    verts: list[list[float]] = []
    faces: list[tuple[int, int, int]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            tag = parts[0]
            if tag == "v":
                if len(parts) < 4:
                    raise MeshFormatError("vertex needs three coordinates", path, lineno)
                try:
                    verts.append([float(x) for x in parts[1:4]])
                except ValueError:
                    raise MeshFormatError(f"bad vertex coordinate in {line.strip()!r}", path, lineno) from None
            elif tag == "f":
                if len(parts) < 4:
                    raise MeshFormatError("face needs at least three vertices", path, lineno)
                idx = [_obj_index(t, len(verts), path, lineno) for t in parts[1:]]
                for k in range(1, len(idx) - 1):
                    tri = (idx[0], idx[k], idx[k + 1])
                    if len(set(tri)) != 3:
                        raise MeshFormatError("face repeats a vertex", path, lineno)
                    faces.append(tri)
    return Mesh.from_arrays(np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3))


def obj_text(verts: np.ndarray, faces: np.ndarray, normals: np.ndarray | None = None, header: str = "") -> str:
    out = [f"# {header}".rstrip() + "\n" if header else "# procgen mesh\n"]
    out.extend("v %.9g %.9g %.9g\n" % tuple(p) for p in verts)
    if normals is not None:
        out.extend("vn %.9g %.9g %.9g\n" % tuple(n) for n in normals)
        out.extend("f %d//%d %d//%d %d//%d\n" % (a, a, b, b, c, c) for a, b, c in faces + 1)
    else:
        out.extend("f %d %d %d\n" % tuple(f) for f in faces + 1)
    return "".join(out)


def save_obj(m: Mesh, path) -> None:
    """Write ``m``; normals are included only if the mesh is synced."""
    verts, normals, faces = m.arrays()
    Path(path).write_text(obj_text(verts, faces, None if m.dirty else normals), encoding="utf-8")


def ply_bytes(verts: np.ndarray, faces: np.ndarray) -> bytes:
    header = (
        "ply\nformat binary_little_endian 1.0\n"
        f"element vertex {len(verts)}\nproperty float x\nproperty float y\nproperty float z\n"
        f"element face {len(faces)}\nproperty list uchar int vertex_indices\nend_header\n"
    ).encode("ascii")
    vbytes = np.asarray(verts, dtype="<f4").tobytes()
    frec = np.zeros(len(faces), dtype=[("n", "u1"), ("i", "<i4", (3,))])
    frec["n"] = 3
    frec["i"] = faces
    return header + vbytes + frec.tobytes()


def save_ply(m: Mesh, path) -> None:
    verts, _, faces = m.arrays()
    Path(path).write_bytes(ply_bytes(verts, faces))


def load_ply(path) -> Mesh:
    """Read the binary little-endian triangle PLY layout written by :func:`save_ply`."""
    data = Path(path).read_bytes()
    end = data.find(b"end_header\n")
    if end < 0:
        raise MeshFormatError("missing end_header", path)
    header = data[:end].decode("ascii").splitlines()
    if "format binary_little_endian 1.0" not in header:
        raise MeshFormatError("only binary_little_endian PLY is supported", path)
    counts = {}
    for line in header:
        if line.startswith("element"):
            _, name, n = line.split()
            counts[name] = int(n)
    body = data[end + len(b"end_header\n"):]
    nv, nf = counts.get("vertex", 0), counts.get("face", 0)
    verts = np.frombuffer(body[: 12 * nv], dtype="<f4").reshape(-1, 3).astype(float)
    frec = np.frombuffer(body[12 * nv: 12 * nv + 13 * nf], dtype=[("n", "u1"), ("i", "<i4", (3,))])
    if np.any(frec["n"] != 3):
        raise MeshFormatError("non-triangle face in PLY", path)
    return Mesh.from_arrays(verts, frec["i"].astype(np.int64))
