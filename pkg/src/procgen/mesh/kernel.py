"""Indexed triangle mesh with generation-checked element handles.

Vertices and faces live in slot arrays. Each element gets a serial
``gen`` number when created; a handle stores ``(slot, gen)`` and resolves
only while the slot is alive and still carries that serial. Deleting an
element kills its slot (slots are never reused), and :meth:`Mesh.compact`
moves survivors while recording where each serial went, so outstanding
handles follow their element instead of silently pointing at another one.

Edges are implicit: an edge is a pair of vertices appearing consecutively
in a face. Face ``(a, b, c)`` owns local edges ``0 = (a, b)``,
``1 = (b, c)`` and ``2 = (c, a)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..errors import BoundaryError, StaleHandleError, UnsupportedInputError

DEFAULT_COLOUR = (1.0, 1.0, 1.0, 1.0)


class VertexHandle:
    """Proxy for a mesh vertex. ``p``, ``n`` and ``c`` read/write through to the mesh."""

    __slots__ = ("mesh", "slot", "gen")

    def __init__(self, mesh: "Mesh", slot: int, gen: int):
        self.mesh = mesh
        self.slot = slot
        self.gen = gen

    def valid(self) -> bool:
        return self.mesh._resolve_v(self) is not None

    def index(self) -> int:
        s = self.mesh._resolve_v(self)
        if s is None:
            raise StaleHandleError(f"vertex handle (slot {self.slot}, gen {self.gen}) is stale")
        return s

    @property
    def p(self) -> np.ndarray:
        return self.mesh._vp[self.index()].copy()

    @p.setter
    def p(self, value) -> None:
        self.mesh._vp[self.index()] = value
        self.mesh.dirty = True

    @property
    def n(self) -> np.ndarray:
        return self.mesh._vn[self.index()].copy()

    @n.setter
    def n(self, value) -> None:
        self.mesh._vn[self.index()] = value

    @property
    def c(self) -> np.ndarray:
        return self.mesh._vc[self.index()].copy()

    @c.setter
    def c(self, value) -> None:
        self.mesh._vc[self.index()] = value

    def __eq__(self, other) -> bool:
        return isinstance(other, VertexHandle) and other.mesh is self.mesh and other.gen == self.gen

    def __hash__(self) -> int:
        return hash((id(self.mesh), "v", self.gen))

    def __repr__(self) -> str:
        return f"VertexHandle(slot={self.slot}, gen={self.gen})"


class FaceHandle:
    __slots__ = ("mesh", "slot", "gen")

    def __init__(self, mesh: "Mesh", slot: int, gen: int):
        self.mesh = mesh
        self.slot = slot
        self.gen = gen

    def valid(self) -> bool:
        return self.mesh._resolve_f(self) is not None

    def index(self) -> int:
        s = self.mesh._resolve_f(self)
        if s is None:
            raise StaleHandleError(f"face handle (slot {self.slot}, gen {self.gen}) is stale")
        return s

    @property
    def n(self) -> np.ndarray:
        return self.mesh._fn[self.index()].copy()

    def v(self, i: int) -> VertexHandle:
        return self.mesh._vhandle(int(self.mesh._fv[self.index(), i]))

    def vertices(self) -> list[VertexHandle]:
        return [self.v(i) for i in range(3)]

    def __eq__(self, other) -> bool:
        return isinstance(other, FaceHandle) and other.mesh is self.mesh and other.gen == self.gen

    def __hash__(self) -> int:
        return hash((id(self.mesh), "f", self.gen))

    def __repr__(self) -> str:
        return f"FaceHandle(slot={self.slot}, gen={self.gen})"


@dataclass(frozen=True)
class Pos:
    """Cell tuple ``<v, e, f>``.

    ``e == 0`` names the edge from ``v`` to the next corner of ``f`` and
    ``e == 1`` the edge from the previous corner to ``v``.
    """

    v: VertexHandle
    e: int
    f: FaceHandle

    def _corner(self) -> tuple[int, int, np.ndarray]:
        m = self.v.mesh
        fs = self.f.index()
        vs = self.v.index()
        tri = m._fv[fs]
        hits = np.nonzero(tri == vs)[0]
        if len(hits) != 1:
            raise StaleHandleError("pos vertex is not a corner of its face")
        return fs, int(hits[0]), tri

    def local_edge(self) -> int:
        _, i, _ = self._corner()
        return i if self.e == 0 else (i + 2) % 3

    def other(self) -> VertexHandle:
        """The far endpoint of this pos's edge."""
        _, i, tri = self._corner()
        j = (i + 1) % 3 if self.e == 0 else (i + 2) % 3
        return self.v.mesh._vhandle(int(tri[j]))

    def edge(self) -> frozenset:
        return frozenset((self.v.index(), self.other().index()))

    def key(self) -> tuple:
        """Hashable semantic triple (vertex slot, edge endpoints, face slot)."""
        return (self.v.index(), self.edge(), self.f.index())

    def flip_v(self) -> "Pos":
        return Pos(self.other(), 1 - self.e, self.f)

    def flip_e(self) -> "Pos":
        self._corner()
        return Pos(self.v, 1 - self.e, self.f)

    def flip_f(self) -> "Pos":
        m = self.v.mesh
        fs, i, tri = self._corner()
        k = i if self.e == 0 else (i + 2) % 3
        topo = m.topology()
        g = int(topo.fadj[fs, k])
        if g < 0:
            raise BoundaryError("flip_f across a boundary edge")
        w = int(tri[(i + 1) % 3]) if self.e == 0 else int(tri[(i + 2) % 3])
        gtri = m._fv[g]
        j = int(np.nonzero(gtri == tri[i])[0][0])
        e = 0 if int(gtri[(j + 1) % 3]) == w else 1
        return Pos(self.v, e, m._fhandle(g))


def pos_flip(p: Pos, axis: str) -> Pos:
    axis = axis.upper()
    if axis == "V":
        return p.flip_v()
    if axis == "E":
        return p.flip_e()
    if axis == "F":
        return p.flip_f()
    raise ValueError(f"unknown flip axis {axis!r}")


@dataclass
class Topology:
    """Adjacency derived from the face list; rebuilt whenever faces change."""

    fadj: np.ndarray          # (face slots, 3) neighbouring face slot per local edge, -1 on boundary
    vf_start: np.ndarray      # CSR offsets into vf_faces, per vertex slot
    vf_faces: np.ndarray      # incident face slots grouped by vertex
    edges: np.ndarray         # unique undirected edges (E, 2), sorted pairs
    edge_count: np.ndarray    # faces per edge
    consistent: bool          # no directed edge used twice

    @property
    def manifold(self) -> bool:
        return self.consistent and bool(np.all(self.edge_count <= 2))

    @property
    def closed(self) -> bool:
        return self.manifold and bool(np.all(self.edge_count == 2))


def _grow(a: np.ndarray, need: int, fill=0) -> np.ndarray:
    if need <= len(a):
        return a
    cap = max(need, 2 * len(a), 16)
    out = np.full((cap,) + a.shape[1:], fill, dtype=a.dtype)
    out[: len(a)] = a
    return out


class Mesh:
    def __init__(self):
        self._vp = np.zeros((0, 3))
        self._vn = np.zeros((0, 3))
        self._vc = np.zeros((0, 4))
        self._valive = np.zeros(0, dtype=bool)
        self._vgen = np.zeros(0, dtype=np.int64)
        self._nv = 0
        self._fv = np.zeros((0, 3), dtype=np.int64)
        self._fn = np.zeros((0, 3))
        self._falive = np.zeros(0, dtype=bool)
        self._fgen = np.zeros(0, dtype=np.int64)
        self._nf = 0
        self._next_vgen = 0
        self._next_fgen = 0
        self._vreloc: dict[int, int] = {}
        self._freloc: dict[int, int] = {}
        self._topo: Topology | None = None
        self.dirty = True

    # -- construction ------------------------------------------------------

    @classmethod
    def from_arrays(cls, vertices, faces) -> "Mesh":
        m = cls()
        m.add_vertices(vertices)
        m.add_faces_indices(faces)
        return m

    def add_vertices(self, pts) -> list[int]:
        """Append vertices in bulk; returns their slots."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        k = len(pts)
        s0, s1 = self._nv, self._nv + k
        self._vp = _grow(self._vp, s1)
        self._vn = _grow(self._vn, s1)
        self._vc = _grow(self._vc, s1, 1.0)
        self._valive = _grow(self._valive, s1, False)
        self._vgen = _grow(self._vgen, s1, -1)
        self._vp[s0:s1] = pts
        self._vn[s0:s1] = 0.0
        self._vc[s0:s1] = DEFAULT_COLOUR
        self._valive[s0:s1] = True
        self._vgen[s0:s1] = np.arange(self._next_vgen, self._next_vgen + k)
        self._next_vgen += k
        self._nv = s1
        self.dirty = True
        return list(range(s0, s1))

    def add_vertex(self, p, c=None) -> VertexHandle:
        s = self.add_vertices([p])[0]
        if c is not None:
            self._vc[s] = c
        return self._vhandle(s)

    def add_faces_indices(self, faces) -> list[int]:
        """Append faces given as vertex slot triples."""
        faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        if len(faces):
            if faces.min() < 0 or faces.max() >= self._nv or not np.all(self._valive[faces]):
                raise ValueError("face references a dead or missing vertex")
            if np.any((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 0] == faces[:, 2])):
                raise ValueError("face corners must be distinct vertices")
        k = len(faces)
        s0, s1 = self._nf, self._nf + k
        self._fv = _grow(self._fv, s1)
        self._fn = _grow(self._fn, s1)
        self._falive = _grow(self._falive, s1, False)
        self._fgen = _grow(self._fgen, s1, -1)
        self._fv[s0:s1] = faces
        self._fn[s0:s1] = 0.0
        self._falive[s0:s1] = True
        self._fgen[s0:s1] = np.arange(self._next_fgen, self._next_fgen + k)
        self._next_fgen += k
        self._nf = s1
        self._touch_topology()
        return list(range(s0, s1))

    def add_face(self, a: VertexHandle, b: VertexHandle, c: VertexHandle) -> FaceHandle:
        s = self.add_faces_indices([[a.index(), b.index(), c.index()]])[0]
        return self._fhandle(s)

    def set_face(self, f: FaceHandle, a: VertexHandle, b: VertexHandle, c: VertexHandle) -> None:
        """Rewire an existing face in place (the face keeps its identity)."""
        tri = [a.index(), b.index(), c.index()]
        if len(set(tri)) != 3:
            raise ValueError("face corners must be distinct vertices")
        self._fv[f.index()] = tri
        self._touch_topology()

    def delete_face(self, f: FaceHandle) -> None:
        self._falive[f.index()] = False
        self._touch_topology()

    def delete_vertex(self, v: VertexHandle) -> None:
        """Delete a vertex together with every face using it."""
        s = v.index()
        used = self._falive[: self._nf] & np.any(self._fv[: self._nf] == s, axis=1)
        self._falive[: self._nf][used] = False
        self._valive[s] = False
        self._touch_topology()

    def _touch_topology(self) -> None:
        self._topo = None
        self.dirty = True

    # -- handle plumbing ---------------------------------------------------

    def _vhandle(self, slot: int) -> VertexHandle:
        return VertexHandle(self, slot, int(self._vgen[slot]))

    def _fhandle(self, slot: int) -> FaceHandle:
        return FaceHandle(self, slot, int(self._fgen[slot]))

    def _resolve_v(self, h: VertexHandle) -> int | None:
        s = h.slot
        if s < self._nv and self._vgen[s] == h.gen:
            return s if self._valive[s] else None
        s = self._vreloc.get(h.gen)
        if s is None or not self._valive[s] or self._vgen[s] != h.gen:
            return None
        h.slot = s
        return s

    def _resolve_f(self, h: FaceHandle) -> int | None:
        s = h.slot
        if s < self._nf and self._fgen[s] == h.gen:
            return s if self._falive[s] else None
        s = self._freloc.get(h.gen)
        if s is None or not self._falive[s] or self._fgen[s] != h.gen:
            return None
        h.slot = s
        return s

    def vertex(self, slot: int) -> VertexHandle:
        if not (0 <= slot < self._nv and self._valive[slot]):
            raise StaleHandleError(f"no live vertex in slot {slot}")
        return self._vhandle(slot)

    def face(self, slot: int) -> FaceHandle:
        if not (0 <= slot < self._nf and self._falive[slot]):
            raise StaleHandleError(f"no live face in slot {slot}")
        return self._fhandle(slot)

    # -- queries -------------------------------------------------------------

    def vertex_slots(self) -> np.ndarray:
        return np.nonzero(self._valive[: self._nv])[0]

    def face_slots(self) -> np.ndarray:
        return np.nonzero(self._falive[: self._nf])[0]

    def vertexlist(self) -> list[VertexHandle]:
        return [self._vhandle(int(s)) for s in self.vertex_slots()]

    def facelist(self) -> list[FaceHandle]:
        return [self._fhandle(int(s)) for s in self.face_slots()]

    @property
    def n_vertices(self) -> int:
        return int(self._valive[: self._nv].sum())

    @property
    def n_faces(self) -> int:
        return int(self._falive[: self._nf].sum())

    @property
    def n_edges(self) -> int:
        return len(self.topology().edges)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def is_manifold(self) -> bool:
        return self.topology().manifold

    def is_closed(self) -> bool:
        """Every edge bounds exactly two consistently oriented faces."""
        return self.topology().closed

    def positions(self) -> np.ndarray:
        return self._vp[self.vertex_slots()].copy()

    def face_indices(self) -> np.ndarray:
        """Alive faces as vertex slot triples."""
        return self._fv[self.face_slots()].copy()

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Compact ``(positions, normals, faces)`` with faces indexing into the returned rows."""
        vs = self.vertex_slots()
        remap = np.full(self._nv, -1, dtype=np.int64)
        remap[vs] = np.arange(len(vs))
        faces = remap[self._fv[self.face_slots()]]
        return self._vp[vs].copy(), self._vn[vs].copy(), faces

    def topology(self) -> Topology:
        if self._topo is None:
            self._topo = self._build_topology()
        return self._topo

    def _build_topology(self) -> Topology:
        nf = self._nf
        fs = self.face_slots()
        fv = self._fv[fs]
        NV = max(self._nv, 1)
        a = fv.reshape(-1)
        b = fv[:, [1, 2, 0]].reshape(-1)
        owner = np.repeat(fs, 3)
        local = np.tile(np.arange(3), len(fs))
        key = a * NV + b
        order = np.argsort(key, kind="stable")
        skey = key[order]
        dup = np.zeros(len(skey), dtype=bool)
        if len(skey) > 1:
            same = skey[1:] == skey[:-1]
            dup[1:] |= same
            dup[:-1] |= same
        consistent = not bool(dup.any())
        dup_self = np.zeros(len(key), dtype=bool)
        dup_self[order] = dup
        fadj = np.full((nf, 3), -1, dtype=np.int64)
        if len(skey):
            twin = b * NV + a
            pos = np.minimum(np.searchsorted(skey, twin), len(skey) - 1)
            # a directed edge used twice has ambiguous neighbours
            found = (skey[pos] == twin) & ~dup[pos] & ~dup_self
            fadj[owner[found], local[found]] = owner[order[pos[found]]]

        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        ukey, counts = np.unique(lo * NV + hi, return_counts=True)
        edges = np.stack([ukey // NV, ukey % NV], axis=1) if len(ukey) else np.zeros((0, 2), np.int64)

        corner_v = a
        vorder = np.argsort(corner_v, kind="stable")
        vf_faces = owner[vorder]
        vf_start = np.searchsorted(corner_v[vorder], np.arange(self._nv + 1))
        return Topology(fadj, vf_start, vf_faces, edges, counts, consistent)

    def faces_of(self, v: VertexHandle) -> list[int]:
        s = v.index()
        t = self.topology()
        return [int(f) for f in t.vf_faces[t.vf_start[s]: t.vf_start[s + 1]]]

    def fan(self, v: VertexHandle) -> tuple[list[int], list[int], bool]:
        """Ordered one-ring of ``v``.

        Returns ``(ring vertex slots, face slots, closed)`` where face ``i``
        spans ``ring[i] -> ring[i+1]``. Closed fans are cyclic; open fans run
        from one boundary edge to the other.
        """
        s = v.index()
        succ: dict[int, tuple[int, int]] = {}
        targets: set[int] = set()
        for f in self.faces_of(v):
            tri = self._fv[f]
            i = int(np.nonzero(tri == s)[0][0])
            a, b = int(tri[(i + 1) % 3]), int(tri[(i + 2) % 3])
            if a in succ or b in targets:
                raise UnsupportedInputError(f"vertex slot {s} has a non-manifold fan")
            succ[a] = (b, f)
            targets.add(b)
        if not succ:
            return [], [], False
        starts = [a for a in succ if a not in targets]
        if len(starts) > 1:
            raise UnsupportedInputError(f"vertex slot {s} has a non-manifold fan")
        closed = not starts
        start = starts[0] if starts else min(succ)
        ring, faces = [start], []
        cur = start
        while cur in succ:
            nxt, f = succ[cur]
            faces.append(f)
            if closed and nxt == start:
                break
            ring.append(nxt)
            cur = nxt
            if len(faces) > len(succ):
                break
        if len(faces) != len(succ):
            raise UnsupportedInputError(f"vertex slot {s} has a non-manifold fan")
        return ring, faces, closed

    def is_boundary_vertex(self, v: VertexHandle) -> bool:
        return not self.fan(v)[2]

    def neighbours(self, s: int) -> set[int]:
        t = self.topology()
        out: set[int] = set()
        for f in t.vf_faces[t.vf_start[s]: t.vf_start[s + 1]]:
            out.update(int(x) for x in self._fv[f])
        out.discard(s)
        return out

    # -- geometry --------------------------------------------------------------

    def sync(self) -> None:
        """Recompute face normals and area-weighted vertex normals."""
        fs = self.face_slots()
        fv = self._fv[fs]
        p = self._vp
        cr = np.cross(p[fv[:, 1]] - p[fv[:, 0]], p[fv[:, 2]] - p[fv[:, 0]])
        ln = np.linalg.norm(cr, axis=1, keepdims=True)
        fn = np.divide(cr, ln, out=np.zeros_like(cr), where=ln > 1e-300)
        self._fn[fs] = fn
        acc = np.zeros((self._nv, 3))
        for k in range(3):
            np.add.at(acc, fv[:, k], cr)
        ln = np.linalg.norm(acc, axis=1, keepdims=True)
        self._vn[: self._nv] = np.divide(acc, ln, out=np.zeros_like(acc), where=ln > 1e-300)
        self.dirty = False

    def transform(self, m: np.ndarray) -> None:
        """Apply an affine matrix to every vertex permanently."""
        from ..geom import transform_points

        vs = self.vertex_slots()
        self._vp[vs] = transform_points(m, self._vp[vs])
        self.dirty = True

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        p = self.positions()
        return p.min(axis=0), p.max(axis=0)

    # -- bookkeeping -------------------------------------------------------------

    def copy(self) -> "Mesh":
        m = Mesh()
        for name in ("_vp", "_vn", "_vc", "_valive", "_vgen", "_fv", "_fn", "_falive", "_fgen"):
            setattr(m, name, getattr(self, name).copy())
        m._nv, m._nf = self._nv, self._nf
        m._next_vgen, m._next_fgen = self._next_vgen, self._next_fgen
        m._vreloc, m._freloc = dict(self._vreloc), dict(self._freloc)
        m.dirty = self.dirty
        return m

    def compact(self) -> None:
        """Pack live elements into the leading slots; outstanding handles follow them."""
        vs = self.vertex_slots()
        fs = self.face_slots()
        remap = np.full(self._nv, -1, dtype=np.int64)
        remap[vs] = np.arange(len(vs))
        for new, old in enumerate(vs):
            if new != old:
                self._vreloc[int(self._vgen[old])] = new
        for new, old in enumerate(fs):
            if new != old:
                self._freloc[int(self._fgen[old])] = new
        for name in ("_vp", "_vn", "_vc", "_vgen"):
            setattr(self, name, getattr(self, name)[vs].copy())
        self._valive = np.ones(len(vs), dtype=bool)
        self._fv = remap[self._fv[fs]]
        self._fn = self._fn[fs].copy()
        self._fgen = self._fgen[fs].copy()
        self._falive = np.ones(len(fs), dtype=bool)
        self._nv, self._nf = len(vs), len(fs)
        self._topo = None

    def __repr__(self) -> str:
        return f"Mesh(V={self.n_vertices}, F={self.n_faces})"


def loopv(v: VertexHandle) -> list[VertexHandle]:
    """Ordered one-ring of ``v`` (cyclic for interior vertices)."""
    ring, _, _ = v.mesh.fan(v)
    return [v.mesh._vhandle(s) for s in ring]


def nearbyv(v: VertexHandle, n: int) -> list[VertexHandle]:
    """All vertices within ``n`` edges of ``v`` (including ``v``), in BFS order."""
    if n < 0:
        raise ValueError("n must be non-negative")
    m = v.mesh
    start = v.index()
    seen = {start: 0}
    order = [start]
    q = deque([start])
    while q:
        s = q.popleft()
        if seen[s] == n:
            continue
        for t in sorted(m.neighbours(s)):
            if t not in seen:
                seen[t] = seen[s] + 1
                order.append(t)
                q.append(t)
    return [m._vhandle(s) for s in order]


def vertexlist(m: Mesh) -> list[VertexHandle]:
    return m.vertexlist()


def facelist(m: Mesh) -> list[FaceHandle]:
    return m.facelist()


def edge_face_counts(m: Mesh) -> dict[tuple[int, int], int]:
    t = m.topology()
    return {(int(a), int(b)): int(c) for (a, b), c in zip(t.edges, t.edge_count)}


def cap_pos(v: VertexHandle, face_slot: int) -> Pos:
    """The pos at ``v`` in face ``face_slot`` whose edge leads to the next corner."""
    return Pos(v, 0, v.mesh._fhandle(face_slot))
