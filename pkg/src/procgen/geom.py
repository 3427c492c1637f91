"""Small linear-algebra kit: vectors, homogeneous matrices, quaternions.

Vectors are plain ``numpy`` float arrays of shape ``(3,)`` and matrices are
``(4, 4)`` arrays, row-major, acting on column vectors (``M @ [x, y, z, 1]``).
Angles are radians throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS = 1e-12
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def vec3(x: float = 0.0, y: float = 0.0, z: float = 0.0) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


def length(v) -> float:
    return float(math.sqrt(float(np.dot(v, v))))


def distance(a, b) -> float:
    return length(np.asarray(a, float) - np.asarray(b, float))


def normalized(v) -> np.ndarray:
    """Unit vector in the direction of ``v``; raises on (near) zero input."""
    v = np.asarray(v, dtype=float)
    n = length(v)
    if n < EPS or not math.isfinite(n):
        raise ValueError(f"cannot normalise vector {v!r}")
    return v / n


def perp(v) -> np.ndarray:
    """A unit vector perpendicular to ``v``."""
    v = normalized(v)
    # cross with the axis least aligned with v
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(v)))] = 1.0
    p = np.cross(v, axis)
    return p / length(p)


# -- homogeneous matrices ----------------------------------------------------

def identity() -> np.ndarray:
    return np.eye(4)


def translate(t) -> np.ndarray:
    m = np.eye(4)
    m[:3, 3] = np.asarray(t, dtype=float)
    return m


def scale(s) -> np.ndarray:
    s = np.broadcast_to(np.asarray(s, dtype=float), (3,))
    m = np.eye(4)
    m[0, 0], m[1, 1], m[2, 2] = s
    return m


def rotation3(rad: float, axis) -> np.ndarray:
    """3x3 right-handed rotation by ``rad`` about ``axis`` (Rodrigues)."""
    x, y, z = normalized(axis)
    c, s = math.cos(rad), math.sin(rad)
    C = 1.0 - c
    return np.array([
        [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
        [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
        [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
    ])


def rotate(rad: float, axis) -> np.ndarray:
    m = np.eye(4)
    m[:3, :3] = rotation3(rad, axis)
    return m


def rotate_align(a, b) -> np.ndarray:
    """Rotation taking direction ``a`` onto direction ``b``."""
    a = normalized(a)
    b = normalized(b)
    c = float(np.clip(np.dot(a, b), -1.0, 1.0))
    axis = np.cross(a, b)
    s = length(axis)
    if s < 1e-12:
        if c > 0:
            return np.eye(4)
        return rotate(math.pi, perp(a))
    return rotate(math.atan2(s, c), axis / s)


def transform_point(m: np.ndarray, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return m[:3, :3] @ p + m[:3, 3]


def transform_points(m: np.ndarray, pts: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float).reshape(-1, 3)
    return pts @ m[:3, :3].T + m[:3, 3]


def transform_normals(m: np.ndarray, nrm: np.ndarray) -> np.ndarray:
    """Transform normals by the inverse transpose and renormalise (zero rows stay zero)."""
    nrm = np.asarray(nrm, dtype=float).reshape(-1, 3)
    out = nrm @ np.linalg.inv(m[:3, :3])
    ln = np.linalg.norm(out, axis=1, keepdims=True)
    return np.divide(out, ln, out=np.zeros_like(out), where=ln > EPS)


# -- quaternions --------------------------------------------------------------

@dataclass(frozen=True)
class Quat:
    w: float = 1.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_axis_angle(cls, axis, rad: float) -> "Quat":
        ax = normalized(axis)
        s = math.sin(rad / 2.0)
        return cls(math.cos(rad / 2.0), *(float(c) * s for c in ax))

    @classmethod
    def from_matrix(cls, m) -> "Quat":
        """Quaternion of a 3x3 (or the upper block of a 4x4) rotation matrix."""
        m = np.asarray(m, dtype=float)[:3, :3]
        tr = m[0, 0] + m[1, 1] + m[2, 2]
        if tr > 0:
            s = math.sqrt(tr + 1.0) * 2
            q = cls(0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s)
        elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
            s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2
            q = cls((m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s)
        elif m[1, 1] > m[2, 2]:
            s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2
            q = cls((m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s)
        else:
            s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2
            q = cls((m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s)
        return q.normalized()

    def __mul__(self, o: "Quat") -> "Quat":
        return Quat(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )

    def norm(self) -> float:
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def normalized(self) -> "Quat":
        n = self.norm()
        if n < EPS:
            raise ValueError("zero quaternion")
        return Quat(self.w / n, self.x / n, self.y / n, self.z / n)

    def conjugate(self) -> "Quat":
        return Quat(self.w, -self.x, -self.y, -self.z)

    def dot(self, o: "Quat") -> float:
        return self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z

    def rotate(self, v) -> np.ndarray:
        return self.matrix3() @ np.asarray(v, dtype=float)

    def matrix3(self) -> np.ndarray:
        w, x, y, z = self.w, self.x, self.y, self.z
        return np.array([
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ])

    def matrix4(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.matrix3()
        return m


def slerp(a: Quat, b: Quat, t: float) -> Quat:
    d = a.dot(b)
    if d < 0.0:  # shortest arc
        b = Quat(-b.w, -b.x, -b.y, -b.z)
        d = -d
    if d > 0.9995:
        q = Quat(*(ai + t * (bi - ai) for ai, bi in zip((a.w, a.x, a.y, a.z), (b.w, b.x, b.y, b.z))))
        return q.normalized()
    theta = math.acos(d)
    s = math.sin(theta)
    wa = math.sin((1 - t) * theta) / s
    wb = math.sin(t * theta) / s
    return Quat(wa * a.w + wb * b.w, wa * a.x + wb * b.x, wa * a.y + wb * b.y, wa * a.z + wb * b.z)


# -- curves and interpolation ---------------------------------------------------

@dataclass(frozen=True)
class BezierSegment:
    p0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray

    def __call__(self, t: float) -> np.ndarray:
        return bezier_eval(self, t)


def bezier_eval(seg: BezierSegment, t: float) -> np.ndarray:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"bezier parameter {t} outside [0, 1]")
    if t == 0.0:
        return np.array(seg.p0, dtype=float)
    if t == 1.0:
        return np.array(seg.p3, dtype=float)
    u = 1.0 - t
    return (u ** 3) * np.asarray(seg.p0) + 3 * u * u * t * np.asarray(seg.p1) \
        + 3 * u * t * t * np.asarray(seg.p2) + (t ** 3) * np.asarray(seg.p3)


def bezier_eval_many(ctrl: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Evaluate cubic segments in bulk. ``ctrl`` is ``(..., 4, D)``, ``t`` broadcasts against ``...``."""
    t = np.asarray(t, dtype=float)[..., None]
    u = 1.0 - t
    return (u ** 3) * ctrl[..., 0, :] + 3 * u * u * t * ctrl[..., 1, :] \
        + 3 * u * t * t * ctrl[..., 2, :] + (t ** 3) * ctrl[..., 3, :]


def lerp(a, b, t):
    return a + (b - a) * t


def clamp(x, lo, hi):
    return max(lo, min(hi, x))


def smoothstep(e0: float, e1: float, x: float) -> float:
    t = clamp((x - e0) / (e1 - e0), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def ease_cubic(t: float) -> float:
    """Cubic ease-in-out on [0, 1]."""
    t = clamp(t, 0.0, 1.0)
    return 4 * t ** 3 if t < 0.5 else 1 - (-2 * t + 2) ** 3 / 2


def distribute_points_sphere(n: int) -> list[np.ndarray]:
    """``n`` near-uniform unit vectors on a golden-angle spiral."""
    if n <= 0:
        raise ValueError("n must be positive")
    if n <= 2:
        return [np.array([0.0, 0.0, 1.0 - 2.0 * i]) for i in range(n)]
    pts = []
    for i in range(n):
        z = 1.0 - (2.0 * i + 1.0) / n
        r = math.sqrt(max(0.0, 1.0 - z * z))
        phi = i * GOLDEN_ANGLE
        pts.append(np.array([r * math.cos(phi), r * math.sin(phi), z]))
    return pts
