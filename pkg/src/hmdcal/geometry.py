"""Planes, rays and charts in the device frame.

Conventions used throughout the package:
  * +z points from the eye toward the optics and the world beyond.
  * All positions are in millimeters; directions are dimensionless.
  * A ChartedPlane carries an orthonormal 2D chart (origin, u_axis, v_axis)
    with normal = u_axis x v_axis. Base planes have normal +z and valid
    viewpoints sit strictly on their positive side.
  * Directions are charted with gnomonic (slope) coordinates relative to a
    plane's normal: s = (v.u/v.n, v.v/v.n). This is rational, smooth and
    exactly invertible on the open forward hemisphere, which keeps the
    polynomial models exact for straight-line optics.

Most operations accept either a single point/direction of shape (3,) or a
batch of shape (N, 3) and broadcast accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BackwardDirection, GrazingRay, OffPlane, WrongSide

ORTHO_TOL = 1e-12
GRAZE_TOL = 1e-6        # minimum |cos| between ray and plane normal
ON_PLANE_TOL = 1e-6     # mm


def vec(*components: float) -> np.ndarray:
    """Small literal helper: vec(1, 2, 3) -> float64 array."""
    return np.array(components, dtype=np.float64)


def normalize(v: np.ndarray) -> np.ndarray:
    """Return v scaled to unit length (last axis). Raises on zero vectors."""
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n == 0.0):
        raise ValueError("cannot normalize a zero vector")
    return v / n


def angle_between(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unsigned angle in radians between unit vectors, batched on last axis."""
    d = np.clip(np.sum(np.asarray(a) * np.asarray(b), axis=-1), -1.0, 1.0)
    return np.arccos(d)


@dataclass(frozen=True)
class Ray:
    """A 3D ray; direction is normalized on construction."""

    origin: np.ndarray
    dir: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=np.float64).reshape(3).copy()
        d = normalize(np.asarray(self.dir, dtype=np.float64).reshape(3))
        o.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "dir", d)

    def at(self, t: float) -> np.ndarray:
        return self.origin + t * self.dir


@dataclass(frozen=True)
class ChartedPlane:
    """Oriented plane with an orthonormal right-handed 2D chart.

    normal is derived as u_axis x v_axis; the axes must be unit and
    mutually orthogonal within 1e-12.
    """

    origin: np.ndarray
    u_axis: np.ndarray
    v_axis: np.ndarray
    normal: np.ndarray = field(init=False)

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=np.float64).reshape(3).copy()
        u = np.asarray(self.u_axis, dtype=np.float64).reshape(3).copy()
        v = np.asarray(self.v_axis, dtype=np.float64).reshape(3).copy()
        if abs(np.linalg.norm(u) - 1.0) > ORTHO_TOL or abs(np.linalg.norm(v) - 1.0) > ORTHO_TOL:
            raise ValueError("chart axes must be unit length")
        if abs(float(u @ v)) > ORTHO_TOL:
            raise ValueError("chart axes must be orthogonal")
        n = np.cross(u, v)
        for a in (o, u, v, n):
            a.flags.writeable = False
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "u_axis", u)
        object.__setattr__(self, "v_axis", v)
        object.__setattr__(self, "normal", n)

    @classmethod
    def at_z(cls, z: float) -> "ChartedPlane":
        """Axis-aligned plane z = const with chart axes +x, +y (normal +z)."""
        return cls(vec(0.0, 0.0, z), vec(1.0, 0.0, 0.0), vec(0.0, 1.0, 0.0))

    # -- point chart ---------------------------------------------------------

    def to_world(self, q: np.ndarray) -> np.ndarray:
        """Chart coordinates (..., 2) -> world point origin + q0*u + q1*v."""
        q = np.asarray(q, dtype=np.float64)
        return self.origin + q[..., 0:1] * self.u_axis + q[..., 1:2] * self.v_axis

    def to_chart(self, p: np.ndarray) -> np.ndarray:
        """Inverse of to_world for points on the plane (within 1e-6 mm)."""
        p = np.asarray(p, dtype=np.float64)
        d = p - self.origin
        h = d @ self.normal
        if np.any(np.abs(h) >= ON_PLANE_TOL):
            raise OffPlane(f"point is {np.max(np.abs(h)):g} mm off the plane")
        return np.stack([d @ self.u_axis, d @ self.v_axis], axis=-1)

    def height(self, p: np.ndarray) -> np.ndarray:
        """Signed distance of p from the plane along +normal."""
        return (np.asarray(p, dtype=np.float64) - self.origin) @ self.normal

    # -- backward ray/plane intersection --------------------------------------

    def intersect_backward(self, p_view: np.ndarray, v: np.ndarray) -> tuple[float, np.ndarray]:
        """Walk backward from p_view against direction v onto the plane.

        Returns (t, q) with t >= 0 and p_view - t*v = to_world(q); this is
        the closed-form minimizer of dist(p_view - t*v, plane) over t >= 0.

        Raises GrazingRay when |v.normal| <= 1e-6 and WrongSide when the
        constraint t >= 0 admits no intersection.
        """
        p_view = np.asarray(p_view, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        cosn = float(v @ self.normal)
        if abs(cosn) <= GRAZE_TOL:
            raise GrazingRay(f"|v.normal| = {abs(cosn):g} <= {GRAZE_TOL:g}")
        h = float(self.height(p_view))
        t = h / cosn
        if t < 0.0:
            raise WrongSide("no backward intersection with t >= 0")
        return t, self.to_chart(p_view - t * v)

    def backproject_batch(
        self, p_view: np.ndarray, v: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized intersect_backward returning a validity mask.

        Returns (t (N,), q (N, 2), valid (N,)); entries with a grazing
        direction or t < 0 are masked False instead of raising.
        """
        p_view = np.atleast_2d(np.asarray(p_view, dtype=np.float64))
        v = np.atleast_2d(np.asarray(v, dtype=np.float64))
        cosn = v @ self.normal
        h = (p_view - self.origin) @ self.normal
        safe = np.abs(cosn) > GRAZE_TOL
        t = np.where(safe, h / np.where(safe, cosn, 1.0), np.nan)
        valid = safe & (t >= 0.0)
        foot = p_view - t[:, None] * v
        d = foot - self.origin
        q = np.stack([d @ self.u_axis, d @ self.v_axis], axis=-1)
        return t, q, valid

    # -- direction chart -------------------------------------------------------

    def dir_to_chart(self, v: np.ndarray) -> np.ndarray:
        """Gnomonic (slope) chart of a forward-hemisphere direction.

        s = (v.u/(v.n), v.v/(v.n)); requires v.normal > 1e-6.
        """
        v = np.asarray(v, dtype=np.float64)
        cosn = v @ self.normal
        if np.any(cosn <= GRAZE_TOL):
            raise BackwardDirection("direction outside the forward hemisphere")
        return np.stack([(v @ self.u_axis) / cosn, (v @ self.v_axis) / cosn], axis=-1)

    def chart_to_dir(self, s: np.ndarray) -> np.ndarray:
        """Exact inverse of dir_to_chart: normalize(u*s0 + v*s1 + n)."""
        s = np.asarray(s, dtype=np.float64)
        raw = s[..., 0:1] * self.u_axis + s[..., 1:2] * self.v_axis + self.normal
        return normalize(raw)
