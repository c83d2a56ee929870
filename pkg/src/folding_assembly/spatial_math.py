"""Frames, rotations and the skew operator.

Twists are stacked ``[linear; angular]`` and wrenches ``[force; torque]``
everywhere in the package. Rotation matrices act on column vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

UNIT_TOL = 1e-9


def _vec(x) -> np.ndarray:
    a = np.asarray(x, dtype=float).reshape(3)
    # a non-finite component (or overflow) makes the sum non-finite
    if not math.isfinite(a[0] + a[1] + a[2]):
        raise ValueError(f"non-finite vector: {a}")
    return a


def skew(w) -> np.ndarray:
    """Skew-symmetric matrix with ``skew(w) @ x == cross(w, x)``."""
    wx, wy, wz = _vec(w)
    return np.array([[0.0, -wz, wy], [wz, 0.0, -wx], [-wy, wx, 0.0]])


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # np.cross is slow on 3-vectors; the simulator calls this per step
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def require_unit(n, name: str = "n") -> np.ndarray:
    n = _vec(n)
    if abs(math.sqrt(n @ n) - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must be a unit vector, got norm {np.linalg.norm(n)!r}")
    return n


def orthonormalize(R: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on the first two columns; third column closes the frame."""
    x = R[:, 0] / math.sqrt(R[:, 0] @ R[:, 0])
    y = R[:, 1] - (x @ R[:, 1]) * x
    y = y / math.sqrt(y @ y)
    z = cross(x, y)
    return np.array((x, y, z)).T


def rodrigues(phi) -> np.ndarray:
    """``exp(skew(phi))`` in closed form."""
    phi = _vec(phi)
    angle = math.sqrt(phi @ phi)
    if angle < 1e-12:
        # second-order series keeps the result smooth near zero
        K = skew(phi)
        return np.eye(3) + K + 0.5 * K @ K
    K = skew(phi / angle)
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


def integrate_rotation(R: np.ndarray, w, dt: float) -> np.ndarray:
    """Advance ``R`` under constant spatial angular velocity ``w`` for ``dt``.

    Solves ``Rdot = skew(w) R`` with the exponential map, then re-orthonormalizes
    so the result stays on SO(3) over long chains of steps.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    w = _vec(w)
    return orthonormalize(rodrigues(w * dt) @ np.asarray(R, dtype=float))


def project_tangent(x, n) -> np.ndarray:
    """Component of ``x`` orthogonal to the unit normal ``n``."""
    x = _vec(x)
    n = require_unit(n)
    return x - (n @ x) * n


def rotation_defect(R: np.ndarray) -> float:
    """Largest elementwise deviation of ``R.T @ R`` from identity, plus det error."""
    R = np.asarray(R, dtype=float)
    return max(float(np.max(np.abs(R.T @ R - np.eye(3)))), abs(float(np.linalg.det(R)) - 1.0))


@dataclass(frozen=True)
class Pose:
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def transform(self, local) -> np.ndarray:
        """Map a point from the frame into world coordinates."""
        return self.position + self.orientation @ _vec(local)


@dataclass(frozen=True)
class Twist:
    linear: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angular: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def as_array(self) -> np.ndarray:
        return np.concatenate((self.linear, self.angular))


@dataclass(frozen=True)
class Wrench:
    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    torque: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def as_array(self) -> np.ndarray:
        return np.concatenate((self.force, self.torque))

    @classmethod
    def from_array(cls, a) -> "Wrench":
        a = np.asarray(a, dtype=float)
        return cls(a[:3].copy(), a[3:].copy())


ZERO_TWIST = Twist()
