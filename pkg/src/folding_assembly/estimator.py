"""Contact point recovery from the wrench measured at the static surface hand.

The sensor sees ``tau2 = r2 x f2``. The magnitude of ``r2`` comes from the
normal force component, ``|r2| = |tau2| / |f2 . n|``, and the direction from
the tangent-plane part of the minimum-norm solution ``(f2 x tau2) / |f2|^2``.
The magnitude is exact when the tangential force is collinear with ``r2``
(planar task); out-of-plane friction makes it read long.

Sign convention for the rod angle: ``theta_c > 0`` when the rod vector
``r1 = p_c - p1`` has a positive component along the outward normal ``n``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .spatial_math import Pose, Wrench, cross, require_unit, _vec

F_MIN = 0.25


class WrenchFilter:
    """Moving average over the last ``window`` wrench samples.

    During warm-up the mean is over the samples seen so far.
    """

    def __init__(self, window: int = 5):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self.window = window
        self._buf: deque = deque(maxlen=window)

    def __len__(self) -> int:
        return len(self._buf)

    def step(self, sample: Wrench) -> Wrench:
        a = sample.as_array()
        if not np.all(np.isfinite(a)):
            raise ValueError("non-finite wrench sample")
        self._buf.append(a)
        return Wrench.from_array(sum(self._buf) / len(self._buf))

    def mean(self) -> Wrench:
        if not self._buf:
            return Wrench()
        return Wrench.from_array(sum(self._buf) / len(self._buf))


def filter_step(filt: WrenchFilter, sample: Wrench) -> Wrench:
    return filt.step(sample)


def estimate_r2(w2: Wrench, n, f_min: float = F_MIN) -> Optional[np.ndarray]:
    """Lever from the surface hand to the contact, or ``None`` when unobservable."""
    n = require_unit(n)
    f, tau = _vec(w2.force), _vec(w2.torque)
    fn = abs(f @ n)
    if fn < f_min:
        return None
    mag = math.sqrt(tau @ tau) / fn
    if mag == 0.0:
        return np.zeros(3)
    d = cross(f, tau) / (f @ f)
    d = d - (n @ d) * n
    dn = math.sqrt(d @ d)
    if dn < 1e-9 * mag:
        return None
    return d * (mag / dn)


def estimate_theta(r1, r2, n) -> float:
    r1, r2, n = _vec(r1), _vec(r2), _vec(n)
    r2n = math.sqrt(r2 @ r2)
    if r2n < 1e-9:
        raise ValueError("rod angle undefined for a zero-length r2")
    return math.atan2((n @ r1) * r2n, r2 @ r1)


@dataclass(frozen=True)
class ContactEstimate:
    r2: np.ndarray = field(default_factory=lambda: np.zeros(3))
    p_c: np.ndarray = field(default_factory=lambda: np.zeros(3))
    theta_c: float = 0.0
    valid: bool = False


def estimate_contact(
    w2_filtered: Wrench,
    pose2: Pose,
    n,
    r1_hint,
    previous: Optional[ContactEstimate] = None,
    f_min: float = F_MIN,
) -> ContactEstimate:
    """Full contact estimate; holds ``previous`` when the wrench is unobservable.

    ``r1_hint`` is the rod vector from the rod hand to the contact, known from
    proprioception under a rigid grasp. Only its direction relative to the
    surface enters ``theta_c``.
    """
    prev = previous if previous is not None else ContactEstimate()
    r2 = estimate_r2(w2_filtered, n, f_min)
    if r2 is None:
        return replace(prev, valid=False)
    p_c = pose2.position + r2
    if r2 @ r2 < 1e-18:
        theta = prev.theta_c
    else:
        theta = estimate_theta(r1_hint, r2, n)
    return ContactEstimate(r2=r2, p_c=p_c, theta_c=theta, valid=True)
