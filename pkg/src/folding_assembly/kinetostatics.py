"""Virtual prismatic-revolute joint at the contact point.

For each (contact mode, grasp mode, piece) case this module gives the velocity
constraint rows ``A`` (allowed twists satisfy ``A @ [v; w] = 0``) and the
reaction wrench basis ``W`` (reaction wrenches are ``W @ lam``). The two are
reciprocal: every allowed twist does zero power against every reaction wrench.

``r`` is always the lever from the grasp point to the contact point,
``r = p_c - p_j``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .spatial_math import Wrench, cross, require_unit, skew, _vec

DEGENERATE_R = 1e-9


class GraspMode(enum.Enum):
    RIGID = "rigid"
    NON_RIGID = "non_rigid"


class ContactMode(enum.Enum):
    SLIDING = "sliding"
    FIXED = "fixed"
    BROKEN = "broken"


class PieceSide(enum.Enum):
    ROD = "rod"
    SURFACE = "surface"


class DegenerateGeometryError(ValueError):
    pass


class UnsupportedCaseError(ValueError):
    pass


@dataclass(frozen=True)
class ConstraintRows:
    A: np.ndarray  # k x 6, unit rows

    @property
    def k(self) -> int:
        return self.A.shape[0]

    def residual(self, twist) -> np.ndarray:
        return self.A @ np.asarray(twist, dtype=float)


@dataclass(frozen=True)
class ReactionWrenchBasis:
    W: np.ndarray  # 6 x k

    @property
    def k(self) -> int:
        return self.W.shape[1]

    def wrench(self, lam) -> Wrench:
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if lam.shape != (self.k,):
            raise ValueError(f"expected {self.k} multipliers, got shape {lam.shape}")
        return Wrench.from_array(self.W @ lam)


def _check_case(mode: ContactMode, grasp: GraspMode, side: PieceSide, n, r):
    if side is PieceSide.SURFACE and grasp is GraspMode.NON_RIGID and mode is not ContactMode.BROKEN:
        raise UnsupportedCaseError("only a rigid grasp is modelled for the surface piece")
    n = require_unit(n)
    r = _vec(r)
    if mode is ContactMode.FIXED and grasp is GraspMode.NON_RIGID:
        if np.linalg.norm(r) < DEGENERATE_R:
            raise DegenerateGeometryError("fixed contact with non-rigid grasp needs a nonzero lever r")
    return n, r


def constraint_rows(mode: ContactMode, grasp: GraspMode, side: PieceSide, n, r) -> ConstraintRows:
    n, r = _check_case(mode, grasp, side, n, r)
    if mode is ContactMode.BROKEN:
        A = np.zeros((0, 6))
    elif mode is ContactMode.SLIDING and grasp is GraspMode.NON_RIGID:
        A = np.concatenate((n, np.zeros(3)))[None, :]
    elif mode is ContactMode.SLIDING:
        # n^T v_c = 0 with v_c = v - S(r) w
        A = np.concatenate((n, -n @ skew(r)))[None, :]
    elif grasp is GraspMode.NON_RIGID:
        A = np.concatenate((r / np.linalg.norm(r), np.zeros(3)))[None, :]
    else:
        # v_c = v - S(r) w = 0
        A = np.hstack((np.eye(3), -skew(r)))
    if A.shape[0]:
        A = A / np.linalg.norm(A, axis=1, keepdims=True)
    return ConstraintRows(A)


def reaction_wrench_basis(mode: ContactMode, grasp: GraspMode, side: PieceSide, n, r) -> ReactionWrenchBasis:
    """Unnormalized reaction wrench directions; ``lam`` is in newtons."""
    n, r = _check_case(mode, grasp, side, n, r)
    if mode is ContactMode.BROKEN:
        W = np.zeros((6, 0))
    elif mode is ContactMode.SLIDING and grasp is GraspMode.NON_RIGID:
        W = np.concatenate((n, np.zeros(3)))[:, None]
    elif mode is ContactMode.SLIDING:
        W = np.concatenate((n, cross(r, n)))[:, None]
    elif grasp is GraspMode.NON_RIGID:
        W = np.concatenate((r / np.linalg.norm(r), np.zeros(3)))[:, None]
    else:
        # force lam at the contact, torque r x lam about the grasp point
        W = np.vstack((np.eye(3), skew(r)))
    return ReactionWrenchBasis(W)


IMPLEMENTED_CASES = (
    (ContactMode.SLIDING, GraspMode.NON_RIGID, PieceSide.ROD),
    (ContactMode.SLIDING, GraspMode.RIGID, PieceSide.ROD),
    (ContactMode.FIXED, GraspMode.NON_RIGID, PieceSide.ROD),
    (ContactMode.FIXED, GraspMode.RIGID, PieceSide.ROD),
    (ContactMode.SLIDING, GraspMode.RIGID, PieceSide.SURFACE),
    (ContactMode.FIXED, GraspMode.RIGID, PieceSide.SURFACE),
)


def contact_point_velocity(v1, w1, p_c, p1) -> np.ndarray:
    """Velocity of the contact point carried rigidly by the rod hand."""
    v1, w1, p_c, p1 = _vec(v1), _vec(w1), _vec(p_c), _vec(p1)
    return v1 + cross(w1, p_c - p1)
