"""Master-slave folding controller.

The rod hand is commanded so the contact point moves with a reference velocity
(feedback linearization of ``v_c = v1 + w1 x (p_c - p1)``) while a force loop
along the surface normal keeps the contact loaded. The surface hand is a static
fixture and always receives a zero twist.

Signs: ``n`` is the outward surface normal (towards the rod side) and the force
error is ``f_e = f_d - |f2 . n|``, so a force deficit gives ``v_f = -K_f f_e n``
pointing into the surface.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .estimator import ContactEstimate
from .spatial_math import ZERO_TWIST, Pose, Twist, Wrench, cross, require_unit, _vec


class Phase(enum.IntEnum):
    SLIDE = 0
    ROTATE_ONLY = 1
    DONE = 2


class WallRule(enum.Enum):
    GEOMETRIC = "geometric"
    FORCE = "force"


@dataclass(frozen=True)
class ControllerGains:
    K_f: float = 0.01
    f_d: float = 5.0
    v_d_mag: float = 0.015
    omega_d_mag: float = 0.05

    def __post_init__(self):
        if self.K_f < 0:
            raise ValueError(f"K_f must be >= 0, got {self.K_f}")
        if not self.f_d > 0:
            raise ValueError(f"f_d must be > 0, got {self.f_d}")


@dataclass(frozen=True)
class ScenarioRefs:
    """Task geometry as the controller believes it to be."""

    n: np.ndarray
    t_hat: np.ndarray
    rot_axis: np.ndarray
    wall_point: np.ndarray
    wall_rule: WallRule = WallRule.GEOMETRIC
    delta_wall: float = 0.005
    wall_force: float = 2.0
    wall_force_ticks: int = 10
    theta_target: float = 0.0
    theta_tol: float = 0.02
    n_hold: int = 50


@dataclass(frozen=True)
class ControllerState:
    phase: Phase = Phase.SLIDE
    invalid_ticks: int = 0
    wall_ticks: int = 0
    fault: bool = False
    theta_err_sign: int = 0


@dataclass(frozen=True)
class CommandTwist:
    twist1: Twist = field(default_factory=Twist)
    twist2: Twist = field(default_factory=Twist)


def force_error(w2_filtered: Wrench, n, f_d: float) -> float:
    n = require_unit(n)
    return f_d - abs(_vec(w2_filtered.force) @ n)


def velocity_reference(v_d, f_e: float, K_f: float, n, tol: float = 1e-6) -> np.ndarray:
    v_d = _vec(v_d)
    n = require_unit(n)
    if abs(v_d @ n) > tol:
        raise ValueError(f"desired contact velocity must be tangential, normal part {v_d @ n:.3g}")
    return v_d - K_f * f_e * n


def feedback_linearize(v_ref, w_ref, p_c_est, p1) -> CommandTwist:
    v_ref, w_ref = _vec(v_ref), _vec(w_ref)
    v1 = v_ref - cross(w_ref, _vec(p_c_est) - _vec(p1))
    return CommandTwist(Twist(v1, w_ref.copy()), ZERO_TWIST)


def _wall_reached(estimate: ContactEstimate, w2: Wrench, state: ControllerState, refs: ScenarioRefs):
    if refs.wall_rule is WallRule.GEOMETRIC:
        gap = (refs.wall_point - estimate.p_c) @ refs.t_hat
        return gap <= refs.delta_wall, 0
    f = _vec(w2.force)
    f_tan = f - (f @ refs.n) * refs.n
    ticks = state.wall_ticks + 1 if math.sqrt(f_tan @ f_tan) > refs.wall_force else 0
    return ticks >= refs.wall_force_ticks, ticks


def controller_step(
    estimate: ContactEstimate,
    w2_filtered: Wrench,
    pose1: Pose,
    state: ControllerState,
    gains: ControllerGains,
    refs: ScenarioRefs,
) -> tuple[CommandTwist, ControllerState]:
    """One 100 Hz control tick. Returns the command and the advanced state.

    ``estimate`` is expected to already carry the held value when the current
    wrench was unobservable; its ``valid`` flag only feeds the fault counter.
    """
    if state.phase is Phase.DONE:
        return CommandTwist(), state

    invalid = 0 if estimate.valid else state.invalid_ticks + 1
    if invalid >= refs.n_hold:
        return CommandTwist(), replace(state, phase=Phase.DONE, invalid_ticks=invalid, fault=True)
    state = replace(state, invalid_ticks=invalid)

    if state.phase is Phase.SLIDE:
        reached, ticks = _wall_reached(estimate, w2_filtered, state, refs)
        state = replace(state, wall_ticks=ticks)
        if reached:
            state = replace(state, phase=Phase.ROTATE_ONLY)

    if state.phase is Phase.ROTATE_ONLY:
        err = refs.theta_target - estimate.theta_c
        sign = int(np.sign(err))
        crossed = state.theta_err_sign != 0 and sign != 0 and sign != state.theta_err_sign
        if abs(err) <= refs.theta_tol or crossed:
            return CommandTwist(), replace(state, phase=Phase.DONE)
        state = replace(state, theta_err_sign=sign)

    v_d = refs.t_hat * gains.v_d_mag if state.phase is Phase.SLIDE else np.zeros(3)
    w_d = refs.rot_axis * gains.omega_d_mag
    f_e = force_error(w2_filtered, refs.n, gains.f_d)
    v_ref = velocity_reference(v_d, f_e, gains.K_f, refs.n)
    return feedback_linearize(v_ref, w_d, estimate.p_c, pose1.position), state
