"""Quasi-static ground-truth world for the folding task.

Hand 1 is a velocity-controlled frame rigidly holding a rod whose tip touches a
planar surface piece held still by hand 2. Contact is a penalty spring-damper
along the surface normal with regularized Coulomb friction. There is no inertia
and no gravity: the hand follows its commanded twist and contact forces only
show up in the wrench sensed at hand 2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .controller import (
    CommandTwist,
    ControllerGains,
    ControllerState,
    Phase,
    ScenarioRefs,
    WallRule,
    controller_step,
    force_error,
)
from .estimator import ContactEstimate, WrenchFilter, estimate_contact, estimate_theta
from .kinetostatics import ContactMode
from .spatial_math import Pose, Twist, Wrench, cross, integrate_rotation, require_unit

# the stick/slip decision only looks at tangential tip speed
SLIP = ContactMode.SLIDING
STICK = ContactMode.FIXED


class ContactInstabilityError(RuntimeError):
    """Penetration grew past the guard; contact stiffness is too high for the loop."""


@dataclass(frozen=True)
class RodModel:
    length: float = 0.1

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"rod length must be > 0, got {self.length}")

    @property
    def tip_offset(self) -> np.ndarray:
        # rod runs along the hand-1 x axis
        return np.array([self.length, 0.0, 0.0])


@dataclass(frozen=True)
class SurfaceModel:
    anchor: np.ndarray = field(default_factory=lambda: np.zeros(3))
    n: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    t_hat: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    wall_offset: float = 0.235
    extent: float = 0.3

    def __post_init__(self):
        require_unit(self.n, "surface normal")
        require_unit(self.t_hat, "surface tangent")
        if abs(self.n @ self.t_hat) > 1e-9:
            raise ValueError("surface tangent must be orthogonal to the normal")

    @property
    def wall_point(self) -> np.ndarray:
        return self.anchor + self.wall_offset * self.t_hat


@dataclass(frozen=True)
class ContactParams:
    k_n: float = 5.0e3
    c_n: float = 10.0
    mu: float = 0.3
    v_stick: float = 1e-5
    eps_sep: float = 1e-4
    max_penetration: float = 5e-3

    def __post_init__(self):
        if not self.k_n > 0:
            raise ValueError(f"k_n must be > 0, got {self.k_n}")
        if self.c_n < 0 or self.mu < 0:
            raise ValueError("c_n and mu must be >= 0")


@dataclass(frozen=True)
class SensorModel:
    sigma_f: float = 0.1
    sigma_tau: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.sigma_f < 0 or self.sigma_tau < 0:
            raise ValueError("sensor noise must be >= 0")


@dataclass(frozen=True)
class World:
    rod: RodModel = field(default_factory=RodModel)
    surface: SurfaceModel = field(default_factory=SurfaceModel)
    contact: ContactParams = field(default_factory=ContactParams)
    lag_tau: float = 0.0  # first-order lag of hand 1 on its twist command, 0 = ideal


@dataclass(frozen=True)
class SimState:
    pose1: Pose
    pose2: Pose
    p_c_true: np.ndarray
    f_c: np.ndarray  # force of the rod on the surface piece
    mode: ContactMode
    penetration: float
    t: float = 0.0
    v_c_true: np.ndarray = field(default_factory=lambda: np.zeros(3))
    twist1: Twist = field(default_factory=Twist)  # twist actually executed by hand 1


def rod_pose_at_contact(rod: RodModel, surface: SurfaceModel, s0: float, theta0: float, depth: float = 0.0) -> Pose:
    """Hand-1 pose putting the rod tip at ``anchor + s0 t_hat - depth n`` with rod angle ``theta0``."""
    n, t = surface.n, surface.t_hat
    tip = surface.anchor + s0 * t - depth * n
    r1_dir = math.cos(theta0) * t + math.sin(theta0) * n
    y = cross(n, t)
    z = cross(r1_dir, y)
    R = np.column_stack((r1_dir, y, z))
    return Pose(tip - rod.length * r1_dir, R)


def initial_state(world: World, pose1: Pose, pose2: Pose) -> SimState:
    tip = pose1.transform(world.rod.tip_offset)
    return _resolve(world, pose1, pose2, tip, np.zeros(3), None, 0.0, Twist())


def _resolve(world, pose1, pose2, tip, v_tip, prev_mode, t, twist1) -> SimState:
    surf, cp = world.surface, world.contact
    n = surf.n
    height = float((tip - surf.anchor) @ n)
    depth = -height
    if depth > cp.max_penetration:
        raise ContactInstabilityError(
            f"penetration {depth * 1e3:.3f} mm exceeds {cp.max_penetration * 1e3:.3f} mm at t={t:.3f}s; "
            "lower contact.k_n or the force gain"
        )
    v_n = float(v_tip @ n)
    v_t = v_tip - v_n * n
    f_n = max(0.0, cp.k_n * depth - cp.c_n * v_n) if depth > 0 else 0.0
    speed = math.sqrt(v_t @ v_t)
    if f_n > 0.0:
        if speed >= cp.v_stick:
            mode = SLIP
            f_t = (-cp.mu * f_n / speed) * v_t
        else:
            mode = STICK
            f_t = (-cp.mu * f_n / cp.v_stick) * v_t
    else:
        f_t = np.zeros(3)
        if height > cp.eps_sep:
            mode = ContactMode.BROKEN
        else:
            # grazing: keep the previous mode so the flag does not chatter
            mode = STICK if prev_mode is None else prev_mode
    force_on_rod = f_n * n + f_t
    return SimState(
        pose1=pose1,
        pose2=pose2,
        p_c_true=tip - height * n,
        f_c=-force_on_rod,
        mode=mode,
        penetration=depth,
        t=t,
        v_c_true=v_t,
        twist1=twist1,
    )


def physics_step(state: SimState, command, world: World, dt: float) -> SimState:
    """Advance one physics step with hand 1 executing ``command.twist1``."""
    cmd = command.twist1
    if world.lag_tau > 0.0:
        a = 1.0 - math.exp(-dt / world.lag_tau)
        tw = state.twist1
        twist1 = Twist(tw.linear + a * (cmd.linear - tw.linear), tw.angular + a * (cmd.angular - tw.angular))
    else:
        twist1 = cmd
    v, w = twist1.linear, twist1.angular
    p1 = state.pose1.position + v * dt
    R1 = state.pose1.orientation
    if w[0] or w[1] or w[2]:
        R1 = integrate_rotation(R1, w, dt)
    pose1 = Pose(p1, R1)
    lever = R1 @ world.rod.tip_offset
    tip = p1 + lever
    v_tip = v + cross(w, lever)
    return _resolve(world, pose1, state.pose2, tip, v_tip, state.mode, state.t + dt, twist1)


class WrenchSensor:
    """Force/torque sensor at hand 2, reporting in world axes about ``p2``.

    One seeded Gaussian stream per instance; same seed and same trajectory give
    bitwise identical samples.
    """

    def __init__(self, model: SensorModel):
        self.model = model
        self._rng = np.random.default_rng(model.seed)

    def sample(self, state: SimState) -> Wrench:
        f = state.f_c.copy()
        tau = cross(state.p_c_true - state.pose2.position, f)
        m = self.model
        if m.sigma_f > 0 or m.sigma_tau > 0:
            z = self._rng.standard_normal(6)
            f = f + m.sigma_f * z[:3]
            tau = tau + m.sigma_tau * z[3:]
        return Wrench(f, tau)


def sense_wrench(state: SimState, sensor: WrenchSensor) -> Wrench:
    return sensor.sample(state)


def normal_force(state: SimState, n) -> float:
    """Magnitude of the surface reaction on the rod along ``n`` (>= 0 in contact)."""
    return -float(state.f_c @ n)


# --------------------------------------------------------------------------
# closed loop


@dataclass(frozen=True)
class TickRecord:
    t: float
    p1: np.ndarray
    theta_true: float
    theta_est: float
    pc_true: np.ndarray
    pc_est: np.ndarray
    fn_raw: float
    fn_filt: float
    fe: float
    v1: np.ndarray
    w1: np.ndarray
    mode: ContactMode
    phase: Phase
    valid: bool
    r2_true: float
    r2_est: float
    vc_true: np.ndarray


class RunStatus(enum.Enum):
    DONE = "Done"
    FAULT = "Fault"
    TIMED_OUT = "TimedOut"


@dataclass
class RunLog:
    records: list = field(default_factory=list)
    status: RunStatus = RunStatus.TIMED_OUT
    phase_times: dict = field(default_factory=dict)
    config: object = None

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


def controller_refs(cfg) -> ScenarioRefs:
    """Geometry as the controller sees it, including any configured normal tilt."""
    g, c = cfg.geometry, cfg.controller
    n = np.array(g.normal, dtype=float)
    t = np.array(g.tangent, dtype=float)
    a = math.radians(c.normal_tilt_deg)
    n_cfg = math.cos(a) * n + math.sin(a) * t
    t_cfg = t - (t @ n_cfg) * n_cfg
    t_cfg /= np.linalg.norm(t_cfg)
    return ScenarioRefs(
        n=n_cfg,
        t_hat=t_cfg,
        rot_axis=c.rot_sign * cross(t_cfg, n_cfg),
        wall_point=np.array(g.p2, dtype=float) + g.wall_offset * t,
        wall_rule=WallRule(c.wall_rule),
        delta_wall=c.delta_wall,
        wall_force=c.wall_force,
        wall_force_ticks=c.wall_force_ticks,
        theta_target=cfg.gains.theta_target,
        theta_tol=cfg.gains.theta_tol,
        n_hold=c.n_hold,
    )


def build_world(cfg) -> World:
    g, k = cfg.geometry, cfg.contact
    surface = SurfaceModel(
        anchor=np.array(g.p2, dtype=float),
        n=np.array(g.normal, dtype=float),
        t_hat=np.array(g.tangent, dtype=float),
        wall_offset=g.wall_offset,
        extent=g.extent,
    )
    contact = ContactParams(k.k_n, k.c_n, k.mu, k.v_stick, k.eps_sep, k.max_penetration)
    return World(RodModel(g.rod_length), surface, contact, cfg.run.lag_tau)


def _theta_true(state: SimState, r1: np.ndarray, n: np.ndarray) -> float:
    r2 = state.p_c_true - state.pose2.position
    if r2 @ r2 < 1e-18:
        return float("nan")
    return estimate_theta(r1, r2, n)


def run_loop(cfg) -> RunLog:
    """Run one scenario: physics at ``rates.physics_hz``, control at ``rates.control_hz``.

    The command is held between control ticks. The sensor is sampled and
    filtered at the physics rate; the controller reads the latest filter
    output. One record is logged per control tick.
    """
    world = build_world(cfg)
    refs = controller_refs(cfg)
    g = cfg.geometry
    gains = ControllerGains(cfg.gains.K_f, cfg.gains.f_d, cfg.gains.v_d_mag, cfg.gains.omega_d_mag)
    dt = 1.0 / cfg.rates.physics_hz
    sub = cfg.rates.physics_hz // cfg.rates.control_hz
    steps = int(round(cfg.run.duration * cfg.rates.physics_hz))

    pose2 = Pose(world.surface.anchor.copy(), np.eye(3))
    pose1 = rod_pose_at_contact(world.rod, world.surface, g.contact_s0, g.theta0)
    state = initial_state(world, pose1, pose2)
    sensor = WrenchSensor(SensorModel(cfg.sensor.sigma_f, cfg.sensor.sigma_tau, cfg.sensor.seed))
    filt = WrenchFilter(cfg.sensor.filter_window)
    n_true = world.surface.n
    n_cfg = refs.n
    tip = world.rod.tip_offset

    # the task starts from a known placement, so the held estimate is seeded with it
    r1 = pose1.orientation @ tip
    est = ContactEstimate(
        r2=state.p_c_true - pose2.position,
        p_c=state.p_c_true.copy(),
        theta_c=_theta_true(state, r1, n_true),
        valid=False,
    )
    ctrl = ControllerState()
    cmd = CommandTwist()
    log = RunLog(config=cfg)
    w_raw = sensor.sample(state)
    w_filt = filt.step(w_raw)

    for k in range(steps):
        if k % sub == 0:
            t_k = k / cfg.rates.physics_hz
            r1 = state.pose1.orientation @ tip
            est = estimate_contact(w_filt, pose2, n_cfg, r1, previous=est, f_min=cfg.sensor.f_min)
            prev_phase = ctrl.phase
            cmd, ctrl = controller_step(est, w_filt, state.pose1, ctrl, gains, refs)
            if ctrl.phase is not prev_phase:
                log.phase_times[ctrl.phase.name] = t_k
            log.records.append(
                TickRecord(
                    t=t_k,
                    p1=state.pose1.position.copy(),
                    theta_true=_theta_true(state, r1, n_true),
                    theta_est=est.theta_c,
                    pc_true=state.p_c_true.copy(),
                    pc_est=est.p_c.copy(),
                    fn_raw=abs(float(w_raw.force @ n_cfg)),
                    fn_filt=abs(float(w_filt.force @ n_cfg)),
                    fe=force_error(w_filt, n_cfg, gains.f_d),
                    v1=cmd.twist1.linear.copy(),
                    w1=cmd.twist1.angular.copy(),
                    mode=state.mode,
                    phase=ctrl.phase,
                    valid=est.valid,
                    r2_true=float(np.linalg.norm(state.p_c_true - pose2.position)),
                    r2_est=float(np.linalg.norm(est.r2)),
                    vc_true=state.v_c_true.copy(),
                )
            )
            if ctrl.phase is Phase.DONE:
                log.status = RunStatus.FAULT if ctrl.fault else RunStatus.DONE
                break
        state = physics_step(state, cmd, world, dt)
        w_raw = sensor.sample(state)
        w_filt = filt.step(w_raw)
    return log
