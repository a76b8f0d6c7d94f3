"""Closed-loop integration of formation controllers.

The state is the stacked node configuration x = vec(p); the vector field is
the controller's node velocity u(p).  Integration is either adaptive
(scipy's RK45, stepped manually so termination can be checked per accepted
step) or a fixed-step classical RK4.  A run ends in one of four ways:

* ``converged``           edge error dropped below ``tol_edge``;
* ``limit-cycle-suspect`` the edge error has leveled off over the trailing
                          window while the nodes keep moving -- the signature
                          of convergence to a rigidly rotating formation
                          with the wrong shape;
* ``horizon``             reached t_max;
* ``aborted``             the controller hit a rank-deficient configuration
                          (only the minimum-norm controller can).

Samples are taken every ``sample_every`` accepted steps (plus the initial
and final states), so CSV output is deterministic for a given run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import RK45, cumulative_trapezoid

from rigidform.controllers import ControllerSpec, evaluate_field
from rigidform.graphs import Configuration
from rigidform.rigidity import RankDeficiencyError, congruence_check, distance_map

TERMINATIONS = ("converged", "limit-cycle-suspect", "horizon", "aborted")


@dataclass(frozen=True)
class IntegratorConfig:
    """Numerical integration switches.

    ``dt`` is the fixed RK4 step; the adaptive method ignores it and uses
    (rtol, atol, dt_max) instead.  ``sample_every`` thins the recorded
    trajectory to every k-th accepted step.
    """

    method: str = "rk45"
    t_max: float = 100.0
    dt: float = 0.01
    rtol: float = 1e-8
    atol: float = 1e-10
    dt_max: float = 0.1
    dt_init: float | None = None
    sample_every: int = 1

    def __post_init__(self):
        if self.method not in ("rk45", "rk4"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.t_max <= 0 or self.dt <= 0 or self.sample_every < 1:
            raise ValueError("t_max, dt must be positive and sample_every >= 1")
        if self.rtol <= 0 or self.atol <= 0 or self.dt_max <= 0:
            raise ValueError("rtol, atol, dt_max must be positive")
        if self.dt_init is not None and self.dt_init <= 0:
            raise ValueError("dt_init must be positive when given")


@dataclass(frozen=True)
class TerminationCriteria:
    """Thresholds for run termination and post-hoc convergence checks.

    ``window`` counts recorded samples.  A limit cycle is suspected when the
    edge error's spread over the window is below 10% of its mean while the
    mean speed stays above ``min_speed`` and some node travels farther than
    ``tol_node``.
    """

    tol_edge: float = 1e-6
    tol_node: float = 1e-4
    window: int = 50
    min_speed: float = 1e-4

    def __post_init__(self):
        if min(self.tol_edge, self.tol_node, self.min_speed) <= 0 or self.window < 2:
            raise ValueError("termination thresholds must be positive (window >= 2)")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded closed-loop run.

    All arrays share the leading sample axis: times (k,), positions
    (k, n, d), measurements (k, |E|), edge_error / speed / energy (k,).
    ``energy`` is the running integral of the squared node speed.
    """

    spec: ControllerSpec = field(repr=False)
    times: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)
    measurements: np.ndarray = field(repr=False)
    edge_error: np.ndarray = field(repr=False)
    speed: np.ndarray = field(repr=False)
    energy: np.ndarray = field(repr=False)
    termination: str
    termination_time: float

    @property
    def final_configuration(self) -> Configuration:
        return Configuration(self.positions.shape[2], self.positions[-1])


@dataclass(frozen=True)
class ConvergenceOutcome:
    """Post-hoc verdicts of a finished run against a target configuration."""

    edge_converged: bool
    node_converged: bool
    congruent: bool
    final_edge_error: float
    final_speed: float
    congruence_residual: float


class _Recorder:
    def __init__(self, criteria: TerminationCriteria):
        self.criteria = criteria
        self.times: list[float] = []
        self.positions: list[np.ndarray] = []
        self.measurements: list[np.ndarray] = []
        self.edge_error: list[float] = []
        self.speed: list[float] = []

    def add(self, t: float, p: np.ndarray, m: np.ndarray, err: float, spd: float):
        self.times.append(t)
        self.positions.append(p)
        self.measurements.append(m)
        self.edge_error.append(err)
        self.speed.append(spd)

    def verdict(self) -> str | None:
        """Termination reason at the newest sample, if any."""
        c = self.criteria
        if self.edge_error[-1] < c.tol_edge:
            return "converged"
        if len(self.times) >= c.window:
            err = np.asarray(self.edge_error[-c.window:])
            spd = np.asarray(self.speed[-c.window:])
            pos = self.positions[-c.window:]
            leveled = err.max() - err.min() < 0.1 * err.mean()
            moving = spd.mean() > c.min_speed
            travel = float(np.linalg.norm(pos[-1] - pos[0], axis=1).max())
            if leveled and moving and travel > c.tol_node:
                return "limit-cycle-suspect"
        return None


def _finish(spec: ControllerSpec, rec: _Recorder, termination: str) -> Trajectory:
    times = np.asarray(rec.times)
    speed = np.asarray(rec.speed)
    energy = cumulative_trapezoid(speed**2, times, initial=0.0)
    return Trajectory(
        spec=spec,
        times=times,
        positions=np.asarray(rec.positions),
        measurements=np.asarray(rec.measurements),
        edge_error=np.asarray(rec.edge_error),
        speed=speed,
        energy=energy,
        termination=termination,
        termination_time=float(times[-1]),
    )


def integrate(
    spec: ControllerSpec,
    p0: Configuration,
    integrator: IntegratorConfig = IntegratorConfig(),
    criteria: TerminationCriteria = TerminationCriteria(),
    seed: int = 0,
) -> Trajectory:
    """Run the closed loop from p0 until convergence, cycling, or t_max."""
    graph, d, n = spec.graph, p0.d, p0.n
    if len(spec.m_star) != graph.num_edges:
        raise ValueError("target measurement does not match the graph")

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        del t
        return evaluate_field(spec, Configuration.from_vector(d, x), seed).u

    rec = _Recorder(criteria)

    def sample(t: float, x: np.ndarray):
        p = Configuration.from_vector(d, x)
        m = distance_map(graph, p).values
        err = float(np.linalg.norm(m - spec.m_star.values))
        spd = float(np.linalg.norm(evaluate_field(spec, p, seed).u))
        rec.add(t, p.points, m, err, spd)

    x0 = p0.vector
    try:
        sample(0.0, x0)
    except RankDeficiencyError:
        raise RankDeficiencyError("initial configuration is rank deficient")
    verdict = rec.verdict()
    if verdict == "converged":
        return _finish(spec, rec, verdict)

    if integrator.method == "rk45":
        return _run_rk45(spec, rec, rhs, sample, x0, integrator)
    return _run_rk4(spec, rec, rhs, sample, x0, integrator)


def _run_rk45(spec, rec, rhs, sample, x0, cfg: IntegratorConfig) -> Trajectory:
    solver = RK45(
        rhs,
        0.0,
        x0,
        t_bound=cfg.t_max,
        max_step=cfg.dt_max,
        rtol=cfg.rtol,
        atol=cfg.atol,
        **({"first_step": cfg.dt_init} if cfg.dt_init else {}),
    )
    steps = 0
    while solver.status == "running":
        try:
            solver.step()
        except RankDeficiencyError:
            return _finish(spec, rec, "aborted")
        if solver.status == "failed":
            return _finish(spec, rec, "aborted")
        steps += 1
        if steps % cfg.sample_every == 0 or solver.status == "finished":
            try:
                sample(solver.t, solver.y)
            except RankDeficiencyError:
                return _finish(spec, rec, "aborted")
            verdict = rec.verdict()
            if verdict is not None:
                return _finish(spec, rec, verdict)
    return _finish(spec, rec, "horizon")


def _run_rk4(spec, rec, rhs, sample, x0, cfg: IntegratorConfig) -> Trajectory:
    t, x = 0.0, x0.copy()
    steps = 0
    while t < cfg.t_max - 1e-12:
        h = min(cfg.dt, cfg.t_max - t)
        try:
            k1 = rhs(t, x)
            k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2)
            k4 = rhs(t + h, x + h * k3)
        except RankDeficiencyError:
            return _finish(spec, rec, "aborted")
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
        steps += 1
        last = t >= cfg.t_max - 1e-12
        if steps % cfg.sample_every == 0 or last:
            try:
                sample(t, x)
            except RankDeficiencyError:
                return _finish(spec, rec, "aborted")
            verdict = rec.verdict()
            if verdict is not None:
                return _finish(spec, rec, verdict)
    return _finish(spec, rec, "horizon")


def detect_convergence(
    traj: Trajectory,
    target: Configuration,
    criteria: TerminationCriteria = TerminationCriteria(),
) -> ConvergenceOutcome:
    """Judge a finished run: edge error small, motion stopped, shape matched.

    Congruence compares the final configuration to ``target`` modulo rigid
    motion (reflections allowed), with ``tol_node`` as the residual bound.
    """
    final_err = float(traj.edge_error[-1])
    final_speed = float(traj.speed[-1])
    congruent, residual = congruence_check(
        traj.final_configuration, target, tol=criteria.tol_node
    )
    return ConvergenceOutcome(
        edge_converged=final_err < criteria.tol_edge,
        node_converged=final_speed < criteria.min_speed,
        congruent=congruent,
        final_edge_error=final_err,
        final_speed=final_speed,
        congruence_residual=float(residual),
    )


def decay_rate(traj: Trajectory, tail_fraction: float = 0.5) -> float:
    """Exponential decay rate of the edge error over the trailing samples.

    Least-squares slope of log(edge error) against time over the last
    ``tail_fraction`` of the run, sign-flipped so decay is positive.
    Raises ValueError when fewer than two positive-error samples remain
    (e.g. a run that started at the equilibrium).
    """
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail_fraction must be in (0, 1]")
    k = len(traj.times)
    start = min(k - 1, int(np.floor(k * (1.0 - tail_fraction))))
    t = traj.times[start:]
    e = traj.edge_error[start:]
    keep = e > 0.0
    if keep.sum() < 2:
        raise ValueError("fit window has fewer than two positive edge-error samples")
    slope = np.polyfit(t[keep], np.log(e[keep]), 1)[0]
    return float(-slope)


def control_energy(traj: Trajectory) -> float:
    """Total integral of squared node speed over the run."""
    return float(traj.energy[-1])
