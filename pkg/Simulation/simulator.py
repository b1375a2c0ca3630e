"""
Fixed-step RK4 integration of the closed loop x' = Pi(x) u(x) on S^n.

States are integrated in the aligned frame (bounding axis at e_{n+1}) and
reported in the user's frame; the recorded xi is the chart coordinate of the
aligned state.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from Control.controller import LiftedController
from Control.dynamics import AlignedDynamics
from Geometry.sphere import UnitVector, geodesic_distance, renormalize
from Geometry.stereographic import project
from Simulation.integrator import rk4_step
from Simulation.scenario import Scenario
from World.sphere_world import ConstrainedProblem, prepare, sphere_margin
from utils.exceptions import NavigationDomainError, SafetyViolationError

logger = logging.getLogger(__name__)

SAFETY_TOL = 1e-6
REPORT_TOL = 1e-9
SUSTAIN_STEPS = 100


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    t: float
    x: np.ndarray
    xi: np.ndarray
    u: np.ndarray
    phi: Optional[float]
    min_margin: float


@dataclass
class TrajectorySummary:
    converged: bool
    t_converge: Optional[float]
    final_distance: float
    min_margin_overall: float
    max_control_norm: float
    safety_violation: bool = False
    abort_reason: Optional[str] = None
    steps: int = 0
    max_norm_drift: float = 0.0

    @property
    def successful(self) -> bool:
        return self.converged and not self.safety_violation and self.min_margin_overall >= -REPORT_TOL


@dataclass
class Trajectory:
    samples: List[TrajectorySample] = field(default_factory=list)
    summary: Optional[TrajectorySummary] = None
    has_phi: bool = False

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def states(self) -> np.ndarray:
        return np.stack([s.x for s in self.samples])

    def xis(self) -> np.ndarray:
        return np.stack([s.xi for s in self.samples])

    def controls(self) -> np.ndarray:
        return np.stack([s.u for s in self.samples])

    def phis(self) -> np.ndarray:
        return np.array([np.nan if s.phi is None else s.phi for s in self.samples])

    def margins(self) -> np.ndarray:
        return np.array([s.min_margin for s in self.samples])


class Simulator:
    """Closed loop for one scenario. Validation and alignment happen once here."""

    def __init__(self, scenario: Scenario, problem: Optional[ConstrainedProblem] = None):
        self.scenario = scenario
        self.problem = problem or prepare(scenario.constraints, scenario.x0, scenario.xd)
        self.model = AlignedDynamics(scenario.make_model(), self.problem.rotation)
        self.controller = LiftedController(
            self.model,
            self.problem.aligned_set,
            self.problem.world,
            self.problem.xd,
            scenario.params,
            scenario.mode,
            margin_tol=SAFETY_TOL,
        )

    def _field(self, y: np.ndarray):
        x = y / np.linalg.norm(y)
        u, xi, _ = self.controller.evaluate(x)
        return self.model.velocity(x, u), (u, xi)

    def step(self, x: np.ndarray, t: float = 0.0):
        """
        One RK4 step from aligned state x followed by renormalization.
        Returns (next state, control at x, xi at x, norm drift before renormalization).
        """
        try:
            y, (u, xi) = rk4_step(self._field, np.asarray(x, dtype=float), self.scenario.dt)
        except NavigationDomainError as e:
            margin = sphere_margin(self.problem.aligned_set, x).minimum
            raise SafetyViolationError(t, self.problem.to_user_frame(x), margin) from e
        drift = abs(np.linalg.norm(y) - 1.0)
        x_next = renormalize(y).coords
        margin = sphere_margin(self.problem.aligned_set, x_next).minimum
        if margin < -SAFETY_TOL:
            raise SafetyViolationError(t + self.scenario.dt, self.problem.to_user_frame(x_next), margin)
        return x_next, u, xi, drift

    def _sample(self, t, x, u, xi, margin) -> TrajectorySample:
        phi = self.controller.potential(x) if self.scenario.mode == "multi" else None
        return TrajectorySample(t, self.problem.to_user_frame(x), xi, np.array(u), phi, margin)

    def simulate(self) -> Trajectory:
        sc = self.scenario
        n_steps = int(round(sc.t_end / sc.dt))
        xd = self.problem.xd
        x = self.problem.x0.coords
        traj = Trajectory(has_phi=sc.mode == "multi")
        streak, t_streak = 0, None
        converged = False
        min_margin, max_u, max_drift = np.inf, 0.0, 0.0
        abort = None
        i = 0
        logger.info("simulating %d steps of dt=%g (%s mode)", n_steps, sc.dt, sc.mode)

        while True:
            t = i * sc.dt
            dist = geodesic_distance(UnitVector(x, strict=False), xd)
            margin = sphere_margin(self.problem.aligned_set, x).minimum
            min_margin = min(min_margin, margin)
            if dist < sc.convergence_tol:
                if streak == 0:
                    t_streak = t
                streak += 1
            else:
                streak, t_streak = 0, None
            converged = streak >= SUSTAIN_STEPS
            stop = converged or i >= n_steps

            if stop:
                u, xi, _ = self.controller.evaluate(x)
                x_next = x
            else:
                try:
                    x_next, u, xi, drift = self.step(x, t)
                except SafetyViolationError as e:
                    logger.warning("%s", e)
                    abort = str(e)
                    min_margin = min(min_margin, e.margin)
                    u, xi, _ = self.controller.evaluate(x)
                    stop = True
                    x_next = x
                else:
                    max_drift = max(max_drift, drift)
            max_u = max(max_u, float(np.linalg.norm(u)))
            if stop or i % sc.record_stride == 0:
                traj.samples.append(self._sample(t, x, u, xi, margin))
            if stop:
                break
            x = x_next
            i += 1

        traj.summary = TrajectorySummary(
            converged=converged and abort is None,
            t_converge=t_streak if converged else None,
            final_distance=geodesic_distance(UnitVector(x, strict=False), xd),
            min_margin_overall=float(min_margin),
            max_control_norm=max_u,
            safety_violation=abort is not None,
            abort_reason=abort,
            steps=i,
            max_norm_drift=float(max_drift),
        )
        logger.info(
            "finished after %d steps: converged=%s final distance %.3e",
            i,
            traj.summary.converged,
            traj.summary.final_distance,
        )
        return traj

    def dual_consistency_check(self, horizon: Optional[float] = None) -> float:
        """
        Integrate xi' = kappa(xi, xi_d) directly next to the sphere loop and
        return sup_t |psi(x(t)) - xi(t)|.
        """
        sc = self.scenario
        horizon = sc.t_end if horizon is None else horizon
        n_steps = int(round(horizon / sc.dt))
        virtual = self.controller.virtual
        xi_d = self.controller.xi_d

        def xi_field(xi):
            return virtual.velocity(xi, xi_d), None

        x = self.problem.x0.coords
        xi = project(x).coords.copy()
        worst = 0.0
        for i in range(n_steps):
            x, _, _, _ = self.step(x, i * sc.dt)
            xi, _ = rk4_step(xi_field, xi, sc.dt)
            worst = max(worst, float(np.linalg.norm(project(x).coords - xi)))
        return worst


def step(x: UnitVector, scenario: Scenario) -> UnitVector:
    """One closed-loop step from a user-frame state."""
    sim = Simulator(scenario)
    x_next, _, _, _ = sim.step(sim.problem.to_aligned_frame(x).coords)
    return UnitVector(sim.problem.to_user_frame(x_next), strict=False)


def simulate(scenario: Scenario) -> Trajectory:
    return Simulator(scenario).simulate()


def dual_consistency_check(scenario: Scenario, horizon: Optional[float] = None) -> float:
    return Simulator(scenario).dual_consistency_check(horizon)
