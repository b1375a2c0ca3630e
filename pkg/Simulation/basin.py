"""
Empirical basin of attraction: simulate from a deterministic grid of starts in
the free space and collect per-start outcomes.
"""

import logging
from dataclasses import dataclass, field, replace
from queue import Queue
from threading import Event
from typing import List, Optional

import numpy as np

from baseHandler import BaseHandler
from Simulation.scenario import Scenario
from Simulation.simulator import Simulator
from World.sphere_world import ConstrainedProblem, prepare, sphere_margin
from utils.thread_manager import ThreadManager
from utils.utils import sphere_points

logger = logging.getLogger(__name__)

MAX_OVERSAMPLE = 64


def basin_starts(problem: ConstrainedProblem, count: int) -> np.ndarray:
    """
    count user-frame starts strictly inside M, taken from a quasi-uniform
    point set that is enlarged until enough points survive rejection.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if count == 1:
        return np.array([problem.to_user_frame(problem.x0.coords)])
    dim = problem.n + 1
    candidates = count
    while candidates <= MAX_OVERSAMPLE * count:
        pts = sphere_points(candidates, dim)
        inside = [p for p in pts if sphere_margin(problem.user_set, p).minimum > 0.0]
        if len(inside) >= count:
            logger.debug("kept %d of %d candidates", len(inside), candidates)
            return np.array(inside[:count])
        candidates *= 2
    raise ValueError(f"free space too small to place {count} starts")


@dataclass
class BasinOutcome:
    index: int
    start: np.ndarray
    converged: bool
    safety_violation: bool
    t_converge: Optional[float] = None
    final_distance: float = float("nan")
    error: Optional[str] = None


@dataclass
class BasinReport:
    outcomes: List[BasinOutcome] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.outcomes)

    @property
    def converged_fraction(self) -> float:
        return sum(o.converged for o in self.outcomes) / self.count if self.outcomes else 0.0

    @property
    def violation_fraction(self) -> float:
        return sum(o.safety_violation for o in self.outcomes) / self.count if self.outcomes else 0.0

    def non_converged(self) -> List[BasinOutcome]:
        return [o for o in self.outcomes if not o.converged]


class SimulationHandler(BaseHandler):
    """Runs one closed-loop simulation per (index, start) item."""

    def setup(self, scenario: Scenario = None):
        self.scenario = scenario

    def process(self, item):
        index, start = item
        summary = Simulator(self.scenario.with_start(start)).simulate().summary
        yield BasinOutcome(
            index=index,
            start=np.asarray(start),
            converged=summary.converged,
            safety_violation=summary.safety_violation,
            t_converge=summary.t_converge,
            final_distance=summary.final_distance,
            error=summary.abort_reason,
        )

    def on_error(self, item, error):
        index, start = item
        return BasinOutcome(index, np.asarray(start), False, False, error=f"{type(error).__name__}: {error}")


def run_basin(scenario: Scenario, count: int, jobs: int = 1, dt: Optional[float] = None) -> BasinReport:
    """Simulate from `count` starts with `jobs` worker threads; outcomes ordered by start index."""
    problem = prepare(scenario.constraints, scenario.x0, scenario.xd)
    starts = basin_starts(problem, count)
    # only the summary is used, so record the first and last samples only
    n_steps = int(round(scenario.t_end / (dt or scenario.dt)))
    base = replace(scenario, dt=dt or scenario.dt, record_stride=max(n_steps, 1))

    jobs = max(1, min(jobs, len(starts)))
    stop_event = Event()
    work_q, result_q = Queue(), Queue()
    for item in enumerate(starts):
        work_q.put(item)
    for _ in range(jobs):
        work_q.put(None)

    workers = [
        SimulationHandler(stop_event, work_q, result_q, setup_kwargs={"scenario": base}) for _ in range(jobs)
    ]
    logger.info("basin study: %d starts on %d workers", len(starts), jobs)
    manager = ThreadManager(workers)
    manager.start()

    outcomes, finished = [], 0
    try:
        while finished < jobs:
            out = result_q.get()
            if out is None:
                finished += 1
                continue
            outcomes.append(out)
    except BaseException:
        # workers finish their current start and skip the rest of the queue
        manager.stop()
        raise
    manager.join()
    for i, worker in enumerate(workers):
        logger.debug("worker %d processed %d starts", i, worker.processed)

    report = BasinReport(sorted(outcomes, key=lambda o: o.index))
    logger.info(
        "basin study done: %.1f%% converged, %.1f%% safety violations",
        100 * report.converged_fraction,
        100 * report.violation_fraction,
    )
    return report
