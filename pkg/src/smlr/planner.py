"""Sparse multilevel roadmap planner.

Grows one sparse roadmap per abstraction level, ordered by an importance
criterion driven by consecutive addition failures, and draws samples on each
level by restricting to the visibility region of the level below.  A
one-level sequence reduces to the flat sparse-roadmap baseline.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bundles import FiberBundleSequence
from .sparse_graph import SparseRoadmap

START_ID = 0
GOAL_ID = 1


class Status(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    TIMEOUT = "timeout"


class Ptc(Enum):
    CONTINUE = "continue"
    SOLVED = "solved"
    INFEASIBLE = "infeasible"
    TIMEOUT = "timeout"


@dataclass
class PlannerConfig:
    max_failures: int = 1000          # M
    delta_fraction: float = 0.25
    eta: int = 1000
    stretch_t: float = 3.0
    time_limit: float = 60.0
    seed: int = 0
    check_resolution: float | None = None   # None: keep per-level defaults

    def __post_init__(self):
        if self.max_failures < 1:
            raise ValueError("max_failures must be >= 1")
        if not 0 < self.delta_fraction <= 1:
            raise ValueError("delta_fraction must be in (0, 1]")
        if self.eta < 1:
            raise ValueError("eta must be >= 1")
        if self.stretch_t <= 1:
            raise ValueError("stretch_t must exceed 1")
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")


@dataclass
class LevelStats:
    vertices: int
    edges: int
    failures: int
    coverage: float


@dataclass
class PlannerResult:
    status: Status
    level_stats: list[LevelStats]
    path: list[np.ndarray] | None
    cost: float | None
    seconds: float
    seed: int
    coverage_estimate: float
    reason: str = ""


def smooth_parameter(t: int, delta: float, eta: int) -> float:
    """Linear bias ramp from 0 at t=0 to delta at t>=eta."""
    if t < 0 or eta < 1:
        raise ValueError("need t >= 0 and eta >= 1")
    return delta * min(1.0, t / eta)


def compute_importance(failures: int) -> float:
    """Priority of a level: 1 / (M_k + 1)."""
    return 1.0 / (failures + 1)


class LevelState:
    """Mutable per-level planner state: roadmap, sample counter, delta."""

    def __init__(self, index: int, space, validity, cfg: PlannerConfig):
        self.index = index
        self.space = space
        self.validity = validity
        self.delta = cfg.delta_fraction * space.max_extent()
        self.roadmap = SparseRoadmap(space, validity, self.delta,
                                     cfg.stretch_t)
        self.sample_count = 0   # t_k, restriction-sampling calls

    @property
    def importance(self) -> float:
        return compute_importance(self.roadmap.consecutive_failures)


def restriction_sample(level: LevelState, base: LevelState | None,
                       bundle, cfg: PlannerConfig,
                       rng: np.random.Generator) -> np.ndarray:
    """Draw a sample on level's space, biased to the base graph restriction.

    Falls back to uniform sampling when there is no base level or the base
    roadmap has no edges yet.
    """
    level.sample_count += 1
    if base is None:
        return level.space.sample_uniform(rng)
    x_base = base.roadmap.sample_edge_point(rng)
    if x_base is None:
        return level.space.sample_uniform(rng)
    delta_bias = smooth_parameter(level.sample_count - 1, base.delta, cfg.eta)
    if rng.random() < delta_bias / base.delta:
        x_base = base.space.sample_uniform_near(x_base, delta_bias, rng)
    x_fiber = bundle.sample_fiber(rng)
    return bundle.lift(x_base, x_fiber)


def lift_section(bundle, base_path, start_fiber, goal_fiber):
    """Lift a base path pointwise, interpolating the fiber linearly
    (shortest-arc on circles) along normalized path length."""
    if bundle.fiber_dim == 0:
        return [bundle.lift(b) for b in base_path]
    fs = bundle.fiber_space
    seg = [bundle.base_space.distance(a, b)
           for a, b in zip(base_path[:-1], base_path[1:])]
    total = sum(seg)
    cum = 0.0
    lifted = []
    for i, b in enumerate(base_path):
        if i > 0:
            cum += seg[i - 1]
        s = cum / total if total > 0 else (i / max(1, len(base_path) - 1))
        lifted.append(bundle.lift(b, fs.interpolate(start_fiber, goal_fiber,
                                                    min(1.0, s))))
    return lifted


def section_test(level: LevelState, bundle, base_path, start, goal):
    """Try to solve a level instantly by lifting the base solution path.

    Returns the fully validated lifted path or None.  Simplified variant:
    a single linear fiber interpolation is attempted, no local repair.
    """
    if bundle is None or base_path is None:
        return None
    start_fiber = bundle.fiber_of(start)
    goal_fiber = bundle.fiber_of(goal)
    lifted = lift_section(bundle, base_path, start_fiber, goal_fiber)
    v = level.validity
    for x in lifted:
        if not v.is_valid(x):
            return None
    for a, b in zip(lifted[:-1], lifted[1:]):
        if not v.motion_valid(a, b):
            return None
    return lifted


def ptc(level: LevelState, cfg: PlannerConfig, elapsed: float) -> Ptc:
    """Planner termination condition, checked in precedence order
    Solved > Infeasible > Timeout > Continue."""
    rm = level.roadmap
    if rm.num_guards >= 2 and rm.same_component(START_ID, GOAL_ID):
        return Ptc.SOLVED
    if rm.consecutive_failures > cfg.max_failures:
        return Ptc.INFEASIBLE
    if elapsed > cfg.time_limit:
        return Ptc.TIMEOUT
    return Ptc.CONTINUE


def _stats(levels: list[LevelState]) -> list[LevelStats]:
    return [LevelStats(vertices=ls.roadmap.num_guards,
                       edges=ls.roadmap.num_edges,
                       failures=ls.roadmap.consecutive_failures,
                       coverage=ls.roadmap.coverage_estimate())
            for ls in levels]


def _revalidate(path, validity) -> bool:
    """Re-check every segment of a solution at half the planning resolution."""
    half = _half_resolution(validity)
    return all(half.motion_valid(a, b) for a, b in zip(path[:-1], path[1:]))


def _half_resolution(validity):
    return validity.__class__(
        space=validity.space, robot=validity.robot,
        obstacles=validity.obstacles, workspace_lo=validity.workspace_lo,
        workspace_hi=validity.workspace_hi,
        check_resolution=validity.check_resolution / 2.0)


def simplify_path(path, space, validity, rounds: int = 3):
    """Deterministic one-shot shortcutting of an extracted solution.

    Alternates segment subdivision with greedy vertex elision (skip to the
    farthest vertex directly reachable by a valid motion).  Elision never
    increases cost because straight segments realize the metric.  Motions are
    checked at half the planning resolution, matching result re-validation.
    """
    if len(path) <= 2:
        return list(path)
    v = _half_resolution(validity)
    pts = [np.asarray(p, dtype=float) for p in path]
    for _ in range(rounds):
        sub = []
        for a, b in zip(pts[:-1], pts[1:]):
            sub.append(a)
            if space.distance(a, b) > 1e-9:
                sub.append(space.interpolate(a, b, 0.5))
        sub.append(pts[-1])
        out = [sub[0]]
        i = 0
        while i < len(sub) - 1:
            j = len(sub) - 1
            while j > i + 1 and not v.motion_valid(sub[i], sub[j]):
                j -= 1
            out.append(sub[j])
            i = j
        if len(out) == len(pts) and \
                all(np.array_equal(a, b) for a, b in zip(out, pts)):
            break
        pts = out
    return pts


def _insert_path(level: LevelState, path):
    """Record an externally found solution path as roadmap guards/edges so
    termination is detectable through start/goal connectivity."""
    rm = level.roadmap
    prev = START_ID
    for x in path[1:-1]:
        gid = rm.add_guard(x)
        rm.add_edge(prev, gid)
        prev = gid
    rm.add_edge(prev, GOAL_ID)


class SmlrPlanner:
    """Planner instance bound to one bundle sequence and configuration."""

    def __init__(self, seq: FiberBundleSequence, cfg: PlannerConfig):
        self.seq = seq
        self.cfg = cfg
        if cfg.check_resolution is not None:
            for lvl in seq.levels:
                lvl.validity.check_resolution = cfg.check_resolution

    def solve(self, start, goal) -> PlannerResult:
        cfg = self.cfg
        seq = self.seq
        rng = np.random.default_rng(cfg.seed)
        t0 = time.perf_counter()
        K = seq.depth

        starts = [seq.project_to_level(start, k) for k in range(K)]
        goals = [seq.project_to_level(goal, k) for k in range(K)]
        for k in range(K):
            space = seq.levels[k].space
            if space.dim != len(starts[k]):
                raise ValueError("start/goal dimension mismatch")
            starts[k] = space.normalize(starts[k])
            goals[k] = space.normalize(goals[k])
            if not space.contains(starts[k]) or not space.contains(goals[k]):
                raise ValueError(f"start/goal outside bounds on level {k + 1}")

        levels = [LevelState(k, seq.levels[k].space, seq.levels[k].validity,
                             cfg) for k in range(K)]
        self.level_states = levels  # retained for inspection/export

        def finish(status, reason="", path=None, cost=None, coverage=0.0):
            return PlannerResult(
                status=status, level_stats=_stats(levels), path=path,
                cost=cost, seconds=time.perf_counter() - t0, seed=cfg.seed,
                coverage_estimate=coverage, reason=reason)

        # start/goal must be feasible on every level
        for k in range(K):
            v = seq.levels[k].validity
            if not v.is_valid(starts[k]):
                return finish(Status.INFEASIBLE,
                              reason=f"start invalid on level {k + 1}")
            if not v.is_valid(goals[k]):
                return finish(Status.INFEASIBLE,
                              reason=f"goal invalid on level {k + 1}")

        for lvl, s, g in zip(levels, starts, goals):
            lvl.roadmap.add_guard(s)
            lvl.roadmap.add_guard(g)

        base_solutions: list = [None] * K

        for cur in range(K):
            bundle = seq.bundles[cur - 1] if cur >= 1 else None
            base = levels[cur - 1] if cur >= 1 else None
            sec = section_test(levels[cur], bundle,
                               base_solutions[cur - 1] if cur >= 1 else None,
                               starts[cur], goals[cur])
            if sec is not None:
                _insert_path(levels[cur], sec)
            active = levels[:cur + 1]
            while True:
                verdict = ptc(levels[cur], cfg, time.perf_counter() - t0)
                if verdict is Ptc.SOLVED:
                    sol = levels[cur].roadmap.solution_query(START_ID, GOAL_ID)
                    base_solutions[cur] = simplify_path(
                        sol[0], levels[cur].space, levels[cur].validity)
                    break
                if verdict is Ptc.INFEASIBLE:
                    return finish(
                        Status.INFEASIBLE,
                        reason=f"failure bound exceeded on level {cur + 1}",
                        coverage=levels[cur].roadmap.coverage_estimate())
                if verdict is Ptc.TIMEOUT:
                    return finish(Status.TIMEOUT, reason="time limit")
                # pop the max-importance level (ties: coarser level first)
                top = max(active,
                          key=lambda ls: (ls.importance, -ls.index))
                top_bundle = seq.bundles[top.index - 1] if top.index else None
                top_base = levels[top.index - 1] if top.index else None
                x = restriction_sample(top, top_base, top_bundle, cfg, rng)
                if top.validity.is_valid(x):
                    top.roadmap.add_conditional(x)
                else:
                    top.roadmap.record_failure()

        path, cost = base_solutions[K - 1], None
        cost = sum(seq.finest.space.distance(a, b)
                   for a, b in zip(path[:-1], path[1:]))
        assert _revalidate(path, seq.finest.validity), \
            "solution failed re-validation at half resolution"
        return finish(Status.FEASIBLE, path=path, cost=cost,
                      coverage=levels[-1].roadmap.coverage_estimate())


def smlr_solve(seq: FiberBundleSequence, start, goal,
               cfg: PlannerConfig) -> PlannerResult:
    return SmlrPlanner(seq, cfg).solve(start, goal)


def flat_solve(seq: FiberBundleSequence, start, goal,
               cfg: PlannerConfig) -> PlannerResult:
    """Flat sparse-roadmap baseline: the same planner on a one-level
    sequence over the finest space."""
    return SmlrPlanner(seq.flat(), cfg).solve(start, goal)
