"""Minimal-cost robot selection: bases, link multisets, target assignment.

The search is exhaustive over robot count (1..#bases), injective base
choices, target partitions with every robot covering at least one
target, and per-robot link multisets of size 1..max_links drawn from the
catalogue with repetition. Feasible means every robot reaches all of
its targets inside the margin-inflated annulus. Candidates are ordered
by a total key

    (total cost, robot count, link count, bases, configs, assignment)

so the optimum is unique and independent of enumeration order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .kinematics import ArmConfiguration, is_reachable, reach_interval, solve_ik
from .scenarios import Point2, TaskScenario

__all__ = [
    "RobotPlan",
    "RobotDesign",
    "InfeasibleDesignError",
    "design_robots",
    "design_for_scenario",
    "DesignFindings",
    "TargetCheck",
    "verify_design",
    "DEFAULT_MARGIN",
]

# Safety buffer applied in pipeline use: the outer reach must exceed the
# target distance by 5% so designs are not razor-thin.
DEFAULT_MARGIN = 0.05

IK_CERT_TOL = 1e-3


class InfeasibleDesignError(ValueError):
    """No feasible design exists; message carries per-target diagnostics."""


@dataclass(frozen=True)
class RobotPlan:
    """One robot of a design: its arm and the target indices it serves."""

    config: ArmConfiguration
    target_indices: tuple[int, ...]


@dataclass(frozen=True)
class RobotDesign:
    """A certified design: every target covered, reachability margin held."""

    robots: tuple[RobotPlan, ...]
    targets: tuple[Point2, ...]
    total_cost: float
    margin: float

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for plan in self.robots:
            if not plan.target_indices:
                raise ValueError("design: every robot needs at least one target")
            for idx in plan.target_indices:
                if idx in seen:
                    raise ValueError(f"design: target {idx} assigned twice")
                seen.add(idx)
                if not 0 <= idx < len(self.targets):
                    raise ValueError(f"design: target index {idx} out of range")
                if not is_reachable(plan.config, self.targets[idx], self.margin):
                    raise ValueError(
                        f"design: target {idx} not reachable with margin {self.margin}"
                    )
        if seen != set(range(len(self.targets))):
            missing = sorted(set(range(len(self.targets))) - seen)
            raise ValueError(f"design: unassigned targets {missing}")
        cost = math.fsum(l for plan in self.robots for l in plan.config.links)
        if abs(cost - self.total_cost) > 1e-9:
            raise ValueError("design: total_cost inconsistent with links")

    @property
    def n_links(self) -> int:
        return sum(len(p.config.links) for p in self.robots)

    def sort_key(self) -> tuple:
        """The total order used by the search; smaller is better."""
        bases = tuple((p.config.base.x, p.config.base.y) for p in self.robots)
        configs = tuple(p.config.links for p in self.robots)
        assignment = tuple(p.target_indices for p in self.robots)
        return (self.total_cost, len(self.robots), self.n_links, bases, configs, assignment)


def _link_multisets(options: list[float], max_links: int) -> list[tuple[float, ...]]:
    """All catalogue multisets of size 1..max_links, sorted descending."""
    unique = sorted(set(options), reverse=True)
    out: list[tuple[float, ...]] = []
    for size in range(1, max_links + 1):
        out.extend(itertools.combinations_with_replacement(unique, size))
    return out


def _best_multiset_for(
    base: Point2,
    target_points: list[Point2],
    multisets: list[tuple[float, ...]],
    margin: float,
) -> tuple[float, ...] | None:
    """Cheapest multiset covering all targets from this base, or None.

    Ties on cost break toward fewer links, then the lexicographically
    smallest (descending-sorted) multiset, keeping the choice canonical.
    """
    distances = [base.distance_to(t) for t in target_points]
    best: tuple[float, ...] | None = None
    best_key: tuple | None = None
    for links in multisets:
        r_min, r_max = reach_interval(links)
        if all(r_min <= d and d * (1.0 + margin) <= r_max for d in distances):
            key = (math.fsum(links), len(links), links)
            if best_key is None or key < best_key:
                best, best_key = links, key
    return best


def design_robots(
    base_options: "list[Point2] | tuple[Point2, ...]",
    targets: "list[Point2] | tuple[Point2, ...]",
    link_options: "list[float] | tuple[float, ...]",
    max_links: int = 3,
    margin: float = 0.0,
) -> RobotDesign:
    """Exhaustively search for the cheapest feasible design.

    Raises InfeasibleDesignError (with per-target diagnostics) when no
    combination of bases, partitions, and link multisets covers every
    target at the requested margin.
    """
    bases = list(base_options)
    points = list(targets)
    if not bases or not points or not link_options:
        raise ValueError("design_robots: empty base, target, or link inputs")
    multisets = _link_multisets(list(link_options), max_links)

    best: RobotDesign | None = None
    best_key: tuple | None = None
    n = len(points)
    for r in range(1, len(bases) + 1):
        for base_idx in itertools.combinations(range(len(bases)), r):
            for slots in itertools.product(range(r), repeat=n):
                if len(set(slots)) != r:
                    continue  # some robot would have no target
                plans: list[RobotPlan] = []
                feasible = True
                for slot in range(r):
                    assigned = tuple(i for i in range(n) if slots[i] == slot)
                    base = bases[base_idx[slot]]
                    links = _best_multiset_for(
                        base, [points[i] for i in assigned], multisets, margin
                    )
                    if links is None:
                        feasible = False
                        break
                    plans.append(RobotPlan(ArmConfiguration(links, base), assigned))
                if not feasible:
                    continue
                plans.sort(key=lambda p: (p.config.base.x, p.config.base.y))
                cost = math.fsum(l for p in plans for l in p.config.links)
                candidate = RobotDesign(tuple(plans), tuple(points), cost, margin)
                key = candidate.sort_key()
                if best_key is None or key < best_key:
                    best, best_key = candidate, key
    if best is None:
        raise InfeasibleDesignError(_infeasibility_report(bases, points, multisets, margin))
    return best


def _infeasibility_report(bases, points, multisets, margin) -> str:
    lines = [f"no feasible design at margin {margin}:"]
    for i, t in enumerate(points):
        per_base = []
        for b in bases:
            d = b.distance_to(t)
            best = None
            best_gap = math.inf
            for links in multisets:
                r_min, r_max = reach_interval(links)
                gap = max(r_min - d, d * (1.0 + margin) - r_max, 0.0)
                if gap < best_gap or (gap == best_gap and best is None):
                    best, best_gap = links, gap
            reach = reach_interval(best) if best else (0.0, 0.0)
            per_base.append(
                f"from ({b.x:g}, {b.y:g}) best config {list(best or ())} "
                f"reaches [{reach[0]:g}, {reach[1]:g}] vs distance {d:g}"
            )
        lines.append(f"  target ({t.x:g}, {t.y:g}): " + "; ".join(per_base))
    return "\n".join(lines)


def design_for_scenario(scenario: TaskScenario, margin: float = DEFAULT_MARGIN) -> RobotDesign:
    """The deterministic reference design for a scenario's geometry."""
    return design_robots(
        scenario.base_options,
        scenario.targets,
        scenario.link_options,
        max_links=scenario.max_links_per_robot,
        margin=margin,
    )


# -- verification of an externally proposed design -------------------------

@dataclass(frozen=True)
class TargetCheck:
    """Reachability verdict for one target under a proposed design."""

    target_index: int
    robot_index: int | None
    annulus_ok: bool
    ik_error: float | None

    @property
    def certified(self) -> bool:
        return bool(
            self.annulus_ok and self.ik_error is not None and self.ik_error <= IK_CERT_TOL
        )


@dataclass(frozen=True)
class DesignFindings:
    """Structured verification results consumed by the scoring rubric."""

    links_from_options: bool
    bases_from_options: bool
    target_checks: tuple[TargetCheck, ...]
    proposal_cost: float | None
    optimal_cost: float | None
    realized: RobotDesign | None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def all_targets_certified(self) -> bool:
        return bool(self.target_checks) and all(c.certified for c in self.target_checks)

    @property
    def cost_ratio(self) -> float | None:
        if self.proposal_cost is None or not self.optimal_cost:
            return None
        return self.proposal_cost / self.optimal_cost


def verify_design(report, scenario: TaskScenario, margin: float = 0.0) -> DesignFindings:
    """Check a robot-design report against the scenario's geometry.

    ``report`` is a parsed RobotDesignReport: its selected bases and arm
    configurations are validated against the catalogue, each target is
    assigned to the first proposed robot whose annulus covers it, and
    reaches are certified with an IK solve. The cost is compared to the
    exhaustive-search optimum at the same margin.
    """
    notes: list[str] = []
    option_set = set(scenario.link_options)
    base_set = {(p.x, p.y) for p in scenario.base_options}

    configs = list(report.arm_configurations)
    proposed_bases = list(report.selected_bases)
    if not configs:
        notes.append("no arm configurations stated")
    if len(proposed_bases) < len(configs):
        notes.append(
            f"{len(configs)} robots but only {len(proposed_bases)} selected bases; "
            "reusing the last stated base"
        )

    bad_links = sorted(
        {l for _, links in configs for l in links if not _in_catalogue(l, option_set)}
    )
    if bad_links:
        notes.append(f"links not in options {sorted(option_set)}: {bad_links}")
    bad_bases = [
        p for p in proposed_bases if not _base_in_options(p, base_set)
    ]
    if bad_bases:
        notes.append(
            "bases not among scenario options: "
            + ", ".join(f"({p.x:g}, {p.y:g})" for p in bad_bases)
        )

    arms: list[ArmConfiguration] = []
    for i, (_, links) in enumerate(configs):
        if not links:
            notes.append(f"robot {i + 1} has no links stated")
            continue
        base = proposed_bases[min(i, len(proposed_bases) - 1)] if proposed_bases else None
        if base is None:
            notes.append(f"robot {i + 1} has no base stated")
            continue
        arms.append(ArmConfiguration(tuple(links), base))

    checks: list[TargetCheck] = []
    assignment: dict[int, list[int]] = {i: [] for i in range(len(arms))}
    for t_idx, target in enumerate(scenario.targets):
        robot_idx = None
        for a_idx, arm in enumerate(arms):
            if is_reachable(arm, target, margin):
                robot_idx = a_idx
                break
        if robot_idx is None:
            checks.append(TargetCheck(t_idx, None, False, None))
            continue
        sol = solve_ik(arms[robot_idx], target, tol=IK_CERT_TOL, max_iters=300)
        checks.append(TargetCheck(t_idx, robot_idx, True, sol.tip_error))
        assignment[robot_idx].append(t_idx)

    proposal_cost = (
        math.fsum(l for _, links in configs for l in links) if configs else None
    )
    try:
        optimal_cost = design_for_scenario(scenario, margin).total_cost
    except InfeasibleDesignError:
        optimal_cost = None
        notes.append("scenario itself is infeasible at this margin")

    realized: RobotDesign | None = None
    if (
        arms
        and not bad_links
        and not bad_bases
        and all(c.certified for c in checks)
        and all(assignment[i] for i in range(len(arms)))
    ):
        plans = tuple(
            RobotPlan(arm, tuple(assignment[i])) for i, arm in enumerate(arms)
        )
        realized = RobotDesign(
            plans, tuple(scenario.targets), math.fsum(l for a in arms for l in a.links), margin
        )
    elif arms and all(c.certified for c in checks) and not all(
        assignment[i] for i in range(len(arms))
    ):
        notes.append("some proposed robot serves no target")

    return DesignFindings(
        links_from_options=not bad_links and bool(configs),
        bases_from_options=not bad_bases and bool(proposed_bases),
        target_checks=tuple(checks),
        proposal_cost=proposal_cost,
        optimal_cost=optimal_cost,
        realized=realized,
        notes=tuple(notes),
    )


def _in_catalogue(length: float, options: set[float]) -> bool:
    return any(abs(length - o) <= 1e-9 for o in options)


def _base_in_options(p: Point2, base_set: set[tuple[float, float]]) -> bool:
    return any(abs(p.x - bx) <= 1e-9 and abs(p.y - by) <= 1e-9 for bx, by in base_set)
