"""Planar serial-arm kinematics: forward map, reach annulus, CCD inverse.

Joint angles are relative: joint 1 is measured from the +x axis, joint k
from the direction of link k-1. The cumulative angle of link k is
``theta_k = sum(angles[:k])`` and joint positions follow

    p_k = p_{k-1} + L_k * (cos theta_k, sin theta_k)

Joints are unlimited revolutes, so the reachable set around the base is
the closed annulus with radii

    r_max = sum(L)           r_min = max(0, 2*max(L) - sum(L))
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenarios import Point2

__all__ = [
    "ArmConfiguration",
    "IKSolution",
    "forward_kinematics",
    "tip_position",
    "reach_interval",
    "is_reachable",
    "solve_ik",
]


@dataclass(frozen=True)
class ArmConfiguration:
    """A serial arm: ordered link lengths mounted at a base point."""

    links: tuple[float, ...]
    base: Point2

    def __post_init__(self) -> None:
        if not self.links:
            raise ValueError("links: empty")
        if any(not (math.isfinite(l) and l > 0) for l in self.links):
            raise ValueError("links: lengths must be > 0")

    @property
    def n_joints(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class IKSolution:
    """Joint angles certifying a reach, or the best attempt on failure."""

    joint_angles: tuple[float, ...]
    tip_error: float
    converged: bool
    sweeps: int


def forward_kinematics(
    links: "np.ndarray | tuple[float, ...] | list[float]",
    angles: "np.ndarray | tuple[float, ...] | list[float]",
    base: Point2,
) -> list[Point2]:
    """Return joint positions ``[base, p_1, ..., tip]`` for relative angles."""
    links = np.asarray(links, dtype=float)
    angles = np.asarray(angles, dtype=float)
    if links.shape != angles.shape or links.ndim != 1 or links.size < 1:
        raise ValueError(
            f"links and angles must be equal-length 1-d sequences, "
            f"got {links.shape} and {angles.shape}"
        )
    xs, ys = _joint_xy(links, angles, base.x, base.y)
    return [Point2(float(x), float(y)) for x, y in zip(xs, ys)]


def tip_position(links: np.ndarray, angles: np.ndarray, base_x: float, base_y: float) -> tuple[float, float]:
    """Tip coordinates only; ndarray fast path used by the RL environment."""
    cum = np.cumsum(angles)
    x = base_x + float(np.dot(links, np.cos(cum)))
    y = base_y + float(np.dot(links, np.sin(cum)))
    return x, y


def _joint_xy(links: np.ndarray, angles: np.ndarray, base_x: float, base_y: float):
    cum = np.cumsum(angles)
    xs = base_x + np.concatenate(([0.0], np.cumsum(links * np.cos(cum))))
    ys = base_y + np.concatenate(([0.0], np.cumsum(links * np.sin(cum))))
    return xs, ys


def reach_interval(links: "tuple[float, ...] | list[float]") -> tuple[float, float]:
    """Closed annulus radii ``(r_min, r_max)`` reachable by the chain."""
    if not len(links):
        raise ValueError("links: empty")
    total = float(sum(links))
    longest = float(max(links))
    return max(0.0, 2.0 * longest - total), total


def is_reachable(config: ArmConfiguration, target: Point2, margin: float = 0.0) -> bool:
    """Whether the target lies in the reach annulus with a safety margin.

    The margin inflates the required outer reach: a target at distance d
    needs ``d * (1 + margin) <= r_max``, so the arm keeps spare length.
    """
    if margin < 0:
        raise ValueError("margin: must be >= 0")
    r_min, r_max = reach_interval(config.links)
    d = config.base.distance_to(target)
    return r_min <= d and d * (1.0 + margin) <= r_max


def solve_ik(
    config: ArmConfiguration,
    target: Point2,
    tol: float = 1e-6,
    max_iters: int = 200,
) -> IKSolution:
    """Cyclic coordinate descent from the zero pose, with a damped polish.

    Each CCD sweep rotates every joint (tip-most first) to point the
    current tip at the target. CCD converges only linearly near the
    annulus boundary (the chain is radially singular at full extension)
    and can stall in degenerate alignments, so each plateau is followed
    by a damped least-squares polish; if that still falls short, the
    search restarts from an aim-at-target pose and then deterministic
    pseudo-random poses. The best pose seen is returned.
    """
    if tol <= 0:
        raise ValueError("tol: must be > 0")
    links = np.asarray(config.links, dtype=float)
    n = links.size
    tx, ty = target.x, target.y

    best_angles = np.zeros(n)
    best_err = math.inf
    rng = np.random.default_rng(12345)
    sweeps_done = 0
    aim = math.atan2(ty - config.base.y, tx - config.base.x)

    starts = 0
    angles = np.zeros(n)
    while sweeps_done < max_iters:
        angles, err, used, _ = _ccd_descend(
            links, angles, config.base, tx, ty, tol, max_iters - sweeps_done
        )
        sweeps_done += used
        if err > tol:
            angles, err = _dls_polish(links, angles, config.base, tx, ty, tol)
        if err < best_err:
            best_err = err
            best_angles = angles.copy()
        if best_err <= tol or sweeps_done >= max_iters:
            break
        starts += 1
        if starts == 1:
            angles = np.concatenate(([aim], np.zeros(n - 1)))
        else:
            angles = rng.uniform(-math.pi, math.pi, size=n)

    best_angles = np.arctan2(np.sin(best_angles), np.cos(best_angles))
    return IKSolution(
        joint_angles=tuple(float(a) for a in best_angles),
        tip_error=float(best_err),
        converged=bool(best_err <= tol),
        sweeps=sweeps_done,
    )


def _dls_polish(links, angles, base, tx, ty, tol, iters: int = 60):
    """Levenberg-damped Gauss-Newton steps on the tip-position residual."""
    angles = angles.copy()
    lam = 1e-3 * float(np.sum(links)) ** 2
    xs, ys = _joint_xy(links, angles, base.x, base.y)
    err = math.hypot(xs[-1] - tx, ys[-1] - ty)
    for _ in range(iters):
        if err <= tol * 0.5:
            break
        cum = np.cumsum(angles)
        seg_x = links * np.cos(cum)
        seg_y = links * np.sin(cum)
        # d tip / d angle_j sums the rotated contributions of links j..n.
        jac = np.empty((2, links.size))
        jac[0] = -np.cumsum(seg_y[::-1])[::-1]
        jac[1] = np.cumsum(seg_x[::-1])[::-1]
        resid = np.array([tx - xs[-1], ty - ys[-1]])
        a = jac @ jac.T + lam * np.eye(2)
        step = jac.T @ np.linalg.solve(a, resid)
        new_angles = angles + step
        xs, ys = _joint_xy(links, new_angles, base.x, base.y)
        new_err = math.hypot(xs[-1] - tx, ys[-1] - ty)
        if new_err < err:
            angles, err = new_angles, new_err
            lam = max(lam * 0.5, 1e-12)
        else:
            lam *= 4.0
            xs, ys = _joint_xy(links, angles, base.x, base.y)
    return angles, err


def _ccd_descend(links, angles, base, tx, ty, tol, max_sweeps):
    """Run CCD sweeps until converged, stalled, or out of budget."""
    angles = angles.copy()
    xs, ys = _joint_xy(links, angles, base.x, base.y)
    err = math.hypot(xs[-1] - tx, ys[-1] - ty)
    sweeps = 0
    while sweeps < max_sweeps and err > tol:
        prev_err = err
        for j in range(links.size - 1, -1, -1):
            px, py = xs[j], ys[j]
            vx, vy = xs[-1] - px, ys[-1] - py
            wx, wy = tx - px, ty - py
            if (vx * vx + vy * vy) < 1e-30 or (wx * wx + wy * wy) < 1e-30:
                continue  # tip or target sits on the pivot; joint has no effect
            delta = math.atan2(wy, wx) - math.atan2(vy, vx)
            angles[j] += delta
            xs, ys = _joint_xy(links, angles, base.x, base.y)
        err = math.hypot(xs[-1] - tx, ys[-1] - ty)
        sweeps += 1
        # A sub-linear improvement means CCD has hit a plateau; hand the
        # pose to the caller (polish/restart) instead of crawling.
        if err > tol and prev_err - err < 1e-4 * err:
            return angles, err, sweeps, True
    return angles, err, sweeps, False
