"""Optimization stage: parameter classification, depth plans, EE power allocation.

The prototype's depth path is a one-layer step clamped to the configured
bounds.  The power path is the classic fractional program

    maximize  EE(p) = sum_i B_i log2(1 + g_i p_i / (N0_i B_i)) / sum_i p_i
    s.t.      sum_i p_i <= P_max,  p_i >= 0

solved by a Dinkelbach outer loop with an exact water-filling inner step.
``brute_force_ee`` is the independent grid oracle used by the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .intent import Direction, Intent

LN2 = math.log(2.0)


class EmptyRetrievalError(ValueError):
    pass


class OutOfRangeStateError(ValueError):
    """Stored depth outside the declared bounds; indicates store corruption."""


class TooManyUsersError(ValueError):
    pass


class NonConvergenceError(RuntimeError):
    """Dinkelbach failed to meet tolerance; carries the last iterate."""

    def __init__(self, message: str, allocation: "Allocation"):
        super().__init__(message)
        self.allocation = allocation


@dataclass(frozen=True)
class DepthPlan:
    """A clamped one-layer encoding-depth step for one link."""

    target: tuple[int, int]
    current_depth: int
    new_depth: int
    saturated: bool

    parameter = "encoding_depth"

    @property
    def new_value(self) -> int:
        return self.new_depth

    def to_dict(self) -> dict:
        return {
            "kind": "depth",
            "tx_id": self.target[0],
            "rx_id": self.target[1],
            "current_depth": self.current_depth,
            "new_depth": self.new_depth,
            "saturated": self.saturated,
        }


@dataclass(frozen=True)
class PowerPlan:
    """An absolute transmit-power setting for one link."""

    target: tuple[int, int]
    watts: float

    parameter = "tx_power_w"

    @property
    def new_value(self) -> float:
        return self.watts


@dataclass(frozen=True)
class EEProblem:
    """Multi-user energy-efficiency power allocation instance.

    Per user: bandwidth B_i (Hz), channel power gain g_i (linear) and noise
    power spectral density N0_i (W/Hz); one shared total power budget (W).
    """

    bandwidth_hz: tuple[float, ...]
    channel_gain: tuple[float, ...]
    noise_psd: tuple[float, ...]
    p_max_w: float

    def __post_init__(self):
        n = len(self.bandwidth_hz)
        if not (len(self.channel_gain) == len(self.noise_psd) == n) or n == 0:
            raise ValueError("per-user parameter lists must align and be non-empty")
        if min(self.bandwidth_hz) <= 0 or min(self.channel_gain) <= 0:
            raise ValueError("bandwidths and gains must be positive")
        if min(self.noise_psd) <= 0 or self.p_max_w <= 0:
            raise ValueError("noise PSD and power budget must be positive")

    @property
    def n_users(self) -> int:
        return len(self.bandwidth_hz)

    def rate(self, powers: Sequence[float]) -> float:
        """Sum rate in bit/s at the given power vector."""
        b = np.asarray(self.bandwidth_hz)
        g = np.asarray(self.channel_gain)
        n0 = np.asarray(self.noise_psd)
        p = np.asarray(powers, dtype=float)
        return float(np.sum(b * np.log2(1.0 + g * p / (n0 * b))))

    def to_dict(self) -> dict:
        return {
            "users": [
                {"bandwidth_hz": b, "channel_gain": g, "noise_psd": n}
                for b, g, n in zip(self.bandwidth_hz, self.channel_gain, self.noise_psd)
            ],
            "p_max_w": self.p_max_w,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "EEProblem":
        users = doc["users"]
        return cls(
            bandwidth_hz=tuple(float(u["bandwidth_hz"]) for u in users),
            channel_gain=tuple(float(u["channel_gain"]) for u in users),
            noise_psd=tuple(float(u["noise_psd"]) for u in users),
            p_max_w=float(doc["p_max_w"]),
        )


@dataclass(frozen=True)
class Allocation:
    """A power vector with its achieved rate and energy efficiency."""

    powers: tuple[float, ...]
    rate: float
    energy_efficiency: float  # bit/J; 0 by convention at zero total power

    @classmethod
    def from_powers(cls, problem: EEProblem, powers: Sequence[float]) -> "Allocation":
        p = tuple(max(0.0, float(x)) for x in powers)
        total = sum(p)
        rate = problem.rate(p)
        ee = rate / total if total > 0.0 else 0.0
        return cls(powers=p, rate=rate, energy_efficiency=ee)

    def to_dict(self) -> dict:
        return {
            "kind": "power",
            "powers": list(self.powers),
            "rate": self.rate,
            "energy_efficiency": self.energy_efficiency,
        }


@dataclass(frozen=True)
class ProblemSplit:
    """Retrieved parameters split into objectives and constraints."""

    objectives: tuple[tuple[str, str], ...]  # (parameter, sense)
    constraints: tuple[tuple[str, object], ...]  # (parameter, bound)

    def __post_init__(self):
        obj_names = {name for name, _ in self.objectives}
        con_names = {name for name, _ in self.constraints}
        if obj_names & con_names:
            raise ValueError(f"objective/constraint overlap: {obj_names & con_names}")


def classify_params(
    intent: Intent,
    retrieved: Mapping[str, object],
    depth_bounds: tuple[int, int] = (1, 12),
    power_budget_w: float = 1.0,
) -> ProblemSplit:
    """Split retrieved parameters around the intent.

    The intent's parameter becomes the objective (for power intents, the
    energy-efficiency ratio); every other retrieved parameter is pinned as a
    constraint at its current value.  Bounds on the objective's own variable
    carry a ``.range`` / ``.total`` / ``.floor`` suffix so the objective and
    constraint name sets stay disjoint.
    """
    if not retrieved:
        raise EmptyRetrievalError("no parameters retrieved from the store")
    others = tuple(
        (name, ("fixed", value))
        for name, value in sorted(retrieved.items())
        if name != intent.parameter
    )
    if intent.parameter == "tx_power_w":
        constraints = (
            ("tx_power_w.total", ("<=", power_budget_w)),
            ("tx_power_w.floor", (">=", 0.0)),
        ) + others
        return ProblemSplit(
            objectives=(("energy_efficiency", "maximize"),), constraints=constraints
        )
    sense = "maximize" if intent.direction is Direction.INCREASE else "minimize"
    constraints = ((f"{intent.parameter}.range", depth_bounds),) + others
    return ProblemSplit(objectives=((intent.parameter, sense),), constraints=constraints)


def plan_depth_update(
    direction: Direction,
    current_depth: int,
    bounds: tuple[int, int] = (1, 12),
    target: tuple[int, int] = (0, 0),
) -> DepthPlan:
    """One-layer step toward the requested direction, clamped to bounds.

    ``saturated`` is set when the clamp absorbed the step (the stored depth
    already sits at the requested bound).
    """
    lo, hi = bounds
    if not lo <= current_depth <= hi:
        raise OutOfRangeStateError(f"stored depth {current_depth} outside [{lo}, {hi}]")
    if direction is Direction.INCREASE:
        new_depth = min(current_depth + 1, hi)
    else:
        new_depth = max(current_depth - 1, lo)
    return DepthPlan(
        target=target,
        current_depth=current_depth,
        new_depth=new_depth,
        saturated=new_depth == current_depth,
    )


def water_fill(problem: EEProblem, lam: float) -> np.ndarray:
    """Inner Dinkelbach step: argmax of rate(p) - lam * sum(p) over the budget.

    Parameters
    ----------
    problem : EEProblem
        The instance being solved.
    lam : float
        Current Dinkelbach ratio parameter (>= 0).

    Returns
    -------
    np.ndarray
        Optimal powers.  The KKT solution is p_i = B_i * max(0, w - N0_i/g_i)
        with water level w = 1/((lam + mu) ln 2); if the unconstrained level
        (mu = 0) fits the budget it is used, otherwise the level that spends
        the budget exactly is computed in closed form over the active set.
    """
    b = np.asarray(problem.bandwidth_hz)
    floors = np.asarray(problem.noise_psd) / np.asarray(problem.channel_gain)

    def powers_at(level: float) -> np.ndarray:
        return b * np.maximum(0.0, level - floors)

    if lam > 0.0:
        unconstrained = powers_at(1.0 / (lam * LN2))
        if float(unconstrained.sum()) <= problem.p_max_w:
            return unconstrained

    # Budget binds: solve sum_i B_i (w - f_i)+ = P_max exactly.
    order = np.argsort(floors, kind="stable")
    fs, bs = floors[order], b[order]
    cum_bf = np.cumsum(bs * fs)
    cum_b = np.cumsum(bs)
    n = len(fs)
    for k in range(n):
        level = (problem.p_max_w + cum_bf[k]) / cum_b[k]
        upper = fs[k + 1] if k + 1 < n else math.inf
        if level > fs[k] and level <= upper:
            return powers_at(level)
    # All floors below the final level (numerically); spend the budget anyway.
    return powers_at((problem.p_max_w + cum_bf[-1]) / cum_b[-1])


def solve_ee(
    problem: EEProblem,
    tol: float = 1e-9,
    max_iterations: int = 100,
    trace: Optional[list] = None,
) -> Allocation:
    """Maximize energy efficiency via the Dinkelbach iteration.

    Parameters
    ----------
    problem : EEProblem
    tol : float
        Convergence tolerance: stop when |rate - lam * power| < tol * max(1, rate).
    max_iterations : int
        Iteration cap; exceeding it raises NonConvergenceError carrying the
        last iterate.
    trace : list, optional
        If given, the lam value of every iteration is appended (nondecreasing
        by construction; asserted).

    Returns
    -------
    Allocation
        Powers, achieved rate and EE of the final iterate.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    lam = 0.0
    last: Optional[Allocation] = None
    for _ in range(max_iterations):
        if trace is not None:
            trace.append(lam)
        p = water_fill(problem, lam)
        total = float(p.sum())
        if total <= 0.0:
            # Floating-point saturation at the EE supremum; the previous
            # iterate is the answer.
            assert last is not None
            return last
        rate = problem.rate(p)
        alloc = Allocation.from_powers(problem, p)
        last = alloc
        if rate - lam * total < tol * max(1.0, rate):
            return alloc
        new_lam = rate / total
        assert new_lam >= lam - 1e-12, "Dinkelbach ratio must be nondecreasing"
        lam = new_lam
    raise NonConvergenceError(
        f"no convergence after {max_iterations} iterations (lam = {lam})", last
    )


def equal_split(problem: EEProblem) -> Allocation:
    """Baseline allocation: the budget divided evenly across users."""
    share = problem.p_max_w / problem.n_users
    return Allocation.from_powers(problem, [share] * problem.n_users)


def brute_force_ee(problem: EEProblem, grid_step: float) -> Allocation:
    """Exhaustive EE maximization over the gridded power simplex (test oracle).

    Enumerates p_i in {0, grid_step, 2*grid_step, ...} with sum p_i <= P_max
    for up to three users and returns the EE-maximal point; ties break toward
    the lexicographically smallest power vector.  The all-zero point counts
    as a candidate with EE = 0, so a grid_step above P_max yields the single
    all-zero candidate.
    """
    n = problem.n_users
    if n > 3:
        raise TooManyUsersError(f"{n} users; the oracle enumerates at most 3")
    if grid_step <= 0.0:
        raise ValueError("grid_step must be positive")
    k_max = int(math.floor(problem.p_max_w / grid_step + 1e-9))
    levels = np.arange(k_max + 1) * grid_step
    b = np.asarray(problem.bandwidth_hz)
    g = np.asarray(problem.channel_gain)
    n0 = np.asarray(problem.noise_psd)
    # Per-user rate lookup tables; the hot loop below is pure adds/divides.
    rate_of = [b[i] * np.log2(1.0 + g[i] * levels / (n0[i] * b[i])) for i in range(n)]

    def ee_matrix(rate_sum: np.ndarray, k_sum: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            ee = rate_sum / (k_sum * grid_step)
        ee = np.where(k_sum == 0, 0.0, ee)
        return np.where(k_sum > k_max, -np.inf, ee)

    if n == 1:
        ee = ee_matrix(rate_of[0], np.arange(k_max + 1))
        k_best = int(np.argmax(ee))  # first occurrence = smallest power
        best = (float(levels[k_best]),)
    elif n == 2:
        k1 = np.arange(k_max + 1)[:, None]
        k2 = np.arange(k_max + 1)[None, :]
        ee = ee_matrix(rate_of[0][:, None] + rate_of[1][None, :], k1 + k2)
        flat = int(np.argmax(ee))  # row-major first occurrence is lexicographic
        i, j = divmod(flat, k_max + 1)
        best = (float(levels[i]), float(levels[j]))
    else:
        r23 = rate_of[1][:, None] + rate_of[2][None, :]
        s23 = np.arange(k_max + 1)[:, None] + np.arange(k_max + 1)[None, :]
        best_ee = -np.inf
        best = (0.0, 0.0, 0.0)
        for k1 in range(k_max + 1):
            ee = ee_matrix(r23 + rate_of[0][k1], s23 + k1)
            flat = int(np.argmax(ee))
            val = float(ee.flat[flat])
            if val > best_ee:  # strict: keeps the smallest k1 on ties
                i, j = divmod(flat, k_max + 1)
                best_ee = val
                best = (float(levels[k1]), float(levels[i]), float(levels[j]))
    return Allocation.from_powers(problem, best)


def build_ee_problem(
    link_rows: Sequence[Mapping[str, object]], power_budget_w: float
) -> EEProblem:
    """Assemble an EEProblem from live ``links`` rows (one user per link)."""
    if not link_rows:
        raise EmptyRetrievalError("no links in the store")
    return EEProblem(
        bandwidth_hz=tuple(float(r["bandwidth_hz"]) for r in link_rows),
        channel_gain=tuple(float(r["channel_gain"]) for r in link_rows),
        noise_psd=tuple(float(r["noise_psd"]) for r in link_rows),
        p_max_w=power_budget_w,
    )
