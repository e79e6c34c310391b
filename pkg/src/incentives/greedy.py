"""Greedy budget allocation over hull steps, with an optimality certificate.

All per-individual hull steps are sorted by decreasing incremental
efficiency (social gain per euro) and included one by one while they fit
the budget.  The first step that does not fit is the *split item*: its
efficiency times the unused budget bounds the gap to any optimal policy,
because no remaining step can convert a euro into more social gain.

A step whose inclusion would exceed the budget is never included and the
scan stops there (no skipping ahead); this is what makes the certificate
valid.  Stopping early or restarting with a larger budget both reproduce
exactly what a fresh run would have done, so results can be computed
anytime and extended incrementally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from . import _core
from ._fmt import fmt6, round6
from .concavize import ExtremeProfile, ProfileSet, as_profile_set

__all__ = [
    "Step", "StepQueue", "Allocation", "WelfareCurve", "GreedyResult",
    "build_step_queue", "solve", "curve", "resume", "stop_anytime", "certify",
    "write_result_json", "write_allocation_csv", "write_curve_csv",
]

_ZERO = np.zeros(1, dtype=np.float64)

Profiles = Union[ProfileSet, Iterable[ExtremeProfile]]


class Step(NamedTuple):
    ind_id: int
    alt_id: int
    incr_weight: float
    incr_social: float
    incr_eff: float


class StepQueue(Sequence[Step]):
    """All hull steps, sorted by (efficiency desc, ind_id asc, alt_id asc).

    Within one individual the sort preserves hull order because step
    efficiencies strictly decrease along a profile, so any prefix of the
    queue advances each individual monotonically along her hull.
    """

    def __init__(self, profiles, ind_idx, entry_idx, incr_weights,
                 incr_socials, incr_effs, ind_ids, alt_ids):
        self.profiles = profiles
        self.ind_idx = ind_idx
        self.entry_idx = entry_idx
        self.incr_weights = incr_weights
        self.incr_socials = incr_socials
        self.incr_effs = incr_effs
        self.ind_ids = ind_ids
        self.alt_ids = alt_ids
        for arr in (ind_idx, entry_idx, incr_weights, incr_socials,
                    incr_effs, ind_ids, alt_ids):
            arr.flags.writeable = False

    def __len__(self) -> int:
        return len(self.entry_idx)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[k] for k in range(*index.indices(len(self)))]
        if index < 0:
            index += len(self)
        if not 0 <= index < len(self):
            raise IndexError(index)
        return Step(int(self.ind_ids[index]), int(self.alt_ids[index]),
                    float(self.incr_weights[index]),
                    float(self.incr_socials[index]),
                    float(self.incr_effs[index]))

    @property
    def fingerprint(self) -> str:
        return self.profiles.fingerprint


@dataclass(frozen=True)
class Allocation:
    """One chosen alternative per individual; transfers for non-defaults."""

    chosen: Mapping[int, int]
    incentives: Mapping[tuple[int, int], float]

    def __post_init__(self):
        object.__setattr__(self, "chosen", MappingProxyType(dict(self.chosen)))
        object.__setattr__(self, "incentives",
                           MappingProxyType(dict(self.incentives)))


@dataclass(frozen=True, eq=False)
class WelfareCurve:
    """Right-continuous step curve: best welfare per budget actually spent.

    ``spends`` starts at 0 and is strictly increasing; evaluation at y
    returns the welfare of the last breakpoint with spend <= y.
    """

    spends: np.ndarray
    welfares: np.ndarray
    domain_max: float

    def __post_init__(self):
        self.spends.flags.writeable = False
        self.welfares.flags.writeable = False

    @property
    def breakpoints(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.spends.tolist(), self.welfares.tolist()))

    def evaluate(self, y: float) -> float:
        if not 0.0 <= y <= self.domain_max:
            raise ValueError(f"budget {y} outside [0, {self.domain_max}]")
        idx = int(np.searchsorted(self.spends, y, side="right")) - 1
        return float(self.welfares[idx])

    def __eq__(self, other):
        return (isinstance(other, WelfareCurve)
                and self.domain_max == other.domain_max
                and np.array_equal(self.spends, other.spends)
                and np.array_equal(self.welfares, other.welfares))


@dataclass(frozen=True, eq=False)
class GreedyResult:
    allocation: Allocation = field(repr=False)
    curve: WelfareCurve = field(repr=False)
    welfare: float
    budget_given: float
    budget_used: float
    split_item: Optional[tuple[int, int]]
    split_eff: Optional[float]
    gap_bound: float
    iterations: int
    resume_cursor: int
    queue: StepQueue = field(repr=False)
    chosen_entry: np.ndarray = field(repr=False)  # per-individual hull entry index


def build_step_queue(profiles: Profiles) -> StepQueue:
    ps = as_profile_set(profiles)
    n = len(ps)
    counts = np.diff(ps.offsets)
    total = int(ps.offsets[-1])

    mask = np.ones(total, dtype=bool)
    mask[ps.offsets[:-1]] = False  # every profile leads with its default
    step_entry = np.nonzero(mask)[0]
    incr_w = ps.weights[step_entry] - ps.weights[step_entry - 1]
    incr_s = ps.gains[step_entry] - ps.gains[step_entry - 1]
    eff = incr_s / incr_w

    ind_idx = np.repeat(np.arange(n, dtype=np.int64), counts)[step_entry]
    same = ind_idx[1:] == ind_idx[:-1]
    if np.any(eff[1:][same] >= eff[:-1][same]):
        raise AssertionError(
            "step efficiencies must strictly decrease along each profile")

    ind_ids = ps.ind_ids[ind_idx]
    alt_ids = ps.alt_ids[step_entry]
    order = np.lexsort((alt_ids, ind_ids, -eff))
    return StepQueue(ps, ind_idx[order], step_entry[order], incr_w[order],
                     incr_s[order], eff[order], ind_ids[order], alt_ids[order])


def _as_queue(profiles: Union[Profiles, StepQueue]) -> StepQueue:
    if isinstance(profiles, StepQueue):
        return profiles
    return build_step_queue(profiles)


def _allocation(queue: StepQueue, cursor: int) -> tuple[Allocation, np.ndarray]:
    ps = queue.profiles
    n = len(ps)
    ranks = np.bincount(queue.ind_idx[:cursor], minlength=n)
    entry = ps.offsets[:-1] + ranks
    chosen = dict(zip(ps.ind_ids.tolist(), ps.alt_ids[entry].tolist()))
    moved = np.nonzero(ranks)[0]
    moved_entry = entry[moved]
    keys = list(zip(ps.ind_ids[moved].tolist(), ps.alt_ids[moved_entry].tolist()))
    incentives = dict(zip(keys, ps.weights[moved_entry].tolist()))
    return Allocation(chosen, incentives), entry


def _execute(queue: StepQueue, budget: float, cursor0: int, spend0: float,
             welf0: float, max_incl: Optional[int],
             base_spends: np.ndarray, base_welfs: np.ndarray) -> GreedyResult:
    if budget < 0:
        raise ValueError("budget must be non-negative")
    m = len(queue)
    cap = m - cursor0
    out_spend = np.empty(cap, dtype=np.float64)
    out_welf = np.empty(cap, dtype=np.float64)
    limit = cap if max_incl is None else min(max_incl, cap)
    n, cursor, spend, welf = _core.greedy_walk(
        queue.incr_weights, queue.incr_socials, budget, cursor0,
        spend0, welf0, limit, out_spend, out_welf)

    # A premature stop re-scopes the result to the budget actually spent:
    # it is then exactly the result of a full run with that budget.
    truncated = (max_incl is not None and n == limit and cursor < m
                 and spend + float(queue.incr_weights[cursor]) <= budget)
    budget_given = spend if truncated else budget

    spends = np.concatenate([base_spends, out_spend[:n]])
    welfs = np.concatenate([base_welfs, out_welf[:n]])
    curve_ = WelfareCurve(spends, welfs, budget_given)

    if cursor < m:
        split_item = (int(queue.ind_ids[cursor]), int(queue.alt_ids[cursor]))
        split_eff: Optional[float] = float(queue.incr_effs[cursor])
        gap_bound = split_eff * (budget_given - spend)
    else:
        split_item = None
        split_eff = None
        gap_bound = 0.0

    allocation, entry = _allocation(queue, cursor)
    return GreedyResult(
        allocation=allocation, curve=curve_, welfare=welf,
        budget_given=budget_given, budget_used=spend,
        split_item=split_item, split_eff=split_eff, gap_bound=gap_bound,
        iterations=cursor, resume_cursor=cursor, queue=queue,
        chosen_entry=entry)


def solve(profiles: Union[Profiles, StepQueue], budget: float) -> GreedyResult:
    """Allocate a budget over the hull steps; certificate included.

    Accepts profiles (or a prebuilt StepQueue to share the sort across
    calls).  The result's ``gap_bound`` bounds how far any optimal policy
    can exceed ``welfare`` at this budget.
    """
    queue = _as_queue(profiles)
    return _execute(queue, float(budget), 0, 0.0, 0.0, None, _ZERO, _ZERO)


def curve(profiles: Union[Profiles, StepQueue], budget: float) -> WelfareCurve:
    """Welfare curve over [0, budget]: breakpoints at every greedy inclusion."""
    return solve(profiles, budget).curve


def resume(prev: GreedyResult, new_budget: float,
           profiles: Optional[Profiles] = None) -> GreedyResult:
    """Extend a previous result to a larger budget without re-running.

    Continues the walk from the stored cursor; the output is identical to a
    fresh solve at ``new_budget``.  Pass ``profiles`` to verify they match
    the ones the previous result was computed from.
    """
    if profiles is not None:
        if as_profile_set(profiles).fingerprint != prev.queue.fingerprint:
            raise ValueError("profiles do not match the previous result "
                             "(fingerprint mismatch)")
    if new_budget <= prev.budget_given:
        raise ValueError("new budget must exceed the previous one")
    return _execute(prev.queue, float(new_budget), prev.resume_cursor,
                    prev.budget_used, prev.welfare, None,
                    prev.curve.spends, prev.curve.welfares)


def stop_anytime(profiles: Union[Profiles, StepQueue], budget: float,
                 max_iterations: int) -> GreedyResult:
    """Run at most ``max_iterations`` inclusions.

    If the cap binds before the budget does, the result is re-scoped to the
    budget spent so far and equals a full solve at that budget.
    """
    if max_iterations < 0:
        raise ValueError("max_iterations must be non-negative")
    queue = _as_queue(profiles)
    return _execute(queue, float(budget), 0, 0.0, 0.0, int(max_iterations),
                    _ZERO, _ZERO)


def certify(result: GreedyResult, exact_welfare: float,
            tol: float = 1e-9) -> bool:
    """True iff the exact optimum stays within the certified gap."""
    return exact_welfare - result.welfare <= result.gap_bound + tol


# ---------------------------------------------------------------------------
# Machine-readable exports (6 significant digits).

def result_payload(result: GreedyResult) -> dict:
    split = None
    if result.split_item is not None:
        split = {"ind": result.split_item[0], "alt": result.split_item[1],
                 "eff": round6(result.split_eff)}
    return {
        "welfare": round6(result.welfare),
        "budget_given": round6(result.budget_given),
        "budget_used": round6(result.budget_used),
        "gap_bound": round6(result.gap_bound),
        "split": split,
        "iterations": result.iterations,
    }


def write_result_json(result: GreedyResult, path) -> None:
    with open(Path(path), "w", encoding="utf-8") as fh:
        json.dump(result_payload(result), fh, indent=1)
        fh.write("\n")


def write_allocation_csv(result: GreedyResult, path) -> None:
    ps = result.queue.profiles
    entry = result.chosen_entry
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        fh.write("ind_id,chosen_alt_id,incentive_eur,social_gain_kg\n")
        for i in range(len(ps)):
            e = int(entry[i])
            fh.write(f"{int(ps.ind_ids[i])},{int(ps.alt_ids[e])},"
                     f"{fmt6(float(ps.weights[e]))},{fmt6(float(ps.gains[e]))}\n")


def write_curve_csv(curve_: WelfareCurve, path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        fh.write("spend_eur,welfare_kg\n")
        for s, w in zip(curve_.spends.tolist(), curve_.welfares.tolist()):
            fh.write(f"{fmt6(s)},{fmt6(w)}\n")
