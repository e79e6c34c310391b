"""Exact small-instance solvers used as ground truth for the greedy bound.

Two routes, both operating on the original alternative sets (no hull
reduction): exhaustive enumeration with pruning, and a pseudo-polynomial
dynamic program over scaled integer weights.  Correctness reference only;
no performance tuning.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ._fmt import round6
from .errors import ConfigError, ResourceCapError
from .greedy import Allocation
from .model import Instance, default_alternative

__all__ = [
    "OracleConfig", "ENUMERATION_CAP", "exact_enumerate", "exact_dp",
    "exact_solve", "exact_welfare_per_unit", "result_payload",
    "write_result_json",
]

ENUMERATION_CAP = 10_000_000

_SNAP_EPS = 1e-6


@dataclass(frozen=True)
class OracleConfig:
    """weight_scale: integer units per euro; max_states caps the DP table."""

    weight_scale: int = 100
    max_states: int = 50_000_000
    mode: str = "dp"

    def __post_init__(self):
        if self.weight_scale < 1:
            raise ConfigError("weight_scale must be >= 1")
        if self.max_states < 1:
            raise ConfigError("max_states must be >= 1")
        if self.mode not in ("dp", "enumerate"):
            raise ConfigError(f"unknown oracle mode {self.mode!r}")


class _Choice:
    """Per-individual option lists: weight, social gain vs default, alt id."""

    __slots__ = ("ind_id", "default_alt", "weights", "gains", "alt_ids")

    def __init__(self, ind):
        d = default_alternative(ind)
        self.ind_id = ind.ind_id
        self.default_alt = d.alt_id
        self.weights = [d.default_utility - a.utility for a in ind.alternatives]
        self.gains = [a.social - d.default_social for a in ind.alternatives]
        self.alt_ids = [a.alt_id for a in ind.alternatives]


def _choices(instance: Instance) -> list[_Choice]:
    return [_Choice(ind) for ind in instance.individuals]


def _allocation_from_positions(choices, positions) -> tuple[float, Allocation]:
    chosen = {}
    incentives = {}
    gains = []
    for c, k in zip(choices, positions):
        chosen[c.ind_id] = c.alt_ids[k]
        gains.append(c.gains[k])
        if c.alt_ids[k] != c.default_alt:
            incentives[(c.ind_id, c.alt_ids[k])] = c.weights[k]
    return math.fsum(gains), Allocation(chosen, incentives)


def exact_enumerate(instance: Instance, budget: float) -> tuple[float, Allocation]:
    """True optimum by depth-first enumeration of all joint assignments.

    Refuses instances whose assignment count exceeds ENUMERATION_CAP.
    Ties resolve to the first assignment found (individuals in instance
    order, alternatives in listed order), so output is deterministic.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    choices = _choices(instance)
    count = 1
    for c in choices:
        count *= len(c.weights)
        if count > ENUMERATION_CAP:
            raise ResourceCapError(
                f"enumeration would visit more than {ENUMERATION_CAP} assignments")

    n = len(choices)
    # optimistic remaining welfare, for pruning
    suffix = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + max(choices[i].gains)

    default_pos = [c.alt_ids.index(c.default_alt) for c in choices]
    best_welf = 0.0  # all-defaults assignment, always feasible
    best_pos = list(default_pos)
    stack_pos = list(default_pos)

    def visit(i: int, spend: float, welf: float) -> None:
        nonlocal best_welf, best_pos
        if i == n:
            if welf > best_welf:
                best_welf = welf
                best_pos = stack_pos.copy()
            return
        if welf + suffix[i] <= best_welf:
            return  # cannot strictly beat an already-achieved value
        c = choices[i]
        for k, w in enumerate(c.weights):
            new_spend = spend + w
            if new_spend > budget:
                continue
            stack_pos[i] = k
            visit(i + 1, new_spend, welf + c.gains[k])

    visit(0, 0.0, 0.0)
    return _allocation_from_positions(choices, best_pos)


def _weight_units(w: float, scale: int) -> int:
    x = w * scale
    r = round(x)
    if abs(x - r) <= _SNAP_EPS:
        return int(r)
    return int(math.ceil(x))  # off-grid weights round up: stays feasible


def _budget_units(budget: float, scale: int) -> int:
    x = budget * scale
    r = round(x)
    if abs(x - r) <= _SNAP_EPS:
        return int(r)
    return int(math.floor(x))  # off-grid budgets round down: stays feasible


def _dp_tables(instance: Instance, budget: float, config: OracleConfig):
    if budget < 0:
        raise ValueError("budget must be non-negative")
    choices = _choices(instance)
    units = _budget_units(budget, config.weight_scale)
    n = len(choices)
    if n * (units + 1) > config.max_states:
        raise ResourceCapError(
            f"DP table of {n * (units + 1)} states exceeds cap {config.max_states}")

    dp = np.zeros(units + 1, dtype=np.float64)
    pick = np.zeros((n, units + 1), dtype=np.int16)
    qs: list[list[int]] = []
    for i, c in enumerate(choices):
        q = [_weight_units(w, config.weight_scale) for w in c.weights]
        qs.append(q)
        dpos = c.alt_ids.index(c.default_alt)
        nxt = dp.copy()  # default option: zero units, zero gain
        pick[i, :] = dpos
        for k, (qk, gk) in enumerate(zip(q, c.gains)):
            if k == dpos or qk > units:
                continue
            cand = dp[:units + 1 - qk] + gk
            better = cand > nxt[qk:]
            nxt[qk:][better] = cand[better]
            pick[i, qk:][better] = k
        dp = nxt
    return choices, qs, dp, pick, units


def exact_dp(instance: Instance, budget: float,
             config: Optional[OracleConfig] = None) -> tuple[float, Allocation]:
    """Optimum by dynamic programming over integer weight units.

    Exact whenever all weights land on the unit grid (the default scale is
    cents); off-grid weights are rounded up, so the reported allocation is
    always feasible for the original instance.
    """
    config = config or OracleConfig()
    choices, qs, dp, pick, units = _dp_tables(instance, budget, config)
    positions = []
    u = units
    for i in range(len(choices) - 1, -1, -1):
        k = int(pick[i, u])
        positions.append(k)
        u -= qs[i][k]
    positions.reverse()
    return _allocation_from_positions(choices, positions)


def exact_welfare_per_unit(instance: Instance, budget: float,
                           config: Optional[OracleConfig] = None) -> np.ndarray:
    """Exact optimum for every integer budget 0..units in one DP pass."""
    config = config or OracleConfig()
    _, _, dp, _, _ = _dp_tables(instance, budget, config)
    dp.flags.writeable = False
    return dp


def exact_solve(instance: Instance, budget: float,
                config: Optional[OracleConfig] = None) -> tuple[float, Allocation]:
    """Dispatch on config.mode."""
    config = config or OracleConfig()
    if config.mode == "enumerate":
        return exact_enumerate(instance, budget)
    return exact_dp(instance, budget, config)


def result_payload(welfare: float, allocation: Allocation,
                   budget_given: float) -> dict:
    """Oracle result in the greedy result-JSON shape, for diffing.

    An exact solution has no split item and a zero gap; ``iterations``
    counts the incentivized individuals.
    """
    return {
        "welfare": round6(welfare),
        "budget_given": round6(budget_given),
        "budget_used": round6(math.fsum(allocation.incentives.values())),
        "gap_bound": 0.0,
        "split": None,
        "iterations": len(allocation.incentives),
    }


def write_result_json(welfare: float, allocation: Allocation,
                      budget_given: float, path) -> None:
    with open(Path(path), "w", encoding="utf-8") as fh:
        json.dump(result_payload(welfare, allocation, budget_given), fh, indent=1)
        fh.write("\n")
