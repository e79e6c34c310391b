"""Incentive design when only the deterministic part of utility is known.

Utilities are v + eps with eps i.i.d. Gumbel of scale mu (so the difference
of two noise terms is logistic of scale mu).  The regulator observes which
alternative each individual actually picked (her default) and offers, for a
target alternative, the conditional expectation of the utility shortfall
given that the default is preferred:

    y(delta, mu) = mu * (1 + exp(-delta/mu)) * ln(1 + exp(delta/mu)) >= 0

with delta the known deterministic-utility gap (default minus target; any
sign).  These expected weights feed the hull reduction and the greedy queue
unchanged; the sequential simulator then walks the queue, proposing each
cumulative incentive and observing accept/refuse against realized
utilities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, NamedTuple

import numpy as np

from ._fmt import fmt6, round6
from .concavize import ProfileSet, _default_positions, _profiles_from_costs
from .errors import InstanceError
from .greedy import build_step_queue
from .model import Instance

__all__ = [
    "gumbel_incentive", "StochasticInstance", "WeightTable",
    "expected_weights", "profiles_from_weight_tables",
    "ProposalEvent", "SimulationReport", "simulate_sequential",
    "write_report_json", "write_log_csv",
]

# |delta/mu| beyond which the closed form switches to its asymptotic
# expansion; exp() of the ratio would overflow long before it matters.
_ASYMPTOTIC_SWITCH = 30.0


def gumbel_incentive(delta_v: float, mu: float) -> float:
    """Expected incentive for a target alternative under Gumbel noise.

    delta_v is the deterministic-utility gap (observed default minus
    target); mu > 0 the Gumbel scale.  Monotone non-decreasing in delta_v,
    with y -> delta_v as delta_v/mu -> +inf and y -> mu as it -> -inf.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    z = delta_v / mu
    if z > _ASYMPTOTIC_SWITCH:
        return delta_v + mu * (1.0 + z) * math.exp(-z)
    if z < -_ASYMPTOTIC_SWITCH:
        return mu * (1.0 + math.exp(z) / 2.0)
    if z > 0:
        softplus = z + math.log1p(math.exp(-z))
    else:
        softplus = math.log1p(math.exp(z))
    return mu * (1.0 + math.exp(-z)) * softplus


@dataclass(frozen=True)
class StochasticInstance:
    """Deterministic utilities plus one realized draw of the Gumbel noise.

    Build with :meth:`draw` for noise reconstructible from (instance, mu,
    seed); the raw constructor accepts an explicit noise map (one entry per
    (ind_id, alt_id)), which is how degenerate cases are set up in tests.
    """

    deterministic: Instance
    mu: float
    seed: int
    realized_noise: Mapping[tuple[int, int], float]

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        noise = dict(self.realized_noise)
        for ind in self.deterministic.individuals:
            for alt in ind.alternatives:
                key = (ind.ind_id, alt.alt_id)
                if key not in noise:
                    raise InstanceError(f"missing noise entry for {key}")
                if not math.isfinite(noise[key]):
                    raise InstanceError(f"non-finite noise for {key}")
        object.__setattr__(self, "realized_noise", MappingProxyType(noise))

    @classmethod
    def draw(cls, deterministic: Instance, mu: float, seed: int) -> "StochasticInstance":
        """Sample noise by inverse CDF: eps = -mu * ln(-ln U), U uniform."""
        if mu <= 0:
            raise ValueError("mu must be positive")
        cols = deterministic.columns
        rng = np.random.default_rng(seed)
        u = rng.random(len(cols.alt_ids))
        u[u == 0.0] = 5e-324  # inverse CDF needs U in (0, 1)
        eps = -mu * np.log(-np.log(u))
        keys = zip(np.repeat(cols.ind_ids, np.diff(cols.offsets)).tolist(),
                   cols.alt_ids.tolist())
        return cls(deterministic, mu, seed,
                   dict(zip(keys, eps.tolist())))

    @cached_property
    def _noise_column(self) -> np.ndarray:
        cols = self.deterministic.columns
        inds = np.repeat(cols.ind_ids, np.diff(cols.offsets)).tolist()
        arr = np.fromiter(
            (self.realized_noise[(i, a)]
             for i, a in zip(inds, cols.alt_ids.tolist())),
            dtype=np.float64, count=len(cols.alt_ids))
        arr.flags.writeable = False
        return arr

    @cached_property
    def realized_instance(self) -> Instance:
        """The population with utilities v + eps (what individuals act on)."""
        cols = self.deterministic.columns
        labels = [alt.label for ind in self.deterministic.individuals
                  for alt in ind.alternatives]
        return Instance._from_arrays(
            cols.ind_ids, np.diff(cols.offsets), cols.alt_ids,
            cols.utilities + self._noise_column, cols.socials,
            labels, dict(self.deterministic.metadata))


class WeightTable(NamedTuple):
    """Expected incentive weights of one individual, vs her observed default."""

    ind_id: int
    default_alt_id: int
    alt_ids: tuple[int, ...]
    weights: tuple[float, ...]       # 0.0 on the default
    social_gains: tuple[float, ...]  # relative to the observed default


def expected_weights(stoch: StochasticInstance) -> list[WeightTable]:
    """Per-individual expected-incentive tables.

    The observed default comes from realized utilities (the no-policy
    choice); the weights use only the deterministic gaps, so the gap can
    have either sign.
    """
    det_cols = stoch.deterministic.columns
    real_cols = stoch.realized_instance.columns
    default_pos = _default_positions(real_cols.offsets, real_cols.alt_ids,
                                     real_cols.utilities, real_cols.socials)
    tables = []
    offsets = det_cols.offsets
    for i in range(len(det_cols.ind_ids)):
        a, b = int(offsets[i]), int(offsets[i + 1])
        dpos = int(default_pos[i])
        v_def = float(det_cols.utilities[dpos])
        s_def = float(det_cols.socials[dpos])
        alt_ids = tuple(det_cols.alt_ids[a:b].tolist())
        weights = tuple(
            0.0 if p == dpos
            else gumbel_incentive(v_def - float(det_cols.utilities[p]), stoch.mu)
            for p in range(a, b))
        gains = tuple(float(det_cols.socials[p]) - s_def for p in range(a, b))
        tables.append(WeightTable(int(det_cols.ind_ids[i]),
                                  int(det_cols.alt_ids[dpos]),
                                  alt_ids, weights, gains))
    return tables


def profiles_from_weight_tables(tables: list[WeightTable]) -> ProfileSet:
    """Hull reduction on externally supplied (weight, gain) tables."""
    ind_ids = np.fromiter((t.ind_id for t in tables), dtype=np.int64,
                          count=len(tables))
    counts = np.fromiter((len(t.alt_ids) for t in tables), dtype=np.int64,
                         count=len(tables))
    offsets = np.zeros(len(tables) + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    alt_ids = np.fromiter((a for t in tables for a in t.alt_ids),
                          dtype=np.int64, count=int(offsets[-1]))
    weights = np.fromiter((w for t in tables for w in t.weights),
                          dtype=np.float64, count=int(offsets[-1]))
    gains = np.fromiter((g for t in tables for g in t.social_gains),
                        dtype=np.float64, count=int(offsets[-1]))
    default_pos = np.fromiter(
        (int(offsets[i]) + tables[i].alt_ids.index(tables[i].default_alt_id)
         for i in range(len(tables))),
        dtype=np.int64, count=len(tables))
    return _profiles_from_costs(ind_ids, offsets, alt_ids, weights, gains,
                                default_pos)


class ProposalEvent(NamedTuple):
    step: int
    ind_id: int
    alt_id: int
    amount: float
    accepted: bool


@dataclass(frozen=True)
class SimulationReport:
    budget_spent: float
    proposals: int
    acceptances: int
    acceptance_rate: float
    welfare: float
    log: tuple[ProposalEvent, ...] = field(repr=False)


def simulate_sequential(stoch: StochasticInstance, budget: float) -> SimulationReport:
    """Propose incentives one by one, in decreasing-efficiency order.

    Each proposal offers the cumulative expected incentive for the step's
    alternative; the individual accepts iff the offer makes her weakly
    better off than her current (possibly already incentivized) choice.  On
    acceptance only the net additional amount is spent; a refused later
    offer leaves any earlier accepted incentive in place.  The run stops at
    the first proposal whose acceptance could overshoot the budget.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    tables = expected_weights(stoch)
    ps = profiles_from_weight_tables(tables)
    queue = build_step_queue(ps)

    real_cols = stoch.realized_instance.columns
    inds_per_alt = np.repeat(real_cols.ind_ids, np.diff(real_cols.offsets))
    utility = dict(zip(zip(inds_per_alt.tolist(), real_cols.alt_ids.tolist()),
                       real_cols.utilities.tolist()))
    social = dict(zip(zip(inds_per_alt.tolist(), real_cols.alt_ids.tolist()),
                      real_cols.socials.tolist()))

    current = {t.ind_id: t.default_alt_id for t in tables}
    committed = {t.ind_id: 0.0 for t in tables}

    q_inds = queue.ind_ids.tolist()
    q_entries = queue.entry_idx.tolist()
    ps_alts = ps.alt_ids.tolist()
    ps_weights = ps.weights.tolist()

    spent = 0.0
    welfare = 0.0
    proposals = 0
    acceptances = 0
    events = []
    for k in range(len(q_inds)):
        ind = q_inds[k]
        entry = q_entries[k]
        alt = ps_alts[entry]
        amount = ps_weights[entry]
        net = amount - committed[ind]
        if spent + net > budget:
            break  # accepting could overshoot: stop the whole run
        proposals += 1
        cur = current[ind]
        accepted = (utility[(ind, alt)] + amount
                    >= utility[(ind, cur)] + committed[ind])
        if accepted:
            acceptances += 1
            spent += net
            welfare += social[(ind, alt)] - social[(ind, cur)]
            current[ind] = alt
            committed[ind] = amount
        events.append(ProposalEvent(proposals, ind, alt, amount, accepted))

    rate = acceptances / proposals if proposals else 0.0
    return SimulationReport(spent, proposals, acceptances, rate, welfare,
                            tuple(events))


def report_payload(report: SimulationReport) -> dict:
    return {
        "budget_spent": round6(report.budget_spent),
        "proposals": report.proposals,
        "accepted": report.acceptances,
        "acceptance_rate": round6(report.acceptance_rate),
        "welfare_kg": round6(report.welfare),
    }


def write_report_json(report: SimulationReport, path) -> None:
    with open(Path(path), "w", encoding="utf-8") as fh:
        json.dump(report_payload(report), fh, indent=1)
        fh.write("\n")


def write_log_csv(report: SimulationReport, path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        fh.write("step,ind_id,alt_id,amount_eur,accepted\n")
        for e in report.log:
            fh.write(f"{e.step},{e.ind_id},{e.alt_id},{fmt6(e.amount)},"
                     f"{1 if e.accepted else 0}\n")
