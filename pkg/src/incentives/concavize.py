"""Reduction of each individual's choice set to its efficient frontier.

For individual i every alternative becomes a point (w, g): w the incentive
weight (utility gap to the default) and g the social gain relative to the
default.  Alternatives that are dominated (another point is weakly cheaper
and weakly better, one strictly) or that lie on or below a segment between
two retained points are never part of an optimal fractional allocation and
are removed; what survives is the upper-left convex hull anchored at the
default (0, 0), with strictly increasing weights and gains and strictly
decreasing step efficiency.

Hull tests use a cross-product sign with absolute tolerance CROSS_TOL, so
interior collinear points are dropped deterministically.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence, Union, overload

import numpy as np

from . import _core
from .model import Individual, Instance, default_alternative

__all__ = [
    "CROSS_TOL", "ExtremeEntry", "ExtremeProfile", "ProfileSet",
    "lp_extremes", "concavize_all", "write_profiles_csv",
]

CROSS_TOL = 1e-12


class ExtremeEntry(NamedTuple):
    alt_id: int
    weight: float
    social_gain: float
    incr_weight: Optional[float]   # None on the leading default entry
    incr_social: Optional[float]
    incr_eff: Optional[float]


@dataclass(frozen=True)
class ExtremeProfile:
    """Ordered hull of one individual; the first entry is the default (0, 0)."""

    ind_id: int
    alt_ids: tuple[int, ...]
    weights: tuple[float, ...]
    social_gains: tuple[float, ...]

    @property
    def n_steps(self) -> int:
        return len(self.alt_ids) - 1

    @property
    def incr_weights(self) -> tuple[float, ...]:
        w = self.weights
        return tuple(w[k] - w[k - 1] for k in range(1, len(w)))

    @property
    def incr_socials(self) -> tuple[float, ...]:
        g = self.social_gains
        return tuple(g[k] - g[k - 1] for k in range(1, len(g)))

    @property
    def incr_effs(self) -> tuple[float, ...]:
        return tuple(s / w for s, w in zip(self.incr_socials, self.incr_weights))

    @property
    def entries(self) -> tuple[ExtremeEntry, ...]:
        out = [ExtremeEntry(self.alt_ids[0], self.weights[0],
                            self.social_gains[0], None, None, None)]
        iw, isoc, ie = self.incr_weights, self.incr_socials, self.incr_effs
        for k in range(1, len(self.alt_ids)):
            out.append(ExtremeEntry(self.alt_ids[k], self.weights[k],
                                    self.social_gains[k],
                                    iw[k - 1], isoc[k - 1], ie[k - 1]))
        return tuple(out)


class ProfileSet(Sequence[ExtremeProfile]):
    """Columnar container of one ExtremeProfile per individual.

    Behaves as a sequence of ExtremeProfile; the flat arrays back the solver
    fast path.  A content fingerprint ties solver results to the profiles
    they were computed from.
    """

    def __init__(self, ind_ids, offsets, alt_ids, weights, gains):
        self.ind_ids = np.ascontiguousarray(ind_ids, dtype=np.int64)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.alt_ids = np.ascontiguousarray(alt_ids, dtype=np.int64)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        self.gains = np.ascontiguousarray(gains, dtype=np.float64)
        for arr in (self.ind_ids, self.offsets, self.alt_ids,
                    self.weights, self.gains):
            arr.flags.writeable = False

    def __len__(self) -> int:
        return len(self.ind_ids)

    @overload
    def __getitem__(self, index: int) -> ExtremeProfile: ...
    @overload
    def __getitem__(self, index: slice) -> list[ExtremeProfile]: ...

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[k] for k in range(*index.indices(len(self)))]
        if index < 0:
            index += len(self)
        if not 0 <= index < len(self):
            raise IndexError(index)
        a, b = int(self.offsets[index]), int(self.offsets[index + 1])
        return ExtremeProfile(
            int(self.ind_ids[index]),
            tuple(self.alt_ids[a:b].tolist()),
            tuple(self.weights[a:b].tolist()),
            tuple(self.gains[a:b].tolist()),
        )

    @cached_property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for arr in (self.ind_ids, self.offsets, self.alt_ids,
                    self.weights, self.gains):
            digest.update(arr.tobytes())
        return digest.hexdigest()

    @classmethod
    def from_profiles(cls, profiles: Iterable[ExtremeProfile]) -> "ProfileSet":
        profiles = list(profiles)
        ind_ids = [p.ind_id for p in profiles]
        counts = [len(p.alt_ids) for p in profiles]
        offsets = np.zeros(len(profiles) + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        alt_ids = [a for p in profiles for a in p.alt_ids]
        weights = [w for p in profiles for w in p.weights]
        gains = [g for p in profiles for g in p.social_gains]
        return cls(ind_ids, offsets, alt_ids, weights, gains)


def as_profile_set(profiles: Union[ProfileSet, Iterable[ExtremeProfile]]) -> ProfileSet:
    if isinstance(profiles, ProfileSet):
        return profiles
    return ProfileSet.from_profiles(profiles)


def _threads_from_env() -> int:
    try:
        return max(1, int(os.environ.get("INCENTIVES_THREADS", "1")))
    except ValueError:
        return 1


def _default_positions(offsets, alt_ids, utilities, socials) -> np.ndarray:
    """Per-individual flat position of the default alternative.

    Sorting each segment ascending by (utility, social, -alt_id) puts the
    default last: the utility maximizer, ties to the larger social
    indicator, then to the smaller alternative id.
    """
    n = len(offsets) - 1
    counts = np.diff(offsets)
    ind_codes = np.repeat(np.arange(n, dtype=np.int64), counts)
    perm = np.lexsort((-alt_ids, socials, utilities, ind_codes))
    return perm[offsets[1:] - 1]


def _profiles_from_costs(ind_ids, offsets, alt_ids, weights, gains,
                         default_pos, threads=1) -> ProfileSet:
    ext_offsets, positions = _core.extreme_positions(
        offsets, alt_ids, weights, gains, default_pos, CROSS_TOL, threads)
    return ProfileSet(ind_ids, ext_offsets, alt_ids[positions],
                      weights[positions], gains[positions])


def _costs_from_utilities(cols) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    default_pos = _default_positions(cols.offsets, cols.alt_ids,
                                     cols.utilities, cols.socials)
    counts = np.diff(cols.offsets)
    weights = np.repeat(cols.utilities[default_pos], counts) - cols.utilities
    gains = cols.socials - np.repeat(cols.socials[default_pos], counts)
    return weights, gains, default_pos


def concavize_all(instance: Instance, threads: Optional[int] = None) -> ProfileSet:
    """Extract every individual's efficient frontier.

    A pure function of the instance: per-individual results are independent,
    so the thread count (INCENTIVES_THREADS or the ``threads`` argument)
    changes the runtime, never the output.
    """
    if threads is None:
        threads = _threads_from_env()
    cols = instance.columns
    weights, gains, default_pos = _costs_from_utilities(cols)
    return _profiles_from_costs(cols.ind_ids, cols.offsets, cols.alt_ids,
                                weights, gains, default_pos, threads)


def lp_extremes(ind: Individual) -> ExtremeProfile:
    """Efficient frontier of a single individual."""
    d = default_alternative(ind)
    n = len(ind.alternatives)
    offsets = np.array([0, n], dtype=np.int64)
    alt_ids = np.fromiter((a.alt_id for a in ind.alternatives),
                          dtype=np.int64, count=n)
    weights = np.fromiter((d.default_utility - a.utility
                           for a in ind.alternatives),
                          dtype=np.float64, count=n)
    gains = np.fromiter((a.social - d.default_social
                         for a in ind.alternatives),
                        dtype=np.float64, count=n)
    default_pos = np.array(
        [next(k for k, a in enumerate(ind.alternatives) if a.alt_id == d.alt_id)],
        dtype=np.int64)
    ps = _profiles_from_costs(np.array([ind.ind_id], dtype=np.int64),
                              offsets, alt_ids, weights, gains, default_pos)
    return ps[0]


def write_profiles_csv(profiles: Union[ProfileSet, Iterable[ExtremeProfile]],
                       path) -> None:
    """Debug dump: ind_id,rank,alt_id,weight,social_gain,incr_weight,incr_social,incr_eff."""
    ps = as_profile_set(profiles)
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        fh.write("ind_id,rank,alt_id,weight,social_gain,"
                 "incr_weight,incr_social,incr_eff\n")
        for profile in ps:
            for rank, e in enumerate(profile.entries):
                incr = ("", "", "") if e.incr_weight is None else (
                    repr(e.incr_weight), repr(e.incr_social), repr(e.incr_eff))
                fh.write(f"{profile.ind_id},{rank},{e.alt_id},"
                         f"{e.weight!r},{e.social_gain!r},"
                         f"{incr[0]},{incr[1]},{incr[2]}\n")
