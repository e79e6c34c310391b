"""Population data model: alternatives, individuals, validated instances.

Conventions: utilities are money-metric (euros per day); the social
indicator is kilograms of CO2 avoided per day.  Adding a personal transfer
t to an alternative raises its utility by t, so the minimum payment that
moves an individual off her default alternative equals the utility gap.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping, NamedTuple, Optional

import numpy as np

from .errors import InstanceError

__all__ = [
    "Alternative", "Individual", "Instance", "DefaultChoice", "IncentiveWeight",
    "default_alternative", "incentive_weights", "load_instance", "save_instance",
]


class Alternative(NamedTuple):
    """One choice option: intrinsic utility (EUR) and social indicator (kg CO2)."""

    alt_id: int
    utility: float
    social: float
    label: Optional[str] = None


class Individual(NamedTuple):
    ind_id: int
    alternatives: tuple[Alternative, ...]


class DefaultChoice(NamedTuple):
    """The alternative an individual picks with no transfers in play."""

    ind_id: int
    alt_id: int
    default_utility: float
    default_social: float


class IncentiveWeight(NamedTuple):
    """Minimum payment making `alt_id` weakly preferred over the default."""

    ind_id: int
    alt_id: int
    weight: float


class Columns(NamedTuple):
    """Flat array view of an instance (one row per alternative)."""

    offsets: np.ndarray    # int64[n_individuals + 1]
    ind_ids: np.ndarray    # int64[n_individuals]
    alt_ids: np.ndarray    # int64[n_alternatives]
    utilities: np.ndarray  # float64[n_alternatives]
    socials: np.ndarray    # float64[n_alternatives]


def _check_individual(ind: Individual) -> None:
    if not ind.alternatives:
        raise InstanceError(f"individual {ind.ind_id} has no alternatives")
    seen = set()
    for alt in ind.alternatives:
        if alt.alt_id in seen:
            raise InstanceError(
                f"duplicate alternative ({ind.ind_id}, {alt.alt_id})")
        seen.add(alt.alt_id)
        if not math.isfinite(alt.utility):
            raise InstanceError(
                f"non-finite utility for ({ind.ind_id}, {alt.alt_id})")
        if not math.isfinite(alt.social):
            raise InstanceError(
                f"non-finite social indicator for ({ind.ind_id}, {alt.alt_id})")


@dataclass(frozen=True)
class Instance:
    """A validated population; immutable once constructed.

    Construction normalizes the individuals into tuples and rejects
    duplicate ids, empty choice sets and non-finite values.
    """

    individuals: tuple[Individual, ...]
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        inds = tuple(
            Individual(ind.ind_id, tuple(ind.alternatives))
            for ind in self.individuals
        )
        seen = set()
        for ind in inds:
            if ind.ind_id in seen:
                raise InstanceError(f"duplicate individual id {ind.ind_id}")
            seen.add(ind.ind_id)
            _check_individual(ind)
        object.__setattr__(self, "individuals", inds)
        object.__setattr__(self, "metadata",
                           MappingProxyType(dict(self.metadata)))

    @property
    def n_individuals(self) -> int:
        return len(self.individuals)

    @property
    def n_alternatives(self) -> int:
        return int(self.columns.offsets[-1])

    @cached_property
    def columns(self) -> Columns:
        counts = np.fromiter((len(i.alternatives) for i in self.individuals),
                             dtype=np.int64, count=len(self.individuals))
        offsets = np.zeros(len(counts) + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        m = int(offsets[-1])
        ind_ids = np.fromiter((i.ind_id for i in self.individuals),
                              dtype=np.int64, count=len(self.individuals))
        alt_ids = np.empty(m, dtype=np.int64)
        utilities = np.empty(m, dtype=np.float64)
        socials = np.empty(m, dtype=np.float64)
        k = 0
        for ind in self.individuals:
            for alt in ind.alternatives:
                alt_ids[k] = alt.alt_id
                utilities[k] = alt.utility
                socials[k] = alt.social
                k += 1
        cols = Columns(offsets, ind_ids, alt_ids, utilities, socials)
        for arr in cols:
            arr.flags.writeable = False
        return cols

    @classmethod
    def _from_arrays(cls, ind_ids, counts, alt_ids, utilities, socials,
                     labels=None, metadata=None) -> "Instance":
        """Fast constructor from flat arrays (validated vectorized)."""
        ind_ids = np.asarray(ind_ids, dtype=np.int64)
        counts = np.asarray(counts, dtype=np.int64)
        alt_ids = np.asarray(alt_ids, dtype=np.int64)
        utilities = np.ascontiguousarray(utilities, dtype=np.float64)
        socials = np.ascontiguousarray(socials, dtype=np.float64)

        if len(np.unique(ind_ids)) != len(ind_ids):
            raise InstanceError("duplicate individual id")
        if np.any(counts < 1):
            i = int(ind_ids[np.argmin(counts)])
            raise InstanceError(f"individual {i} has no alternatives")
        if not np.all(np.isfinite(utilities)):
            raise InstanceError("non-finite utility")
        if not np.all(np.isfinite(socials)):
            raise InstanceError("non-finite social indicator")

        offsets = np.zeros(len(counts) + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])

        alt_list = alt_ids.tolist()
        u_list = utilities.tolist()
        s_list = socials.tolist()
        if labels is None:
            labels = [None] * len(alt_list)
        alts = list(map(Alternative, alt_list, u_list, s_list, labels))
        individuals = tuple(
            Individual(int(ind_ids[i]),
                       tuple(alts[offsets[i]:offsets[i + 1]]))
            for i in range(len(ind_ids))
        )
        for ind in individuals:
            if len({a.alt_id for a in ind.alternatives}) != len(ind.alternatives):
                raise InstanceError(
                    f"duplicate alternative id for individual {ind.ind_id}")

        inst = object.__new__(cls)
        object.__setattr__(inst, "individuals", individuals)
        object.__setattr__(inst, "metadata",
                           MappingProxyType(dict(metadata or {})))
        cols = Columns(offsets, ind_ids, alt_ids, utilities, socials)
        for arr in cols:
            arr.flags.writeable = False
        inst.__dict__["columns"] = cols
        return inst


def default_alternative(ind: Individual) -> DefaultChoice:
    """Pick the no-transfer choice: max utility, ties to max social indicator,
    remaining ties to the lowest alternative id."""
    best = None
    for alt in ind.alternatives:
        if best is None:
            best = alt
        elif (alt.utility > best.utility
              or (alt.utility == best.utility
                  and (alt.social > best.social
                       or (alt.social == best.social
                           and alt.alt_id < best.alt_id)))):
            best = alt
    if best is None:
        raise InstanceError(f"individual {ind.ind_id} has no alternatives")
    return DefaultChoice(ind.ind_id, best.alt_id, best.utility, best.social)


def incentive_weights(ind: Individual) -> list[IncentiveWeight]:
    """Utility gap to the default for every alternative (0 for the default)."""
    d = default_alternative(ind)
    return [
        IncentiveWeight(ind.ind_id, alt.alt_id, d.default_utility - alt.utility)
        for alt in ind.alternatives
    ]


# ---------------------------------------------------------------------------
# File I/O.  CSV: one row per alternative, header required.  JSON mirrors the
# object structure and carries metadata; CSV does not.

_CSV_BASE = ["ind_id", "alt_id", "utility", "social"]


def _infer_format(path: Path, fmt: Optional[str]) -> str:
    if fmt is not None:
        if fmt not in ("csv", "json"):
            raise InstanceError(f"unknown instance format {fmt!r}")
        return fmt
    suffix = path.suffix.lower().lstrip(".")
    if suffix in ("csv", "json"):
        return suffix
    raise InstanceError(f"cannot infer format from {path.name!r}; pass fmt=")


def _parse_float(text: str, what: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise InstanceError(f"line {line}: cannot parse {what} {text!r}") from None
    if not math.isfinite(value):
        raise InstanceError(f"line {line}: non-finite {what} {text!r}")
    return value


def _parse_int(text: str, what: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise InstanceError(f"line {line}: cannot parse {what} {text!r}") from None


def load_instance(path, fmt: Optional[str] = None) -> Instance:
    """Read an instance file (CSV or JSON) into a validated Instance."""
    path = Path(path)
    fmt = _infer_format(path, fmt)
    if fmt == "csv":
        return _load_csv(path)
    return _load_json(path)


def _load_csv(path: Path) -> Instance:
    groups: dict[int, list[Alternative]] = {}
    seen: set[tuple[int, int]] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InstanceError(f"{path.name}: empty file, header required") from None
        header = [h.strip() for h in header]
        has_label = header == _CSV_BASE + ["label"]
        if not has_label and header != _CSV_BASE:
            raise InstanceError(
                f"{path.name}: bad header {header!r}; expected "
                f"{','.join(_CSV_BASE)}[,label]")
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            if len(row) != len(header):
                raise InstanceError(f"line {line}: expected {len(header)} fields")
            ind_id = _parse_int(row[0], "ind_id", line)
            alt_id = _parse_int(row[1], "alt_id", line)
            utility = _parse_float(row[2], "utility", line)
            social = _parse_float(row[3], "social", line)
            label = (row[4] or None) if has_label else None
            if (ind_id, alt_id) in seen:
                raise InstanceError(
                    f"line {line}: duplicate alternative ({ind_id}, {alt_id})")
            seen.add((ind_id, alt_id))
            groups.setdefault(ind_id, []).append(
                Alternative(alt_id, utility, social, label))
    individuals = tuple(Individual(i, tuple(alts)) for i, alts in groups.items())
    return Instance(individuals)


def _load_json(path: Path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path.name}: invalid JSON at line {exc.lineno}") from None
    try:
        individuals = []
        for ind in data["individuals"]:
            alts = []
            for alt in ind["alternatives"]:
                utility = float(alt["utility"])
                social = float(alt["social"])
                if not math.isfinite(utility):
                    raise InstanceError(
                        f"non-finite utility for ({ind['id']}, {alt['id']})")
                if not math.isfinite(social):
                    raise InstanceError(
                        f"non-finite social indicator for ({ind['id']}, {alt['id']})")
                alts.append(Alternative(int(alt["id"]), utility, social,
                                        alt.get("label")))
            individuals.append(Individual(int(ind["id"]), tuple(alts)))
        metadata = data.get("metadata", {})
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"{path.name}: malformed instance JSON ({exc})") from None
    return Instance(tuple(individuals), metadata)


def save_instance(instance: Instance, path, fmt: Optional[str] = None) -> None:
    """Write an instance at full float precision (round-trips exactly).

    CSV has no metadata slot; use JSON to preserve metadata.
    """
    path = Path(path)
    fmt = _infer_format(path, fmt)
    if fmt == "csv":
        _save_csv(instance, path)
    else:
        _save_json(instance, path)


def _save_csv(instance: Instance, path: Path) -> None:
    has_label = any(alt.label is not None
                    for ind in instance.individuals
                    for alt in ind.alternatives)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CSV_BASE + ["label"] if has_label else _CSV_BASE)
        for ind in instance.individuals:
            for alt in ind.alternatives:
                row = [ind.ind_id, alt.alt_id, repr(alt.utility), repr(alt.social)]
                if has_label:
                    row.append(alt.label or "")
                writer.writerow(row)


def _save_json(instance: Instance, path: Path) -> None:
    payload = {
        "individuals": [
            {
                "id": ind.ind_id,
                "alternatives": [
                    {
                        "id": alt.alt_id,
                        "utility": alt.utility,
                        "social": alt.social,
                        **({"label": alt.label} if alt.label is not None else {}),
                    }
                    for alt in ind.alternatives
                ],
            }
            for ind in instance.individuals
        ],
        "metadata": dict(instance.metadata),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
