"""Performance (P) and performance-cost (PC) rankings.

Scores or keys that agree to within ``TIE_RTOL`` (relative, floored at 1)
are treated as ties; ties go to the cheaper VM, then to the smaller id. The
tolerance absorbs floating-point noise between mathematically equal scores
so rankings do not depend on summation details.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .catalog import VMProfile
from .scoring import EXECUTIONS, SEQUENTIAL

P = "P"
PC = "PC"
MODES = (P, PC)

TIE_RTOL = 1e-9
SHIFT_EPS = 1e-6


@dataclass(frozen=True)
class RankEntry:
    vm_id: str
    rank: int
    score: float
    key: float


@dataclass(frozen=True)
class RankingResult:
    mode: str
    execution: str
    entries: tuple[RankEntry, ...]
    tie_break_applied: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown ranking mode {self.mode!r}")
        if self.execution not in EXECUTIONS:
            raise ValueError(f"unknown execution mode {self.execution!r}")
        ranks = sorted(e.rank for e in self.entries)
        if ranks != list(range(1, len(self.entries) + 1)):
            raise ValueError("ranks must be exactly 1..m")
        ids = [e.vm_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate vm ids in ranking")

    @property
    def order(self) -> list[str]:
        return [e.vm_id for e in sorted(self.entries, key=lambda e: e.rank)]

    def ranks(self) -> dict[str, int]:
        return {e.vm_id: e.rank for e in self.entries}

    def __len__(self):
        return len(self.entries)


def tiebreak_order(profiles: Sequence[VMProfile]) -> list[int]:
    """Indices of ``profiles`` sorted by (cost, id)."""
    return sorted(range(len(profiles)), key=lambda i: (profiles[i].cost_per_hour, profiles[i].id))


def snap_ties(scores) -> np.ndarray:
    """Replace each chain of tolerance-equal scores by the chain's smallest value.

    Chains are formed over the sorted scores exactly as in :func:`order_by`.
    """
    s = np.asarray(scores, dtype=np.float64)
    out = s.copy()
    idx = np.argsort(s, kind="stable")
    rep = s[idx[0]] if len(s) else 0.0
    for p, i in enumerate(idx):
        if p and not _close(s[idx[p - 1]], s[i]):
            rep = s[i]
        out[i] = rep
    return out


def shifted_scores(scores) -> np.ndarray:
    """Order-preserving strictly positive version of ``scores``.

    Tied scores are snapped together first: the shift divides by a tiny
    offset near the minimum, which would otherwise turn rounding noise
    between equal scores into large key differences.
    """
    s = snap_ties(scores)
    lo = s.min()
    if lo > 0:
        return s.copy()
    rng = s.max() - lo
    if rng == 0:
        rng = 1.0
    return (s - lo) + SHIFT_EPS * rng


def performance_cost_keys(scores, profiles: Sequence[VMProfile]) -> np.ndarray:
    costs = np.array([p.cost_per_hour for p in profiles], dtype=np.float64)
    return costs / shifted_scores(scores)


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= TIE_RTOL * max(1.0, abs(a), abs(b))


def order_by(values, profiles: Sequence[VMProfile]) -> tuple[list[int], bool]:
    """Sort indices by ascending ``values`` with tolerance-aware tie-breaking.

    Returns the ordering and whether any tie had to be broken.
    """
    values = [float(v) for v in values]
    tb = tiebreak_order(profiles)
    tb_pos = {i: p for p, i in enumerate(tb)}
    first = sorted(tb, key=lambda i: values[i])
    order, group, tied = [], [], False
    for i in first:
        if group and not _close(values[group[-1]], values[i]):
            order.extend(sorted(group, key=tb_pos.__getitem__))
            group = []
        elif group:
            tied = True
        group.append(i)
    order.extend(sorted(group, key=tb_pos.__getitem__))
    return order, tied


def _result(mode, execution, order, scores, keys, profiles, tied):
    entries = tuple(
        RankEntry(profiles[i].id, r, float(scores[i]), float(keys[i])) for r, i in enumerate(order, start=1)
    )
    return RankingResult(mode, execution, entries, tied)


def _check(scores, profiles):
    if len(scores) != len(profiles):
        raise ValueError(f"{len(scores)} scores for {len(profiles)} VMs")
    if len(profiles) == 0:
        raise ValueError("cannot rank an empty fleet")


def rank_performance(scores, profiles: Sequence[VMProfile], execution: str = SEQUENTIAL) -> RankingResult:
    """Highest score first. The reported key is the score itself."""
    _check(scores, profiles)
    s = np.asarray(scores, dtype=np.float64)
    order, tied = order_by(-s, profiles)
    return _result(P, execution, order, s, s, profiles, tied)


def rank_performance_cost(scores, profiles: Sequence[VMProfile], execution: str = SEQUENTIAL) -> RankingResult:
    """Lowest cost-per-score first, using shifted scores when any are <= 0."""
    _check(scores, profiles)
    s = np.asarray(scores, dtype=np.float64)
    keys = performance_cost_keys(s, profiles)
    order, tied = order_by(keys, profiles)
    return _result(PC, execution, order, s, keys, profiles, tied)


def rank(scores, profiles: Sequence[VMProfile], mode: str = P, execution: str = SEQUENTIAL) -> RankingResult:
    if mode == P:
        return rank_performance(scores, profiles, execution)
    if mode == PC:
        return rank_performance_cost(scores, profiles, execution)
    raise ValueError(f"unknown ranking mode {mode!r}")


def ranking_from_ranks(ranks: dict[str, int], mode: str = P, execution: str = SEQUENTIAL) -> RankingResult:
    """Wrap an externally produced vm_id -> rank mapping (fixtures, reports)."""
    entries = tuple(
        RankEntry(vm, int(r), float("nan"), float("nan")) for vm, r in sorted(ranks.items(), key=lambda kv: kv[1])
    )
    return RankingResult(mode, execution, entries)
