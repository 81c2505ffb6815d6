"""Exhaustive enumeration of the weight space.

Weight vectors are indexed lexicographically: index ``i`` is ``i`` written in
base 6 with one digit per group, so index 1 is ``(0, ..., 0, 1)`` and the
all-zero vector (index 0) is skipped. Work is split into contiguous index
blocks; per-block results are merged in block order, so output does not
depend on the number of workers.
"""
from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ._kernels import get_backend
from .catalog import MeasurementMatrix, VMProfile
from .ranking import MODES, P, RankingResult, tiebreak_order
from .scoring import (
    EXECUTIONS,
    KINDS,
    SEQUENTIAL,
    WeightVector,
    attribute_signs,
    group_index,
    group_labels,
    prepare,
)


@dataclass(frozen=True)
class WeightSpaceSpec:
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")

    @property
    def groups(self) -> int:
        return len(group_labels(self.kind))

    @property
    def cardinality(self) -> int:
        return 6**self.groups - 1

    def weight_at(self, index: int) -> WeightVector:
        if not 1 <= index <= self.cardinality:
            raise IndexError(index)
        digits = []
        for _ in range(self.groups):
            index, d = divmod(index, 6)
            digits.append(d)
        return WeightVector(self.kind, tuple(reversed(digits)))

    def index_of(self, weights: WeightVector) -> int:
        idx = 0
        for d in weights.values:
            idx = idx * 6 + d
        return idx


def _spec(spec) -> WeightSpaceSpec:
    return spec if isinstance(spec, WeightSpaceSpec) else WeightSpaceSpec(spec)


def enumerate_weights(spec) -> Iterator[WeightVector]:
    """Yield every non-zero weight vector in lexicographic order."""
    spec = _spec(spec)
    it = itertools.product(range(6), repeat=spec.groups)
    next(it)
    for values in it:
        yield WeightVector(spec.kind, values)


def partitions(total: int, parts: int, first: int = 1) -> list[tuple[int, int]]:
    """Split indices ``first..first+total-1`` into ``parts`` contiguous blocks."""
    parts = max(1, min(parts, total))
    bounds = [first + (total * p) // parts for p in range(parts + 1)]
    return [(lo, hi) for lo, hi in zip(bounds, bounds[1:]) if hi > lo]


class _Problem:
    """Kernel inputs: normalise once, score many weight vectors."""

    def __init__(self, matrix: MeasurementMatrix, profiles, spec: WeightSpaceSpec, mode: str, execution: str):
        if mode not in MODES:
            raise ValueError(f"unknown ranking mode {mode!r}")
        if execution not in EXECUTIONS:
            raise ValueError(f"unknown execution mode {execution!r}")
        profiles = matrix.vms if profiles is None else tuple(profiles)
        if [p.id for p in profiles] != [v.id for v in matrix.vms]:
            raise ValueError("profiles must match the matrix rows")
        self.spec = spec
        self.mode = mode
        self.execution = execution
        self.profiles = profiles
        self.vm_ids = [p.id for p in profiles]
        normalized = prepare(matrix, execution)
        tb = tiebreak_order(profiles)
        tb_pos = np.empty(len(tb), dtype=np.intp)
        tb_pos[tb] = np.arange(len(tb))
        self.args = (
            np.ascontiguousarray(normalized.values, dtype=np.float64),
            attribute_signs(matrix.attributes),
            np.ascontiguousarray(group_index(matrix.attributes, spec.kind), dtype=np.intp),
            spec.groups,
            np.array([p.cost_per_hour for p in profiles], dtype=np.float64),
            tb_pos,
            np.array(tb, dtype=np.intp),
            0 if mode == P else 1,
        )

    @property
    def m(self):
        return len(self.profiles)

    def blocks(self, workers: int):
        # a few blocks per worker keeps threads busy without changing results
        parts = 1 if workers <= 1 else workers * 4
        return partitions(self.spec.cardinality, parts)

    def run(self, fn, workers, *extra):
        blocks = self.blocks(workers)
        if workers <= 1:
            return [fn(*self.args, lo, hi, *extra) for lo, hi in blocks]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda b: fn(*self.args, b[0], b[1], *extra), blocks))


def ranking_orders(matrix, profiles=None, spec="aggregate", mode=P, execution=SEQUENTIAL, start=1, stop=None,
                   backend=None) -> np.ndarray:
    """Row ``r`` holds matrix-row indices in rank order for weight index ``start + r``."""
    problem = _Problem(matrix, profiles, _spec(spec), mode, execution)
    stop = problem.spec.cardinality + 1 if stop is None else stop
    return get_backend(backend).rank_orders(*problem.args, start, stop)


@dataclass(frozen=True, eq=False)
class FrequencyTable:
    vm_ids: tuple[str, ...]
    counts: np.ndarray  # (m, k): counts[v, r-1] = vectors placing VM v at rank r
    kind: str
    mode: str
    execution: str
    k: int

    @property
    def cardinality(self) -> int:
        return WeightSpaceSpec(self.kind).cardinality

    def count(self, vm_id: str, rank_position: int) -> int:
        return int(self.counts[self.vm_ids.index(vm_id), rank_position - 1])

    def rows(self):
        for r in range(1, self.k + 1):
            for v, vm in enumerate(self.vm_ids):
                yield vm, r, int(self.counts[v, r - 1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["vm_id", "rank_position", "count"])
        w.writerows(self.rows())
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = [
            f"# Top-{self.k} frequency: {self.mode} ranking, {self.execution} execution, "
            f"{self.kind} weights ({self.cardinality:,} vectors)",
            "",
        ]
        for r in range(1, self.k + 1):
            col = self.counts[:, r - 1]
            order = sorted(range(len(self.vm_ids)), key=lambda v: (-col[v], self.vm_ids[v]))
            lines.append(f"## Rank {r}")
            lines.append("")
            lines.append("| vm_id | count | share |")
            lines.append("|---|---:|---:|")
            for v in order:
                if col[v]:
                    lines.append(f"| {self.vm_ids[v]} | {int(col[v])} | {col[v] / self.cardinality:.2%} |")
            lines.append("")
        return "\n".join(lines)


def top_k_frequency(matrix: MeasurementMatrix, profiles: Sequence[VMProfile] | None = None, spec="aggregate",
                    mode: str = P, execution: str = SEQUENTIAL, k: int = 3, workers: int = 1,
                    backend: str | None = None) -> FrequencyTable:
    """Count how often each VM lands at each of the top ``k`` positions."""
    spec = _spec(spec)
    problem = _Problem(matrix, profiles, spec, mode, execution)
    if not 1 <= k <= problem.m:
        raise ValueError(f"k must be between 1 and the number of VMs ({problem.m}), got {k}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    parts = problem.run(get_backend(backend).topk_counts, workers, k)
    counts = np.zeros((problem.m, k), dtype=np.int64)
    for part in parts:
        counts += part
    return FrequencyTable(tuple(problem.vm_ids), counts, spec.kind, mode, execution, k)


@dataclass(frozen=True, eq=False)
class ScoreCurve:
    """Weight vectors sorted by their ranking's distance to an empirical ranking."""

    kind: str
    mode: str
    execution: str
    indices: np.ndarray
    scores: np.ndarray

    def __len__(self):
        return len(self.indices)

    def __getitem__(self, i) -> tuple[WeightVector, int]:
        return WeightSpaceSpec(self.kind).weight_at(int(self.indices[i])), int(self.scores[i])

    def __iter__(self):
        spec = WeightSpaceSpec(self.kind)
        for idx, s in zip(self.indices, self.scores):
            yield spec.weight_at(int(idx)), int(s)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["weight_vector", "score"])
        for wv, s in self:
            w.writerow(["-".join(map(str, wv.values)), s])
        return buf.getvalue()

    def to_markdown(self) -> str:
        s = self.scores
        best = self[0] if len(self) else None
        lines = [
            f"# Score curve: {self.mode} ranking, {self.execution} execution, {self.kind} weights",
            "",
            f"- vectors: {len(self):,}",
            f"- min / median / max score: {int(s.min())} / {float(np.median(s)):g} / {int(s.max())}",
        ]
        if best is not None:
            lines.append(f"- best weights: {best[0]} (score {best[1]})")
        return "\n".join(lines) + "\n"


def score_curve(matrix: MeasurementMatrix, profiles: Sequence[VMProfile] | None = None, spec="aggregate",
                mode: str = P, execution: str = SEQUENTIAL, empirical: RankingResult | None = None,
                workers: int = 1, backend: str | None = None) -> ScoreCurve:
    """Weighted hamming score of every weight vector's ranking, sorted ascending.

    Equal scores keep lexicographic weight order.
    """
    if empirical is None:
        raise ValueError("an empirical ranking is required")
    spec = _spec(spec)
    problem = _Problem(matrix, profiles, spec, mode, execution)
    ranks = empirical.ranks()
    if set(ranks) != set(problem.vm_ids):
        missing = sorted(set(problem.vm_ids) - set(ranks))
        extra = sorted(set(ranks) - set(problem.vm_ids))
        raise ValueError(f"empirical ranking covers a different VM set (missing {missing}, extra {extra})")
    er = np.array([ranks[v] for v in problem.vm_ids], dtype=np.int64)
    parts = problem.run(get_backend(backend).hamming_scores, workers, er)
    scores = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    order = np.argsort(scores, kind="stable")
    return ScoreCurve(spec.kind, mode, execution, order.astype(np.int64) + 1, scores[order])
