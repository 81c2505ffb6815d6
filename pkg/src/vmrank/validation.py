"""Validation of method rankings against empirical application timings."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .catalog import DATA_DIR, VMProfile
from .ranking import MODES, P, PC, RankEntry, RankingResult, order_by, ranking_from_ranks
from .scoring import EXECUTIONS, PARALLEL, SEQUENTIAL

OBSERVATIONS_HEADER = ("vm_id", "execution", "time_seconds")
CASE_STUDY_RANKS = DATA_DIR / "case_study_ranks.csv"

# Percentage correlations reported for the three case studies, keyed by
# (execution, mode) in column order seq-P, par-P, seq-PC, par-PC.
PUBLISHED_CORRELATIONS = {
    1: {(SEQUENTIAL, P): 93, (PARALLEL, P): 87, (SEQUENTIAL, PC): 93, (PARALLEL, PC): 91},
    2: {(SEQUENTIAL, P): 85, (PARALLEL, P): 67, (SEQUENTIAL, PC): 96, (PARALLEL, PC): 97},
    3: {(SEQUENTIAL, P): 81, (PARALLEL, P): 95, (SEQUENTIAL, PC): 95, (PARALLEL, PC): 95},
}


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class EmpiricalObservation:
    vm_id: str
    execution: str
    time_seconds: float

    def __post_init__(self):
        if self.execution not in EXECUTIONS:
            raise ValidationError(f"{self.vm_id}: unknown execution {self.execution!r}")
        if not (self.time_seconds > 0 and math.isfinite(self.time_seconds)):
            raise ValidationError(f"{self.vm_id}: time_seconds must be positive, got {self.time_seconds!r}")


@dataclass(frozen=True)
class ValidationReport:
    pearson_percent: float
    hamming_score: int
    mode: str
    execution: str
    vm_count: int

    def as_dict(self):
        return {
            "mode": self.mode,
            "execution": self.execution,
            "vm_count": self.vm_count,
            "pearson_percent": self.pearson_percent,
            "hamming_score": self.hamming_score,
        }


def read_observations(path, execution: str | None = None) -> list[EmpiricalObservation]:
    path = Path(path)
    out = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != OBSERVATIONS_HEADER:
            raise ValidationError(f"{path}: expected header {','.join(OBSERVATIONS_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValidationError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                obs = EmpiricalObservation(row[0].strip(), row[1].strip(), float(row[2]))
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
            if execution is None or obs.execution == execution:
                out.append(obs)
    return out


def _check_vm_sets(have, want, what="rankings"):
    have, want = set(have), set(want)
    if have != want:
        raise ValidationError(
            f"{what} cover different VM sets: missing {sorted(want - have)}, unexpected {sorted(have - want)}"
        )


def empirical_rank(observations: Sequence[EmpiricalObservation], profiles: Sequence[VMProfile],
                   mode: str = P) -> RankingResult:
    """Rank VMs by measured time (P) or by total run cost, cost x time (PC).

    Entry scores hold the z-scored times; keys hold the sort key.
    """
    if mode not in MODES:
        raise ValueError(f"unknown ranking mode {mode!r}")
    ids = [o.vm_id for o in observations]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise ValidationError(f"duplicate observations for {dupes}")
    executions = {o.execution for o in observations}
    if len(executions) > 1:
        raise ValidationError(f"observations mix execution modes {sorted(executions)}")
    _check_vm_sets(ids, [p.id for p in profiles], "observations and catalog")

    by_id = {o.vm_id: o for o in observations}
    times = np.array([by_id[p.id].time_seconds for p in profiles])
    costs = np.array([p.cost_per_hour for p in profiles])
    keys = times if mode == P else costs * times
    sd = times.std()
    z = (times - times.mean()) / sd if sd > 0 else np.zeros_like(times)
    order, tied = order_by(keys, profiles)
    entries = tuple(RankEntry(profiles[i].id, r, float(z[i]), float(keys[i])) for r, i in enumerate(order, start=1))
    execution = executions.pop() if executions else SEQUENTIAL
    return RankingResult(mode, execution, entries, tied)


def _paired_ranks(a: RankingResult, b: RankingResult):
    ra, rb = a.ranks(), b.ranks()
    _check_vm_sets(ra, rb)
    ids = sorted(ra)
    return np.array([ra[i] for i in ids], dtype=np.float64), np.array([rb[i] for i in ids], dtype=np.float64)


def pearson_correlation(a: RankingResult, b: RankingResult) -> float:
    """Pearson coefficient of the two rank vectors paired by vm_id, in percent."""
    x, y = _paired_ranks(a, b)
    if len(x) < 2:
        raise ValidationError("correlation needs at least two VMs")
    dx, dy = x - x.mean(), y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0:
        raise ValidationError("correlation undefined for constant rank vectors")
    return 100.0 * float(dx @ dy) / denom


def hamming_contributions(empirical: RankingResult, calculated: RankingResult, m: int | None = None) -> dict[str, int]:
    """Per-VM terms ``(m - ER + 1) * |ER - CR|`` of the weighted hamming score."""
    er, cr = empirical.ranks(), calculated.ranks()
    _check_vm_sets(er, cr)
    m = len(er) if m is None else m
    return {vm: (m - r + 1) * abs(r - cr[vm]) for vm, r in er.items()}


def hamming_score(empirical: RankingResult, calculated: RankingResult, m: int | None = None) -> int:
    """Weighted hamming distance; displacing empirically top-ranked VMs costs most.

    Not symmetric: the coefficients come from ``empirical``.
    """
    return sum(hamming_contributions(empirical, calculated, m).values())


def compare(method_ranking: RankingResult, empirical_ranking: RankingResult) -> ValidationReport:
    if method_ranking.mode != empirical_ranking.mode:
        raise ValidationError(
            f"cannot compare a {method_ranking.mode} ranking with a {empirical_ranking.mode} ranking"
        )
    if method_ranking.execution != empirical_ranking.execution:
        raise ValidationError(
            f"cannot compare {method_ranking.execution} and {empirical_ranking.execution} rankings"
        )
    return ValidationReport(
        pearson_percent=pearson_correlation(method_ranking, empirical_ranking),
        hamming_score=hamming_score(empirical_ranking, method_ranking),
        mode=method_ranking.mode,
        execution=method_ranking.execution,
        vm_count=len(method_ranking),
    )


_FIXTURE_COLUMNS = {
    (SEQUENTIAL, P): "seq_p",
    (PARALLEL, P): "par_p",
    (SEQUENTIAL, PC): "seq_pc",
    (PARALLEL, PC): "par_pc",
}


def load_case_study(case_study: int, path=CASE_STUDY_RANKS) -> dict[tuple[str, str], tuple[RankingResult, RankingResult]]:
    """Published benchmark and empirical rank columns for one case study.

    Returns ``{(execution, mode): (benchmark_ranking, empirical_ranking)}``.
    """
    with open(path, newline="", encoding="utf-8") as f:
        rows = [r for r in csv.DictReader(f) if int(r["case_study"]) == case_study]
    if not rows:
        raise ValidationError(f"no fixture rows for case study {case_study}")
    out = {}
    for (execution, mode), col in _FIXTURE_COLUMNS.items():
        bench = {r["vm_id"]: int(r[f"{col}_benchmark"]) for r in rows}
        emp = {r["vm_id"]: int(r[f"{col}_empirical"]) for r in rows}
        out[(execution, mode)] = (ranking_from_ranks(bench, mode, execution), ranking_from_ranks(emp, mode, execution))
    return out
