"""Normalisation, weight expansion and per-VM scores."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .catalog import (
    AGGREGATE_GROUPS,
    HIGHER_BETTER,
    SUB_GROUPS,
    AttributeDefinition,
    MeasurementMatrix,
    VMProfile,
)

AGGREGATE = "aggregate"
FINE_GRAIN = "fine_grain"
KINDS = (AGGREGATE, FINE_GRAIN)
SEQUENTIAL = "sequential"
PARALLEL = "parallel"
EXECUTIONS = (SEQUENTIAL, PARALLEL)

WEIGHT_LEVELS = range(6)


def group_labels(kind: str) -> tuple[str, ...]:
    if kind == AGGREGATE:
        return AGGREGATE_GROUPS
    if kind == FINE_GRAIN:
        return SUB_GROUPS
    raise ValueError(f"unknown weight kind {kind!r}")


@dataclass(frozen=True)
class WeightVector:
    """Importance weights (0..5) for the 4 aggregate or 8 fine-grain groups."""

    kind: str
    values: tuple[int, ...]

    def __post_init__(self):
        labels = group_labels(self.kind)
        values = tuple(self.values)
        if len(values) != len(labels):
            raise ValueError(f"{self.kind} weights need {len(labels)} entries, got {len(values)}")
        for v in values:
            if isinstance(v, bool) or int(v) != v or v not in WEIGHT_LEVELS:
                raise ValueError(f"weights must be integers in 0..5, got {v!r}")
        object.__setattr__(self, "values", tuple(int(v) for v in values))

    @classmethod
    def from_mapping(cls, kind: str, weights: Mapping[str, int]) -> "WeightVector":
        labels = group_labels(kind)
        extra = set(weights) - set(labels)
        missing = set(labels) - set(weights)
        if extra or missing:
            raise ValueError(f"{kind} weights: missing {sorted(missing)}, unexpected {sorted(extra)}")
        return cls(kind, tuple(weights[g] for g in labels))

    def as_mapping(self) -> dict[str, int]:
        return dict(zip(group_labels(self.kind), self.values))

    def __str__(self):
        return "(" + ",".join(map(str, self.values)) + ")"


def load_weights(path) -> WeightVector:
    with open(Path(path), encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict) or "kind" not in data or "weights" not in data:
        raise ValueError(f"{path}: weight file needs 'kind' and 'weights'")
    return WeightVector.from_mapping(data["kind"], data["weights"])


def save_weights(weights: WeightVector, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump({"kind": weights.kind, "weights": weights.as_mapping()}, f, indent=2)
        f.write("\n")


@dataclass(frozen=True, eq=False)
class NormalizedMatrix:
    vms: tuple[VMProfile, ...]
    attributes: tuple[AttributeDefinition, ...]
    values: np.ndarray
    mean: np.ndarray
    std: np.ndarray


def normalize(matrix: MeasurementMatrix) -> NormalizedMatrix:
    """Z-score every attribute column using the population mean and std.

    Constant columns (including the single-VM case) normalise to all zeros.
    """
    x = matrix.values
    m = x.shape[0]
    if m < 1:
        raise ValueError("need at least one VM")
    mean = x.sum(axis=0) / m
    dev = x - mean
    constant = np.all(x == x[0], axis=0)
    # scale deviations to [-1, 1] before squaring so tiny or huge spreads
    # neither underflow nor overflow
    scale = np.where(constant, 1.0, np.abs(dev).max(axis=0))
    unit = dev / scale
    unit_std = np.sqrt((unit * unit).sum(axis=0) / m)
    std = np.where(constant, 0.0, unit_std * scale)
    z = np.where(constant, 0.0, unit / np.where(constant, 1.0, unit_std))
    z.setflags(write=False)
    return NormalizedMatrix(matrix.vms, matrix.attributes, z, mean, std)


def governing_group(attribute: AttributeDefinition, kind: str) -> str:
    return attribute.aggregate_group if kind == AGGREGATE else attribute.sub_group


def group_index(attributes: Sequence[AttributeDefinition], kind: str) -> np.ndarray:
    """Column -> weight-slot index for the given weight kind."""
    labels = group_labels(kind)
    return np.array([labels.index(governing_group(a, kind)) for a in attributes], dtype=np.intp)


def attribute_signs(attributes: Sequence[AttributeDefinition]) -> np.ndarray:
    return np.array([a.sign for a in attributes], dtype=np.float64)


def expand_weights(weights: WeightVector, attributes: Sequence[AttributeDefinition]) -> np.ndarray:
    """Per-attribute signed weights: +W for higher-is-better, -W otherwise."""
    w = np.asarray(weights.values, dtype=np.float64)
    return attribute_signs(attributes) * w[group_index(attributes, weights.kind)]


def apply_parallel_adjustment(matrix: MeasurementMatrix, profiles: Sequence[VMProfile] | None = None) -> MeasurementMatrix:
    """Scale parallel-scalable throughput columns by each VM's vCPU count."""
    profiles = matrix.vms if profiles is None else tuple(profiles)
    if [p.id for p in profiles] != [v.id for v in matrix.vms]:
        raise ValueError("profiles must match the matrix rows")
    cols = np.array(
        [a.parallel_scalable and a.direction == HIGHER_BETTER for a in matrix.attributes], dtype=bool
    )
    vcpus = np.array([p.vcpus for p in profiles], dtype=np.float64)
    values = np.array(matrix.values)
    values[:, cols] *= vcpus[:, None]
    return matrix.with_values(values)


def prepare(matrix: MeasurementMatrix, execution: str = SEQUENTIAL) -> NormalizedMatrix:
    if execution == PARALLEL:
        matrix = apply_parallel_adjustment(matrix)
    elif execution != SEQUENTIAL:
        raise ValueError(f"unknown execution mode {execution!r}")
    return normalize(matrix)


def score(normalized: NormalizedMatrix | np.ndarray, expanded) -> np.ndarray:
    """S_i = sum_j z_ij * w_j, accumulated column by column in catalog order."""
    z = normalized.values if isinstance(normalized, NormalizedMatrix) else np.asarray(normalized, dtype=np.float64)
    w = np.asarray(expanded, dtype=np.float64)
    if z.ndim != 2 or w.shape != (z.shape[1],):
        raise ValueError(f"dimension mismatch: matrix {z.shape}, weights {w.shape}")
    s = np.zeros(z.shape[0])
    for j in range(z.shape[1]):
        s += z[:, j] * w[j]
    return s
