"""Attribute taxonomy, VM profiles and benchmark-run ingestion."""
from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

AGGREGATE_GROUPS = ("G1", "G2", "G3", "G4")
SUB_GROUPS = ("G1_1", "G1_2", "G2_1", "G2_2", "G3_1", "G3_2", "G4_1", "G4_2")
GROUP_NAMES = {
    "G1": "memory and process",
    "G2": "local communication",
    "G3": "computation",
    "G4": "storage",
    "G1_1": "process latency",
    "G1_2": "memory latency",
    "G2_1": "local communication latency",
    "G2_2": "local communication bandwidth",
    "G3_1": "integer operations",
    "G3_2": "floating point operations",
    "G4_1": "file I/O bandwidth",
    "G4_2": "file I/O frequency",
}
HIGHER_BETTER = "higher_better"
LOWER_BETTER = "lower_better"
DIRECTIONS = (HIGHER_BETTER, LOWER_BETTER)

RUNS_HEADER = ("vm_id", "attribute_id", "repeat_index", "value")

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_CATALOG = DATA_DIR / "table1.catalog"
DEFAULT_RUNS = DATA_DIR / "table1_synthetic_runs.csv"


class CatalogError(ValueError):
    """Raised when a catalog or runs file is malformed or inconsistent."""


class SchemaError(CatalogError):
    pass


class MissingCellError(CatalogError):
    def __init__(self, missing):
        self.missing = sorted(missing)
        shown = ", ".join(f"({v}, {a})" for v, a in self.missing[:10])
        more = "" if len(self.missing) <= 10 else f" and {len(self.missing) - 10} more"
        super().__init__(f"no runs for {len(self.missing)} (vm, attribute) pairs: {shown}{more}")


def parent_group(sub_group: str) -> str:
    return sub_group.split("_")[0]


@dataclass(frozen=True)
class AttributeDefinition:
    id: str
    name: str
    aggregate_group: str
    sub_group: str
    direction: str
    unit: str = ""
    parallel_scalable: bool = False

    def __post_init__(self):
        if self.aggregate_group not in AGGREGATE_GROUPS:
            raise SchemaError(f"attribute {self.id!r}: unknown aggregate_group {self.aggregate_group!r}")
        if self.sub_group not in SUB_GROUPS:
            raise SchemaError(f"attribute {self.id!r}: unknown sub_group {self.sub_group!r}")
        if parent_group(self.sub_group) != self.aggregate_group:
            raise SchemaError(
                f"attribute {self.id!r}: sub_group {self.sub_group} is not part of {self.aggregate_group}"
            )
        if self.direction not in DIRECTIONS:
            raise SchemaError(f"attribute {self.id!r}: unknown direction {self.direction!r}")

    @property
    def sign(self) -> float:
        return 1.0 if self.direction == HIGHER_BETTER else -1.0


@dataclass(frozen=True)
class VMProfile:
    id: str
    vcpus: int
    memory_gib: float
    cost_per_hour: float

    def __post_init__(self):
        if isinstance(self.vcpus, bool) or not isinstance(self.vcpus, int) or self.vcpus < 1:
            raise SchemaError(f"vm {self.id!r}: vcpus must be a positive integer, got {self.vcpus!r}")
        if not self.memory_gib > 0:
            raise SchemaError(f"vm {self.id!r}: memory_gib must be positive, got {self.memory_gib!r}")
        if not (self.cost_per_hour > 0 and math.isfinite(self.cost_per_hour)):
            raise SchemaError(f"vm {self.id!r}: cost_per_hour must be positive, got {self.cost_per_hour!r}")


@dataclass(frozen=True)
class MeasurementRun:
    vm_id: str
    attribute_id: str
    repeat_index: int
    value: float


@dataclass(frozen=True)
class Catalog:
    attributes: tuple[AttributeDefinition, ...]
    vms: tuple[VMProfile, ...]

    def __post_init__(self):
        _check_unique("attribute", [a.id for a in self.attributes])
        _check_unique("vm", [v.id for v in self.vms])

    def attribute(self, attribute_id: str) -> AttributeDefinition:
        for a in self.attributes:
            if a.id == attribute_id:
                return a
        raise KeyError(attribute_id)

    def vm(self, vm_id: str) -> VMProfile:
        for v in self.vms:
            if v.id == vm_id:
                return v
        raise KeyError(vm_id)


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """Aggregated attribute values, one row per VM and one column per attribute.

    Row and column order follow the catalog file.
    """

    vms: tuple[VMProfile, ...]
    attributes: tuple[AttributeDefinition, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (len(self.vms), len(self.attributes)):
            raise ValueError(
                f"values shape {values.shape} does not match {len(self.vms)} vms x {len(self.attributes)} attributes"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("measurement values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return self.values.shape

    def with_values(self, values) -> "MeasurementMatrix":
        return MeasurementMatrix(self.vms, self.attributes, values)


def _check_unique(kind, ids):
    seen = set()
    for i in ids:
        if i in seen:
            raise SchemaError(f"duplicate {kind} id {i!r}")
        seen.add(i)


_ATTR_FIELDS = ("id", "name", "aggregate_group", "sub_group", "direction", "unit", "parallel_scalable")
_VM_FIELDS = ("id", "vcpus", "memory_gib", "cost_per_hour")


def _build(cls, fields, raw, where):
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: expected an object, got {type(raw).__name__}")
    unknown = set(raw) - set(fields)
    if unknown:
        raise SchemaError(f"{where}: unknown field(s) {sorted(unknown)}")
    try:
        return cls(**raw)
    except TypeError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def catalog_from_dict(data) -> Catalog:
    if not isinstance(data, dict) or "attributes" not in data or "vms" not in data:
        raise SchemaError("catalog must be an object with 'attributes' and 'vms' arrays")
    attributes = tuple(
        _build(AttributeDefinition, _ATTR_FIELDS, a, f"attributes[{k}]") for k, a in enumerate(data["attributes"])
    )
    vms = tuple(_build(VMProfile, _VM_FIELDS, v, f"vms[{k}]") for k, v in enumerate(data["vms"]))
    for a in attributes:
        if not isinstance(a.parallel_scalable, bool):
            raise SchemaError(f"attribute {a.id!r}: parallel_scalable must be a boolean")
    return Catalog(attributes, vms)


def catalog_to_dict(catalog: Catalog) -> dict:
    return {
        "attributes": [asdict(a) for a in catalog.attributes],
        "vms": [asdict(v) for v in catalog.vms],
    }


def load_catalog(path) -> Catalog:
    """Read and validate a JSON catalog file, preserving declaration order."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"{path}: parse error: {exc}") from None
    try:
        return catalog_from_dict(data)
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def save_catalog(catalog: Catalog, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(catalog_to_dict(catalog), f, indent=2)
        f.write("\n")


def read_runs(path) -> list[MeasurementRun]:
    path = Path(path)
    runs = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != RUNS_HEADER:
            raise CatalogError(f"{path}: expected header {','.join(RUNS_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise CatalogError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            try:
                repeat = int(row[2])
                value = float(row[3])
            except ValueError as exc:
                raise CatalogError(f"{path}:{lineno}: {exc}") from None
            if repeat < 0 or not (value >= 0 and math.isfinite(value)):
                raise CatalogError(f"{path}:{lineno}: repeat_index and value must be non-negative")
            runs.append(MeasurementRun(row[0].strip(), row[1].strip(), repeat, value))
    return runs


def write_runs(runs: Iterable[MeasurementRun], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(RUNS_HEADER)
        for r in runs:
            w.writerow([r.vm_id, r.attribute_id, r.repeat_index, repr(float(r.value))])


def ingest_runs(catalog: Catalog, runs: Sequence[MeasurementRun]) -> MeasurementMatrix:
    """Average repeated runs into a complete measurement matrix.

    Repeats are summed in ascending ``repeat_index`` order so the result does
    not depend on the order of ``runs``.
    """
    vm_index = {v.id: i for i, v in enumerate(catalog.vms)}
    attr_index = {a.id: j for j, a in enumerate(catalog.attributes)}
    cells = defaultdict(list)
    unknown = set()
    for r in runs:
        if r.vm_id not in vm_index:
            unknown.add(f"vm {r.vm_id!r}")
        elif r.attribute_id not in attr_index:
            unknown.add(f"attribute {r.attribute_id!r}")
        else:
            cells[(r.vm_id, r.attribute_id)].append((r.repeat_index, float(r.value)))
    if unknown:
        raise SchemaError("runs reference unknown ids: " + ", ".join(sorted(unknown)))

    missing = [(v.id, a.id) for v in catalog.vms for a in catalog.attributes if (v.id, a.id) not in cells]
    if missing:
        raise MissingCellError(missing)

    values = np.empty((len(catalog.vms), len(catalog.attributes)))
    for (vm_id, attr_id), reps in cells.items():
        reps.sort()
        total = 0.0
        for _, x in reps:
            total += x
        values[vm_index[vm_id], attr_index[attr_id]] = total / len(reps)
    return MeasurementMatrix(catalog.vms, catalog.attributes, values)


def load_matrix(catalog_path, runs_path) -> MeasurementMatrix:
    catalog = load_catalog(catalog_path)
    return ingest_runs(catalog, read_runs(runs_path))
