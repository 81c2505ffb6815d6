import json
import math
import random

import numpy as np
import pytest

from vmrank.catalog import (
    DEFAULT_CATALOG,
    CatalogError,
    MeasurementRun,
    MissingCellError,
    SchemaError,
    ingest_runs,
    load_catalog,
    read_runs,
    save_catalog,
    write_runs,
)

from conftest import make_attributes, make_vms


def _catalog_dict():
    return json.loads(DEFAULT_CATALOG.read_text())


def _write(tmp_path, data, name="c.catalog"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_bundled_catalog_matches_table1():
    cat = load_catalog(DEFAULT_CATALOG)
    assert len(cat.vms) == 11
    m1 = cat.vm("m1.xlarge")
    assert m1.vcpus == 4
    assert m1.cost_per_hour == pytest.approx(0.480)
    assert m1.memory_gib == 15.0
    assert cat.vm("cc2.8xlarge").vcpus == 32
    assert cat.vm("hs1.8xlarge").cost_per_hour == 4.6
    assert [v.id for v in cat.vms][:3] == ["m1.xlarge", "m2.xlarge", "m2.2xlarge"]


def test_bundled_catalog_direction_flags():
    cat = load_catalog(DEFAULT_CATALOG)
    for a in cat.attributes:
        if a.sub_group in ("G1_1", "G1_2", "G2_1"):
            assert a.direction == "lower_better", a.id
        if a.sub_group in ("G2_2", "G4_1", "G4_2"):
            assert a.direction == "higher_better", a.id
        if a.parallel_scalable:
            assert a.aggregate_group == "G3" and a.direction == "higher_better"
    assert {a.sub_group for a in cat.attributes} == {
        "G1_1", "G1_2", "G2_1", "G2_2", "G3_1", "G3_2", "G4_1", "G4_2"
    }


def test_duplicate_attribute_id_rejected(tmp_path):
    data = _catalog_dict()
    data["attributes"].append(dict(data["attributes"][0]))
    with pytest.raises(SchemaError, match="duplicate attribute id"):
        load_catalog(_write(tmp_path, data))


def test_sub_group_outside_aggregate_rejected(tmp_path):
    data = _catalog_dict()
    data["attributes"][0].update(aggregate_group="G3", sub_group="G1_2")
    with pytest.raises(SchemaError, match="not part of G3"):
        load_catalog(_write(tmp_path, data))


@pytest.mark.parametrize(
    "patch, match",
    [
        ({"cost_per_hour": 0}, "cost_per_hour"),
        ({"cost_per_hour": -1.0}, "cost_per_hour"),
        ({"vcpus": 0}, "vcpus"),
        ({"vcpus": 2.5}, "vcpus"),
    ],
)
def test_bad_vm_rejected(tmp_path, patch, match):
    data = _catalog_dict()
    data["vms"][0].update(patch)
    with pytest.raises(SchemaError, match=match):
        load_catalog(_write(tmp_path, data))


def test_unknown_group_and_field_rejected(tmp_path):
    data = _catalog_dict()
    data["attributes"][0]["aggregate_group"] = "G9"
    with pytest.raises(SchemaError, match="unknown aggregate_group"):
        load_catalog(_write(tmp_path, data))
    data = _catalog_dict()
    data["vms"][0]["colour"] = "red"
    with pytest.raises(SchemaError, match="unknown field"):
        load_catalog(_write(tmp_path, data))


def test_malformed_json_is_parse_error(tmp_path):
    p = tmp_path / "bad.catalog"
    p.write_text("{not json")
    with pytest.raises(CatalogError, match="parse error"):
        load_catalog(p)


def test_catalog_round_trip(tmp_path):
    cat = load_catalog(DEFAULT_CATALOG)
    out = tmp_path / "copy.catalog"
    save_catalog(cat, out)
    assert load_catalog(out) == cat


def _catalog(m=3, n=2):
    from vmrank.catalog import Catalog

    return Catalog(make_attributes(n), make_vms(m))


def test_mean_of_two_repeats():
    cat = _catalog(1, 1)
    vm, attr = cat.vms[0].id, cat.attributes[0].id
    mat = ingest_runs(cat, [MeasurementRun(vm, attr, 0, 10.0), MeasurementRun(vm, attr, 1, 14.0)])
    assert mat.values[0, 0] == 12.0


def test_single_run_is_identity():
    cat = _catalog(3, 2)
    raw = np.arange(6, dtype=float).reshape(3, 2) + 0.5
    runs = [MeasurementRun(v.id, a.id, 0, raw[i, j]) for i, v in enumerate(cat.vms) for j, a in enumerate(cat.attributes)]
    assert np.array_equal(ingest_runs(cat, runs).values, raw)


def test_mean_matches_resummation_oracle(rng):
    cat = _catalog(3, 2)
    runs, expected = [], {}
    for v in cat.vms:
        for a in cat.attributes:
            vals = rng.uniform(0, 1000, size=8)
            expected[(v.id, a.id)] = math.fsum(vals) / 8
            runs += [MeasurementRun(v.id, a.id, r, float(x)) for r, x in enumerate(vals)]
    mat = ingest_runs(cat, runs)
    for i, v in enumerate(cat.vms):
        for j, a in enumerate(cat.attributes):
            assert mat.values[i, j] == pytest.approx(expected[(v.id, a.id)], rel=1e-12)


def test_ingest_is_permutation_invariant(rng):
    cat = _catalog(4, 3)
    runs = [
        MeasurementRun(v.id, a.id, r, float(rng.uniform(0, 1e6)))
        for v in cat.vms for a in cat.attributes for r in range(8)
    ]
    base = ingest_runs(cat, runs).values
    shuffled = list(runs)
    for seed in range(5):
        random.Random(seed).shuffle(shuffled)
        assert np.array_equal(ingest_runs(cat, shuffled).values, base)


def test_missing_cell_lists_pairs():
    cat = _catalog(2, 2)
    runs = [MeasurementRun(cat.vms[0].id, a.id, 0, 1.0) for a in cat.attributes]
    with pytest.raises(MissingCellError) as info:
        ingest_runs(cat, runs)
    assert info.value.missing == [(cat.vms[1].id, a.id) for a in cat.attributes]
    assert cat.vms[1].id in str(info.value)


def test_unknown_ids_rejected():
    cat = _catalog(1, 1)
    with pytest.raises(SchemaError, match="unknown ids"):
        ingest_runs(cat, [MeasurementRun("nope", cat.attributes[0].id, 0, 1.0)])


def test_runs_csv_round_trip(tmp_path):
    runs = [MeasurementRun("a", "x", 0, 1.25), MeasurementRun("a", "x", 1, 3.0)]
    p = tmp_path / "runs.csv"
    write_runs(runs, p)
    assert p.read_text().splitlines()[0] == "vm_id,attribute_id,repeat_index,value"
    assert read_runs(p) == runs


def test_runs_csv_bad_header(tmp_path):
    p = tmp_path / "runs.csv"
    p.write_text("vm,attr,rep,val\n")
    with pytest.raises(CatalogError, match="expected header"):
        read_runs(p)
