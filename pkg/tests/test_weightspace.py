import numpy as np
import pytest

from vmrank.catalog import MeasurementMatrix
from vmrank.ranking import rank, ranking_from_ranks
from vmrank.scoring import SUB_GROUPS, expand_weights, prepare, score
from vmrank.validation import hamming_score
from vmrank.weightspace import (
    WeightSpaceSpec,
    enumerate_weights,
    partitions,
    ranking_orders,
    score_curve,
    top_k_frequency,
)

from conftest import make_attributes, make_vms, random_matrix
import oracles


def test_aggregate_cardinality_and_order():
    vectors = list(enumerate_weights("aggregate"))
    assert len(vectors) == 1295 == WeightSpaceSpec("aggregate").cardinality
    assert vectors[0].values == (0, 0, 0, 1)
    assert vectors[-1].values == (5, 5, 5, 5)
    assert all(any(w.values) for w in vectors)
    assert [w.values for w in vectors] == sorted(w.values for w in vectors)


def test_fine_grain_cardinality():
    assert WeightSpaceSpec("fine_grain").cardinality == 1_679_615
    assert sum(1 for _ in enumerate_weights("fine_grain")) == 1_679_615


def test_weight_at_round_trip():
    spec = WeightSpaceSpec("fine_grain")
    for i, w in zip(range(1, 400), enumerate_weights(spec)):
        assert spec.weight_at(i) == w
        assert spec.index_of(w) == i
    with pytest.raises(IndexError):
        spec.weight_at(0)


@pytest.mark.parametrize("total, parts", [(1295, 1), (1295, 8), (10, 32), (1_679_615, 7)])
def test_partitions_cover_range(total, parts):
    blocks = partitions(total, parts)
    assert blocks[0][0] == 1 and blocks[-1][1] == total + 1
    assert all(a[1] == b[0] for a, b in zip(blocks, blocks[1:]))


def _small_fixture(rng, m=3, n=8):
    return random_matrix(rng, m, n, costs=[0.5, 0.5, 1.0][:m] + [1.0] * max(0, m - 3))


def _oracle_orders(matrix, kind, mode, execution="sequential"):
    if execution == "parallel":
        vals = []
        for i, v in enumerate(matrix.vms):
            vals.append([x * v.vcpus if a.parallel_scalable and a.direction == "higher_better" else x
                         for a, x in zip(matrix.attributes, matrix.values[i])])
    else:
        vals = matrix.values.tolist()
    key = (lambda a: a.aggregate_group) if kind == "aggregate" else (lambda a: a.sub_group)
    labels = ["G1", "G2", "G3", "G4"] if kind == "aggregate" else list(SUB_GROUPS)
    groups = [labels.index(key(a)) for a in matrix.attributes]
    costs = [v.cost_per_hour for v in matrix.vms]
    ids = [v.id for v in matrix.vms]
    out = []
    for w in enumerate_weights(kind):
        r = oracles.reference_ranks(vals, [a.direction for a in matrix.attributes], groups, w.values, costs, ids, mode)
        out.append(sorted(range(len(ids)), key=lambda i: r[i]))
    return np.array(out)


@pytest.mark.parametrize("mode", ["P", "PC"])
@pytest.mark.parametrize("execution", ["sequential", "parallel"])
def test_orders_match_oracle(rng, backend, mode, execution):
    mat = _small_fixture(rng, m=4)
    got = ranking_orders(mat, None, "aggregate", mode, execution, backend=backend)
    assert np.array_equal(got, _oracle_orders(mat, "aggregate", mode, execution))


def test_orders_match_library_ranking(rng, backend):
    mat = random_matrix(rng, 6, 20)
    spec = WeightSpaceSpec("fine_grain")
    start = 123_457
    got = ranking_orders(mat, None, spec, "PC", "parallel", start=start, stop=start + 300, backend=backend)
    norm = prepare(mat, "parallel")
    for r, row in enumerate(got):
        w = spec.weight_at(start + r)
        res = rank(score(norm, expand_weights(w, mat.attributes)), mat.vms, "PC", "parallel")
        assert [mat.vms[i].id for i in row] == res.order


def test_backends_agree_on_ties():
    # duplicated and mirrored columns create exact and near ties everywhere
    attrs = make_attributes(8, directions=["higher_better", "lower_better"] * 4)
    vms = make_vms(5, costs=[1.0, 1.0, 0.5, 0.5, 2.0])
    base = np.array([[1, 2, 3, 1], [3, 2, 1, 1], [2, 2, 2, 3], [1, 3, 2, 2], [3, 1, 2, 2]], dtype=float)
    mat = MeasurementMatrix(vms, attrs, np.hstack([base, base[:, ::-1]]))
    for mode in ("P", "PC"):
        a = ranking_orders(mat, None, "fine_grain", mode, backend="python")
        from vmrank._kernels import BACKENDS

        for name in BACKENDS:
            assert np.array_equal(a, ranking_orders(mat, None, "fine_grain", mode, backend=name))


def test_single_vm_counts():
    mat = MeasurementMatrix(make_vms(1), make_attributes(3), [[1.0, 2.0, 3.0]])
    for kind, card in (("aggregate", 1295), ("fine_grain", 1_679_615)):
        ft = top_k_frequency(mat, None, kind, "PC", "sequential", k=1)
        assert ft.counts.tolist() == [[card]]


def test_topk_matches_serial_oracle(rng, backend):
    mat = _small_fixture(rng)
    ft = top_k_frequency(mat, None, "aggregate", "P", "sequential", k=3, backend=backend)
    orders = _oracle_orders(mat, "aggregate", "P")
    expected = np.zeros((3, 3), dtype=np.int64)
    for row in orders:
        for pos in range(3):
            expected[row[pos], pos] += 1
    assert np.array_equal(ft.counts, expected)
    assert ft.counts.sum(axis=0).tolist() == [1295] * 3


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_topk_independent_of_workers(table1_matrix, backend, workers):
    a = top_k_frequency(table1_matrix, None, "aggregate", "PC", "parallel", 3, workers=1, backend=backend)
    b = top_k_frequency(table1_matrix, None, "aggregate", "PC", "parallel", 3, workers=workers, backend=backend)
    assert a.to_csv() == b.to_csv()


def test_topk_rejects_large_k(rng):
    with pytest.raises(ValueError, match="k must be"):
        top_k_frequency(_small_fixture(rng), None, "aggregate", k=4)


def test_frequency_outputs(table1_matrix):
    ft = top_k_frequency(table1_matrix, None, "aggregate", "P", "sequential", 3)
    lines = ft.to_csv().splitlines()
    assert lines[0] == "vm_id,rank_position,count"
    assert len(lines) == 1 + 3 * 11
    md = ft.to_markdown()
    assert "## Rank 1" in md and "1,295" in md
    best = max(ft.vm_ids, key=lambda v: ft.count(v, 1))
    first_row = md.split("## Rank 1")[1].split("\n")[4]
    assert first_row.startswith(f"| {best} |")


def test_score_curve_matches_brute_force(rng, backend):
    mat = _small_fixture(rng)
    emp = ranking_from_ranks({"vm00": 2, "vm01": 1, "vm02": 3})
    curve = score_curve(mat, None, "aggregate", "P", "sequential", emp, backend=backend)
    assert len(curve) == 1295
    orders = _oracle_orders(mat, "aggregate", "P")
    er = emp.ranks()
    brute = []
    for idx, row in enumerate(orders, start=1):
        cr = {mat.vms[i].id: p for p, i in enumerate(row, start=1)}
        brute.append((oracles.hamming(er, cr, 3), idx))
    brute.sort()
    assert [int(s) for s in curve.scores] == [s for s, _ in brute]
    assert [int(i) for i in curve.indices] == [i for _, i in brute]
    assert np.all(np.diff(curve.scores) >= 0) and curve.scores.min() >= 0


def test_score_curve_zero_for_achievable_ranking(table1_matrix, backend):
    spec = WeightSpaceSpec("aggregate")
    w = spec.weight_at(700)
    res = rank(score(prepare(table1_matrix, "sequential"), expand_weights(w, table1_matrix.attributes)),
               table1_matrix.vms, "P")
    curve = score_curve(table1_matrix, None, spec, "P", "sequential", res, backend=backend)
    assert curve.scores[0] == 0
    assert hamming_score(res, res) == 0
    assert any(int(i) == 700 for i, s in zip(curve.indices, curve.scores) if s == 0)


def test_score_curve_vm_set_mismatch(rng):
    with pytest.raises(ValueError, match="different VM set"):
        score_curve(_small_fixture(rng), None, "aggregate", "P", "sequential", ranking_from_ranks({"x": 1, "y": 2}))


def test_score_curve_csv(rng):
    mat = _small_fixture(rng)
    curve = score_curve(mat, None, "aggregate", "P", "sequential", ranking_from_ranks({"vm00": 1, "vm01": 2, "vm02": 3}))
    lines = curve.to_csv().splitlines()
    assert lines[0] == "weight_vector,score"
    assert len(lines) == 1296
    assert "min / median / max" in curve.to_markdown()


@pytest.mark.slow
def test_fine_grain_full_pass_backends_agree(table1_matrix):
    from vmrank._kernels import BACKENDS

    if len(BACKENDS) < 2:
        pytest.skip("compiled kernels not built")
    for mode in ("P", "PC"):
        a = top_k_frequency(table1_matrix, None, "fine_grain", mode, "parallel", 3, backend="python")
        b = top_k_frequency(table1_matrix, None, "fine_grain", mode, "parallel", 3, backend="cython")
        assert np.array_equal(a.counts, b.counts)
