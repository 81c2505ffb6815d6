import numpy as np
import pytest

from vmrank._kernels import BACKENDS
from vmrank.catalog import (
    AGGREGATE_GROUPS,
    DEFAULT_CATALOG,
    DEFAULT_RUNS,
    SUB_GROUPS,
    AttributeDefinition,
    MeasurementMatrix,
    VMProfile,
    load_matrix,
)


def make_attributes(n, rng=None, directions=None, scalable=None):
    """n attributes cycling through the fine-grain sub-groups."""
    out = []
    for j in range(n):
        sub = SUB_GROUPS[j % len(SUB_GROUPS)]
        if directions is not None:
            d = directions[j]
        elif rng is not None:
            d = "higher_better" if rng.random() < 0.5 else "lower_better"
        else:
            d = "higher_better" if j % 2 else "lower_better"
        par = bool(scalable[j]) if scalable is not None else (sub.startswith("G3") and d == "higher_better")
        out.append(AttributeDefinition(f"a{j}", f"attribute {j}", sub.split("_")[0], sub, d, "u", par))
    return tuple(out)


def make_aggregate_attributes(directions):
    """One attribute per aggregate group."""
    return tuple(
        AttributeDefinition(f"a{j}", f"attribute {j}", g, f"{g}_1", d, "u", False)
        for j, (g, d) in enumerate(zip(AGGREGATE_GROUPS, directions))
    )


def make_vms(m, rng=None, costs=None, vcpus=None):
    out = []
    for i in range(m):
        c = costs[i] if costs is not None else float(rng.choice([0.25, 0.5, 1.0, 2.0])) if rng is not None else 1.0
        v = vcpus[i] if vcpus is not None else int(rng.choice([1, 2, 4, 8, 16])) if rng is not None else 4
        out.append(VMProfile(f"vm{i:02d}", v, 8.0, c))
    return tuple(out)


def random_matrix(rng, m, n, costs=None):
    attrs = make_attributes(n, rng)
    vms = make_vms(m, rng, costs=costs)
    values = rng.lognormal(0.0, 1.0, size=(m, n)) * rng.choice([1.0, 100.0, 1e4], size=n)
    return MeasurementMatrix(vms, attrs, values)


@pytest.fixture
def rng():
    return np.random.default_rng(20160731)


@pytest.fixture(scope="session")
def table1_matrix():
    return load_matrix(DEFAULT_CATALOG, DEFAULT_RUNS)


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param
