import math

import pytest

from lenspec import kernels
from lenspec.graphspace import MetricGraph
from lenspec.spaces import Circle, FlatTorus, RoundSphere


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # jit-compile every kernel once so acceptance timings measure the math
    kernels.warmup()


@pytest.fixture
def theta():
    return MetricGraph(["v1", "v2"],
                       [("v1", "v2", 1), ("v1", "v2", 1), ("v1", "v2", 1)])


@pytest.fixture
def doubled_square():
    edges = []
    for i in range(4):
        edges.append((f"v{i}", f"v{(i + 1) % 4}", 1))
        edges.append((f"v{i}", f"v{(i + 1) % 4}", 1))
    return MetricGraph([f"v{i}" for i in range(4)], edges)


@pytest.fixture
def loop_graph():
    return MetricGraph(["v"], [("v", "v", 1.0)])


@pytest.fixture
def circle_pi():
    return Circle(math.pi)


@pytest.fixture
def torus_half():
    return FlatTorus([math.pi, math.pi / 2])


@pytest.fixture
def sphere2():
    return RoundSphere(2)
