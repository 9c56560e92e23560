import math
import random

import pytest

from decoyrt import fixture
from decoyrt.graph import Instance, Interval, Node, NodeKind, build_graph
from decoyrt.instances import random_instance


@pytest.fixture
def f1():
    return fixture("F1")


@pytest.fixture
def chain4():
    return fixture("chain4")


@pytest.fixture
def f1_ids(f1):
    return f1.name_to_id()


def make_padded_disjoint(k: int, padding: int) -> Instance:
    """k vertex-disjoint three-hop routes plus inert blockable spurs.

    The spurs are decoy-eligible but sit on no attack path, so random search
    wastes budget on them while penalty-guided search does not.
    """
    nodes = [Node(0, "s", NodeKind.USER)]
    edges = []
    nid = 1
    for i in range(k):
        x, y = nid, nid + 1
        nid += 2
        nodes.append(Node(x, f"x{i}", NodeKind.COMPUTER))
        nodes.append(Node(y, f"y{i}", NodeKind.USER))
        edges += [(0, x), (x, y)]
    da = nid + padding
    for i in range(k):
        edges.append((2 + 2 * i, da))
    for j in range(padding):
        p = nid + j
        nodes.append(Node(p, f"pad{j}", NodeKind.OTHER))
        edges.append((0, p))
    nodes.append(Node(da, "DA", NodeKind.DOMAIN_ADMIN))
    graph = build_graph(nodes, edges, {}, Interval(1, 10))
    return Instance(
        graph=graph,
        entries=frozenset({0}),
        da=da,
        blockable=frozenset(range(1, da)),
        budget=math.ceil(1.5 * k),
        name=f"padded_disjoint_{k}_{padding}",
    )


def instance_stream(seed: int, **kwargs):
    """Endless deterministic stream of small random instances."""
    rng = random.Random(seed)
    while True:
        yield random_instance(rng, **kwargs)
