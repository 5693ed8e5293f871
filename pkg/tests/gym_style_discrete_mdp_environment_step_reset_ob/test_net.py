import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from acdgym.errors import InvalidTopologyError
from acdgym.net import NetworkState, Topology, compromised_count, make_linear_topology


def test_two_node_line():
    topo = make_linear_topology(2)
    np.testing.assert_array_equal(topo.adjacency, [[0, 1], [1, 0]])
    assert topo.entry_node == 0


def test_five_node_neighbours():
    assert set(make_linear_topology(5).neighbours(2)) == {1, 3}


def test_fifty_nodes_edge_count():
    topo = make_linear_topology(50)
    assert topo.edge_count == 49
    assert topo.entry_node == 0


@pytest.mark.parametrize("n", [-1, 0, 1])
def test_too_small(n):
    with pytest.raises(InvalidTopologyError):
        make_linear_topology(n)


@given(st.integers(2, 60))
def test_linear_topology_shape(n):
    topo = make_linear_topology(n)
    adj = np.asarray(topo.adjacency)
    assert (adj == adj.T).all()
    assert not np.diag(adj).any()
    assert topo.edge_count == n - 1
    for i in range(n):
        assert set(topo.neighbours(i)) == {j for j in (i - 1, i + 1) if 0 <= j < n}


def test_asymmetric_adjacency_rejected():
    with pytest.raises(InvalidTopologyError):
        Topology(2, np.array([[0, 1], [0, 0]], dtype=bool))


def test_self_loop_rejected():
    with pytest.raises(InvalidTopologyError):
        Topology(2, np.array([[1, 1], [1, 0]], dtype=bool))


def test_bad_entry_node_rejected():
    with pytest.raises(InvalidTopologyError):
        Topology(2, np.array([[0, 1], [1, 0]], dtype=bool), entry_node=2)


def test_compromised_count_examples():
    state = NetworkState.clean(make_linear_topology(4))
    assert compromised_count(state) == 0
    for i in (0, 1, 2):
        state.statuses[i].compromised = True
    assert compromised_count(state) == 3
    for s in state.statuses:
        s.compromised = True
    assert compromised_count(state) == 4


@given(st.integers(2, 20), st.data())
def test_count_moves_by_one(n, data):
    state = NetworkState.clean(make_linear_topology(n))
    flags = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    for s, f in zip(state.statuses, flags):
        s.compromised = f
    before = compromised_count(state)
    i = data.draw(st.integers(0, n - 1))
    was = state.statuses[i].compromised
    state.statuses[i].compromised = not was
    assert compromised_count(state) == before + (-1 if was else 1)


def test_vulnerability_defaults_to_one():
    state = NetworkState.clean(make_linear_topology(3))
    assert all(s.vulnerability == 1.0 for s in state.statuses)


def test_copy_is_independent():
    state = NetworkState.clean(make_linear_topology(3))
    other = state.copy()
    other.statuses[0].compromised = True
    assert compromised_count(state) == 0
