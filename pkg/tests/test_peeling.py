import numpy as np
import pytest

from nbldpc_cc.peeling import peel, sample_graph, scan, subspace_tables, transition


@pytest.mark.parametrize("p, count", [(1, 2), (2, 5), (3, 16), (4, 67)])
def test_subspace_counts(p, count):
    tab = subspace_tables(p)
    assert len(tab.masks) == count
    assert len(tab.maps) == np.prod([2**p - 2**i for i in range(p)])


def test_subspace_lattice():
    tab = subspace_tables(3)
    full = len(tab.masks) - 1
    for a in range(len(tab.masks)):
        assert tab.sum[a, tab.zero] == a and tab.inter[a, full] == a
        assert tab.dims[tab.sum[a, a]] == tab.dims[a]
    for k in range(len(tab.maps)):
        # a linear bijection preserves dimension and has an inverse in the table
        assert (tab.dims[tab.image[k]] == tab.dims).all()
        assert (tab.image[tab.inverse[k], tab.image[k]] == np.arange(len(tab.masks))).all()


def test_graph_degrees():
    e = sample_graph(100, 2, 4, np.random.default_rng(0))
    assert (np.bincount(e[:, 0]) == 2).all() and (np.bincount(e[:, 1]) == 4).all()


def test_extremes():
    assert peel(2000, 2, 4, 2, 0.0, rng=0).residual == 0.0
    assert peel(2000, 2, 4, 2, 1.0, rng=0).residual == 1.0


def test_transition_interpolates():
    from nbldpc_cc.peeling import PeelingResult

    # one of two graphs fails at 0.2, both at 0.3
    res = [PeelingResult(e, r, 1) for e, r in ((0.1, 0.0), (0.1, 0.0), (0.2, 0.0), (0.2, 0.5), (0.3, 0.5), (0.3, 0.5))]
    assert transition(res) == pytest.approx(0.2)
    res = [PeelingResult(0.1, 0.0, 1), PeelingResult(0.2, 0.0, 1), PeelingResult(0.3, 0.5, 1)]
    assert transition(res) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        transition(res[:2])


def test_gf4_transition_small_graphs():
    grid = np.arange(0.38, 0.441, 0.01)
    res = scan(grid, 20_000, 2, 4, 2, seed=3, graphs=4)
    assert abs(transition(res) - 0.4096) <= 0.015
