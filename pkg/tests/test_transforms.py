import pytest

from cliquespec import checks
from cliquespec.enumeration import build_extremal, class_G
from cliquespec.graph import blocks_and_cut_vertices, build_clique_tree, canonical_key, is_clique_tree
from cliquespec.spectral import spectral_radius, spectral_radius_value
from cliquespec.transforms import (
    PreconditionError,
    merge_blocks_case1,
    merge_blocks_case2,
    move_pendant_block,
    plan_merge,
    relocate_pendant_triangles,
    replay_to_fixpoint,
)
from cliquespec.zero_forcing import zero_forcing_number_exhaustive, zero_forcing_number_formula


def _z(g):
    return zero_forcing_number_formula(blocks_and_cut_vertices(g))


def test_relocate_k4_two_triangles():
    g, _ = build_clique_tree([4, 3, 3], [(0, 1), (0, 2)])
    h = relocate_pendant_triangles(g, [0, 1, 2, 3])
    assert spectral_radius_value(h) > spectral_radius_value(g) + 1e-9
    assert canonical_key(h) == canonical_key(build_extremal(8, 5))
    assert _z(h) == _z(g) == zero_forcing_number_exhaustive(h)[0]


def test_relocate_k5_three_triangles_gives_extremal_11_7():
    g, _ = build_clique_tree([5, 3, 3, 3], [(0, 1), (0, 2), (0, 3)])
    h = relocate_pendant_triangles(g, 0)
    assert canonical_key(h) == canonical_key(build_extremal(11, 7))
    assert spectral_radius_value(h) > spectral_radius_value(g)
    assert _z(h) == 7


def test_relocate_rejects_centralized_and_other_shapes():
    with pytest.raises(PreconditionError, match="single vertex"):
        relocate_pendant_triangles(build_extremal(9, 6), [0, 1, 2, 3, 4])
    g, _ = build_clique_tree([4, 4, 3], [(0, 1), (0, 2)])
    with pytest.raises(PreconditionError, match="pendant triangle"):
        relocate_pendant_triangles(g, [0, 1, 2, 3])


def test_merge1_k4_k4():
    g, _ = build_clique_tree([4, 4], [(0, 0)])
    h = merge_blocks_case1(g, 0, [0, 1, 2, 3], [0, 4, 5, 6], 1, 2, 4, 5)
    ct = blocks_and_cut_vertices(h)
    assert ct.block_sizes == [5, 3]
    assert (0, 1, 2) in ct.blocks
    assert _z(g) == _z(h) == 5
    assert zero_forcing_number_exhaustive(h)[0] == 5
    assert spectral_radius_value(h) > spectral_radius_value(g) + 1e-9


def test_merge1_k4_k5():
    g, _ = build_clique_tree([4, 5], [(0, 0)])
    plan = plan_merge(g, 0, [0, 1, 2, 3], [0, 4, 5, 6, 7])
    h = merge_blocks_case1(g, 0, plan["l_block"], plan["m_block"], plan["p"], plan["q"], plan["r"], plan["s"])
    assert blocks_and_cut_vertices(h).block_sizes == [6, 3]
    assert _z(g) == _z(h) == 6
    assert spectral_radius_value(h) > spectral_radius_value(g)


def test_merge1_requires_large_blocks():
    g, _ = build_clique_tree([3, 4], [(0, 0)])
    with pytest.raises(PreconditionError, match="at least 4"):
        merge_blocks_case1(g, 0, [0, 1, 2], [0, 3, 4, 5], 1, 2, 3, 4)


def test_merge1_rejects_wrong_ordering():
    # heavy pendant triangles on K_l make its vertices dominate those of K_m
    g, _ = build_clique_tree([4, 4, 3, 3, 3], [(0, 0), (0, 1), (0, 2), (0, 3)])
    x = spectral_radius(g).perron
    kl = [0, 1, 2, 3]
    km = [0, 4, 5, 6]
    p, q = sorted((u for u in kl if u != 0), key=lambda u: (x[u], u))[:2]
    assert max(x[4:7]) < min(x[1:4])
    with pytest.raises(PreconditionError, match="merge_blocks_case2"):
        merge_blocks_case1(g, 0, kl, km, p, q, 4, 5)


def _case2_instance():
    g, _ = build_clique_tree([5, 4, 3, 3, 3], [(0, 0), (1, 1), (1, 1), (1, 1)])
    x = spectral_radius(g).perron
    ct = blocks_and_cut_vertices(g)
    kl, km = ct.blocks[ct.block_of(range(5))], ct.blocks[ct.block_of([0, 5, 6, 7])]
    (p, q, r, s), *_ = checks.case2_options(x, 0, kl, km)
    return g, p, q, r, s


def test_merge2_dominant_vertex():
    g, p, q, r, s = _case2_instance()
    assert r == 5
    h = merge_blocks_case2(g, 0, p, q, r, s)
    ct = blocks_and_cut_vertices(h)
    assert (min(0, p, s), sorted([0, p, s])[1], max(0, p, s)) in ct.blocks
    assert sorted(ct.block_sizes) == [3, 3, 3, 3, 6]
    assert is_clique_tree(h, 3)
    assert _z(h) == _z(g)
    assert spectral_radius_value(h) > spectral_radius_value(g) + 1e-9


def test_merge2_rejects_symmetric():
    g, _ = build_clique_tree([4, 4], [(0, 0)])
    with pytest.raises(PreconditionError, match="strictly below"):
        merge_blocks_case2(g, 0, 1, 2, 4, 5)


def test_move_from_center_fails(bowtie):
    with pytest.raises(PreconditionError, match="need x_"):
        move_pendant_block(bowtie, [0, 3, 4], 0, 1)


def test_move_chain_to_star():
    chain, _ = build_clique_tree([3, 3, 3], [(0, 1), (1, 2)])
    ct = blocks_and_cut_vertices(chain)
    # cut vertices 1 and 4; move the block pendant at 4 onto 1
    h = move_pendant_block(chain, [4, 5, 6], 4, 1)
    assert canonical_key(h) == canonical_key(build_extremal(7, 4))
    assert spectral_radius_value(h) > spectral_radius_value(chain)
    assert _z(h) == _z(chain) == 7 - ct.b


def test_move_errors(example13):
    with pytest.raises(PreconditionError, match="not pendant"):
        move_pendant_block(example13, [0, 1, 2, 3], 0, 5)
    with pytest.raises(PreconditionError, match="outside"):
        move_pendant_block(example13, [0, 9, 10], 0, 9)


@pytest.mark.parametrize("rule", ["relocate", "merge1", "merge2", "move"])
def test_random_transform_suite(rule):
    res = checks.transform_suite(rule, trials=60, seed=11)
    assert res["ok"], res["failures"]


def test_replay_lands_on_extremal():
    for n, k in [(10, 6), (11, 7), (12, 8)]:
        target = canonical_key(build_extremal(n, k))
        for g in class_G(n, k):
            res = replay_to_fixpoint(g)
            assert res.final_key == target
            assert res.monotone
            assert _z(res.final) == k


def test_replay_rejects_non_clique_tree():
    from cliquespec.graph import Graph

    with pytest.raises(PreconditionError):
        replay_to_fixpoint(Graph.path(4))
