import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

import oracles
from slekit.discrete import (BLUE, UNSET, YELLOW, HexColoring, LatticeGraph, PeanoDomain,
                             UnionFind, cycle_graph, dual_tree, grid_graph, harmonic_explorer,
                             harmonic_values, lerw, loop_erase, path_graph, peano_curve,
                             percolation_explore, primal_tree, random_walk, reveal_path,
                             run_harmonic_explorer, spanning_tree_count, wilson_ust)
from slekit.discrete.graphs import SpanningTree
from slekit.discrete.hexlattice import (DIRS, crossing_event_rect, crossing_events, explore,
                                        ring_cells)
from slekit.errors import DomainError
from slekit.montecarlo import ust_chi_square, ust_counts


def neighbours(cell):
    return [(cell[0] + dq, cell[1] + dr) for dq, dr in DIRS]


def check_path(path, coloring):
    """Blue on the right, yellow on the left, unit steps, no repeated edge."""
    for L, R in path.edges:
        assert coloring.get(*L) == YELLOW and coloring.get(*R) == BLUE
        assert R in neighbours(L)
    assert len(set(path.edges)) == len(path.edges)
    steps = np.abs(np.diff(path.vertices))
    assert np.allclose(steps, 1 / math.sqrt(3))


# percolation exploration

def test_all_blue_interior_hugs_yellow_arc():
    col = HexColoring.rhombus(3, 3, interior=np.full((3, 3), BLUE, dtype=np.int8))
    path = reveal_path(col)
    check_path(path, col)
    ring = set(ring_cells(3, 3))
    lefts = [L for L, _ in path.edges]
    assert all(L in ring and col.get(*L) == YELLOW for L in lefts)
    # every yellow ring hexagon touching the interior is passed on the left
    yellow_touching = {c for c in ring if col.get(*c) == YELLOW
                       and any(col.inside(*n) for n in neighbours(c))}
    assert set(lefts) == yellow_touching
    assert list(path.turns) == [1, -1, 1, -1, 1, -1, -1, 1, -1, 1, -1, 1]


def test_exploration_invariants_and_lazy_colouring():
    dom = HexColoring.rhombus(12, 12)
    for k in range(20):
        path, col = percolation_explore(dom, seed=4, index=k)
        check_path(path, col)
        touched = {c for e in path.edges for c in e}
        inner = col.interior()
        for q, r in np.argwhere(inner != UNSET):
            assert (q, r) in touched or any(n in touched for n in neighbours((q, r)))


def test_exploration_is_function_of_colouring():
    dom = HexColoring.rhombus(10, 8)
    for k in range(10):
        path, col = percolation_explore(dom, seed=7, index=k)
        rng = np.random.default_rng(k)
        full = col.copy()
        inner = full.interior()
        unset = inner == UNSET
        inner[unset] = rng.integers(0, 2, size=int(unset.sum()))
        again = reveal_path(full)
        assert np.array_equal(again.vertices, path.vertices)
        assert np.array_equal(again.turns, path.turns)


def test_exploration_deterministic_per_seed():
    dom = HexColoring.rhombus(8, 8)
    a = percolation_explore(dom, seed=3, index=2)[0]
    b = percolation_explore(dom, seed=3, index=2)[0]
    assert np.array_equal(a.vertices, b.vertices)


def test_colour_swap_reflection_symmetry():
    # on the W x W rhombus, swapping q and r is a reflection that exchanges
    # the blue and yellow arcs, so the turn sequence law is symmetric
    dom = HexColoring.rhombus(6, 6)
    n, depth = 10_000, 8
    turns = np.zeros((n, depth))
    for k in range(n):
        t = percolation_explore(dom, seed=11, index=k)[0].turns[:depth]
        turns[k, :len(t)] = t
    left = (turns == 1).mean(axis=0)
    right = (turns == -1).mean(axis=0)
    se = np.sqrt((left + right) / n)
    assert np.all(np.abs(left - right) <= 3 * se + 1e-12)


def test_one_hexagon_strip_is_forced():
    dom = HexColoring.rhombus(5, 0)
    paths = [percolation_explore(dom, seed=s)[0] for s in range(10)]
    assert all(np.array_equal(p.vertices, paths[0].vertices) for p in paths)
    assert len(paths[0]) > 0


def test_malformed_boundary():
    ring = ring_cells(3, 3)
    colours = [BLUE, YELLOW] * (len(ring) // 2)
    with pytest.raises(DomainError):
        HexColoring.rhombus(3, 3, ring_colors=colours)
    with pytest.raises(DomainError):
        HexColoring.rhombus(3, 3, ring_colors=[BLUE] * len(ring))


def test_explore_rejects_bad_colour():
    with pytest.raises(DomainError):
        explore(HexColoring.rhombus(3, 3), lambda cell: 7)


# crossings

def test_crossing_all_blue():
    assert crossing_event_rect(0.5, 16, seed=0, p_blue=1.0)
    assert not crossing_event_rect(0.5, 16, seed=0, p_blue=0.0)
    with pytest.raises(DomainError):
        crossing_event_rect(0.5, 4, seed=0)


def test_crossing_monotone_in_xi():
    n = 3000
    lo = crossing_events(0.2, 24, seed=5, start=0, count=n).mean()
    hi = crossing_events(0.8, 24, seed=5, start=0, count=n).mean()
    se = math.sqrt(lo * (1 - lo) / n + hi * (1 - hi) / n)
    assert lo - hi > 3 * se


def test_crossing_batches_match_single_events():
    batch = crossing_events(0.4, 16, seed=9, start=3, count=20)
    single = [crossing_event_rect(0.4, 16, seed=9, index=3 + k) for k in range(20)]
    assert list(batch) == single


# harmonic explorer

def test_harmonic_single_hexagon_is_mean():
    ring = ring_cells(1, 1)
    colours = [BLUE, BLUE, BLUE, BLUE, YELLOW, YELLOW]
    col = HexColoring.rhombus(1, 1, ring_colors=colours)
    f = harmonic_values(col)
    nb = [col.get(*c) for c in neighbours((0, 0))]
    assert f[0, 0] == pytest.approx(np.mean(nb), abs=1e-14)
    assert f[0, 0] == pytest.approx(4 / 6, abs=1e-14)
    assert len(ring) == 6


def test_harmonic_two_hexagons_against_linear_solve():
    col = HexColoring.rhombus(2, 1)
    f = harmonic_values(col)
    colours = {c: col.get(*c) for c in ring_cells(2, 1)}
    ref = oracles.harmonic_linear_solve(colours, [(0, 0), (1, 0)])
    assert f[0, 0] == pytest.approx(ref[(0, 0)], abs=1e-10)
    assert f[1, 0] == pytest.approx(ref[(1, 0)], abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_harmonic_partial_colouring_against_linear_solve(W, H, s):
    rng = np.random.default_rng(s)
    inner = rng.choice([UNSET, BLUE, YELLOW], size=(W, H)).astype(np.int8)
    col = HexColoring.rhombus(W, H, interior=inner)
    f = harmonic_values(col)
    colours = {c: col.get(*c) for c in ring_cells(W, H)}
    colours.update({(q, r): int(inner[q, r]) for q in range(W) for r in range(H)
                    if inner[q, r] != UNSET})
    unknown = [(q, r) for q in range(W) for r in range(H) if inner[q, r] == UNSET]
    if not unknown:
        return
    ref = oracles.harmonic_linear_solve(colours, unknown)
    for c in unknown:
        assert f[c] == pytest.approx(ref[c], abs=1e-10)
    assert np.all((f >= -1e-12) & (f <= 1 + 1e-12))


def test_harmonic_explorer_on_blue_interior_is_forced():
    col = HexColoring.rhombus(4, 4, interior=np.full((4, 4), BLUE, dtype=np.int8))
    path = harmonic_explorer(col, seed=1)
    assert np.array_equal(path.vertices, reveal_path(col).vertices)


def test_harmonic_explorer_path_invariants():
    dom = HexColoring.rhombus(8, 8)
    for k in range(5):
        path, col, _ = run_harmonic_explorer(dom, seed=2, index=k)
        check_path(path, col)


def test_harmonic_explorer_martingale():
    dom = HexColoring.rhombus(3, 3)
    cell = (1, 1)
    n = 10_000
    drift = np.empty(n)
    for k in range(n):
        _, _, hist = run_harmonic_explorer(dom, seed=6, index=k, record=[cell])
        drift[k] = hist[cell][-1] - hist[cell][0]
    se = drift.std(ddof=1) / math.sqrt(n)
    assert abs(drift.mean()) <= 3 * se


# loop erasure

@pytest.mark.parametrize("walk,expected", [
    ((0, 1, 2), [0, 1, 2]),
    ((0, 1, 0, 2), [0, 2]),
    ((0, 1, 0, 1, 2), [0, 1, 2]),
])
def test_loop_erase_examples(walk, expected):
    assert loop_erase(walk, {2}) == expected


def test_loop_erase_stops_at_first_hit():
    assert loop_erase([0, 1, 2, 1, 3], {2, 3}) == [0, 1, 2]
    with pytest.raises(DomainError):
        loop_erase([0, 1, 0], {5})


walks = st.lists(st.integers(0, 6), min_size=1, max_size=60).map(lambda w: w + [9])


@settings(max_examples=300, deadline=None)
@given(walks)
def test_loop_erase_simple_and_idempotent(w):
    out = loop_erase(w, {9})
    assert len(set(out)) == len(out)
    assert out[0] == w[0] and out[-1] == 9
    assert loop_erase(out, {9}) == out
    # each kept step is a step of the walk
    pairs = set(zip(w, w[1:]))
    assert all(p in pairs for p in zip(out, out[1:]))


# LERW

def test_lerw_path_graph():
    g = path_graph(3)
    assert all(lerw(g, 0, {2}, seed=s) == [0, 1, 2] for s in range(20))
    assert lerw(path_graph(2), 0, {1}, seed=0) == [0, 1]
    with pytest.raises(DomainError):
        lerw(g, 0, set(), seed=0)


def test_lerw_equals_erased_walk():
    g = grid_graph(6, 6)
    for k in range(20):
        walk = random_walk(g, 14, {0, 35}, seed=3, index=k)
        assert lerw(g, 14, {0, 35}, seed=3, index=k) == loop_erase(list(walk), {0, 35})


def test_lerw_triangle_law():
    g = LatticeGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    law = oracles.lerw_law({0: [1, 2], 1: [0, 2], 2: [0, 1]}, 0, {2})
    assert law[(0, 2)] == pytest.approx(oracles.FROZEN_LERW_TRIANGLE_DIRECT, abs=1e-12)
    n = 100_000
    counts = Counter(tuple(lerw(g, 0, {2}, seed=12, index=k)) for k in range(n))
    for path, p in law.items():
        se = math.sqrt(p * (1 - p) / n)
        assert abs(counts[path] / n - p) <= 3 * se


def test_lerw_law_on_grid_against_oracle():
    g = grid_graph(3, 2)
    adj = {v: [int(w) for w in g.neighbors(v)] for v in range(6)}
    law = oracles.lerw_law(adj, 0, {5})
    n = 20_000
    counts = Counter(tuple(lerw(g, 0, {5}, seed=13, index=k)) for k in range(n))
    assert set(counts) <= set(law)
    obs = np.array([counts[p] for p in law], dtype=float)
    exp = n * np.array(list(law.values()))
    assert stats.chisquare(obs, exp).pvalue > 1e-3


# Wilson's algorithm

def test_wilson_on_a_tree():
    g = LatticeGraph.from_edges(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    for s in range(10):
        t = wilson_ust(g, seed=s)
        t.check(g)
        assert t.edge_set() == frozenset(g.edges())


def test_wilson_disconnected():
    with pytest.raises(DomainError):
        wilson_ust(LatticeGraph.from_edges(4, [(0, 1), (2, 3)]), seed=0)


def test_tree_counts_against_enumeration():
    c4 = cycle_graph(4)
    g23 = grid_graph(3, 2)
    assert spanning_tree_count(c4) == oracles.FROZEN_TREE_COUNTS["C4"]
    assert spanning_tree_count(g23) == oracles.FROZEN_TREE_COUNTS["grid2x3"]
    assert len(oracles.brute_spanning_trees(4, c4.edges())) == 4
    assert len(oracles.brute_spanning_trees(6, g23.edges())) == 15


def test_wilson_c4_uniform():
    n = 100_000
    counts = ust_counts(cycle_graph(4), n, seed=14)
    assert len(counts) == 4
    se = math.sqrt(0.25 * 0.75 / n)
    assert all(abs(c / n - 0.25) <= 3 * se for c in counts.values())


def test_wilson_grid_2x3_chi_square():
    g = grid_graph(3, 2)
    chi2, p, seen, total = ust_chi_square(g, 30_000, seed=15)
    assert seen == total == 15
    assert p > 1e-3


def test_wilson_trees_are_spanning():
    g = grid_graph(7, 5)
    for k in range(50):
        wilson_ust(g, seed=17, index=k, root=k % 35).check(g)


def test_lerw_ust_consistency_c4():
    g = cycle_graph(4)
    n = 50_000
    tree_edges = Counter()
    walk_edges = Counter()
    for k in range(n):
        t = wilson_ust(g, seed=18, index=k)
        p = t.path(0, 2)
        tree_edges.update(tuple(sorted(e)) for e in zip(p, p[1:]))
        w = lerw(g, 0, {2}, seed=19, index=k)
        walk_edges.update(tuple(sorted(e)) for e in zip(w, w[1:]))
    for e in g.edges():
        a, b = tree_edges[e] / n, walk_edges[e] / n
        se = math.sqrt(a * (1 - a) / n + b * (1 - b) / n)
        assert abs(a - b) <= 3 * se


def test_union_find():
    uf = UnionFind(5)
    assert uf.union(0, 1) and uf.union(3, 4)
    assert not uf.union(1, 0)
    assert uf.connected(0, 1) and not uf.connected(1, 3)


# Peano curve

def _all_trees(dom):
    g = dom.primal
    out = []
    for sub in oracles.brute_spanning_trees(g.n_vertices, g.edges()):
        parent = primal_tree_from_edges(g.n_vertices, sub, dom.R)
        out.append(parent)
    return out


def primal_tree_from_edges(n, edges, root):
    adj = {v: [] for v in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    parent = [-1] * n
    parent[root] = root
    stack = [root]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if parent[w] < 0:
                parent[w] = v
                stack.append(w)
    return SpanningTree(np.array(parent))


def test_peano_one_cell_s_shape():
    dom = PeanoDomain(1, 1)
    # top edge and right edge in the tree; hand-traced route around it
    tree = primal_tree_from_edges(3, [(0, 1), (1, 2)], dom.R)
    pts = peano_curve(dom, tree).points
    expected = [(-1, 1), (1, 1), (3, 1), (3, 3), (1, 3), (-1, 3),
                (-1, 5), (1, 5), (3, 5), (5, 5), (5, 3), (5, 1)]
    assert np.allclose(pts, [complex(x, y) / 4 for x, y in expected])


@pytest.mark.parametrize("nx,ny", [(1, 1), (2, 1), (2, 2), (3, 2)])
def test_peano_fills_domain_for_every_tree(nx, ny):
    dom = PeanoDomain(nx, ny)
    trees = _all_trees(dom)
    assert len(trees) == spanning_tree_count(dom.primal)
    n_pts = (2 * nx + 2) * (2 * ny + 1)
    for t in trees:
        pts = peano_curve(dom, t).points
        assert len(pts) == n_pts
        assert len(set(pts.tolist())) == n_pts
        assert np.allclose(np.abs(np.diff(pts)), 0.5)
        assert pts[0] == dom.start and pts[-1] == dom.end


def test_dual_involution():
    for nx, ny in [(2, 2), (4, 3), (6, 5)]:
        dom = PeanoDomain(nx, ny)
        for k in range(10):
            t = wilson_ust(dom.primal, seed=20, index=k, root=dom.R)
            d = dual_tree(dom, t)
            assert len(d.edges()) == dom.X
            back = primal_tree(dom, d)
            assert back.edge_set() == t.edge_set()


def test_peano_random_trees_fill():
    dom = PeanoDomain(12, 8)
    for k in range(10):
        t = wilson_ust(dom.primal, seed=21, index=k, root=dom.R)
        pts = peano_curve(dom, t, delta=0.5).points
        assert len(pts) == (2 * 12 + 2) * (2 * 8 + 1)
        assert np.allclose(np.abs(np.diff(pts)), 0.25)


def test_peano_rejects_non_tree():
    dom = PeanoDomain(2, 2)
    bad = SpanningTree(np.arange(dom.R + 1))
    with pytest.raises(DomainError):
        peano_curve(dom, bad)
