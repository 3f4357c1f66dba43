"""Exact solver against brute force, plus table-level unit checks."""

import numpy as np
import pytest

from planarmrf import (
    Graph,
    InputError,
    MemoryBudgetError,
    MRFInstance,
    WidthCapError,
    brute_force_solve,
    build_grid_band,
    build_heuristic,
    evaluate,
    grid_graph,
    maxcut_gadget,
    solve_exact,
)
from planarmrf.exact import leaf_table
from planarmrf.graph import cycle_graph
from planarmrf.mrf import random_instance


def two_vertex_instance():
    g = Graph(2, [(0, 1)])
    phi = np.array([[0.0, 3.0], [1.0, 0.0]])
    psi = np.array([[[2.0, 0.0], [0.0, 4.0]]])
    return MRFInstance(g, 2, phi, psi)


def test_single_edge_best_pair():
    inst = two_vertex_instance()
    labels, score = solve_exact(inst, None)
    assert list(labels) == [2, 2]
    assert score == 3.0 + 0.0 + 4.0


def test_single_vertex_instance():
    g = Graph(1, [])
    inst = MRFInstance(g, 3, np.array([[5.0, 1.0, 9.0]]), np.zeros((0, 3, 3)))
    labels, score = solve_exact(inst, None)
    assert list(labels) == [3]
    assert score == 9.0


def test_edgeless_multi_vertex_rejected():
    g = Graph(2, [])
    inst = MRFInstance(g, 2, np.zeros((2, 2)), np.zeros((0, 2, 2)))
    with pytest.raises(InputError):
        solve_exact(inst, None)


def test_leaf_table_both_endpoints_boundary():
    inst = two_vertex_instance()
    values, _ = leaf_table(inst, 0, (0, 1))
    # L*L entries, code = label(0)*L + label(1), each phi+phi+psi
    expect = [0 + 1 + 2, 0 + 0 + 0, 3 + 1 + 0, 3 + 0 + 4]
    assert list(values) == expect


def test_leaf_table_one_endpoint_interior():
    inst = two_vertex_instance()
    values, choices = leaf_table(inst, 0, (0,))
    # maximize the hidden endpoint per boundary label
    assert list(values) == [max(3.0, 0.0), max(4.0, 7.0)]
    assert list(choices) == [0, 1]
    values, _ = leaf_table(inst, 0, (1,))
    assert list(values) == [max(3.0, 4.0), max(0.0, 7.0)]


def test_leaf_table_isolated_edge():
    inst = two_vertex_instance()
    values, choices = leaf_table(inst, 0, ())
    assert values.shape == (1,)
    assert values[0] == 7.0
    assert choices[0] == 1 * 2 + 1  # code of (2, 2) in 0-based digits


def test_path_with_equality_bonus_ties_to_all_ones():
    g = Graph(3, [(0, 1), (1, 2)])
    psi = np.stack([np.eye(2), np.eye(2)])
    inst = MRFInstance(g, 2, np.zeros((3, 2)), psi)
    labels, score = solve_exact(inst, build_heuristic(g))
    assert score == 2.0
    assert list(labels) == [1, 1, 1]


def test_path_of_three_edges_matches_oracle():
    rng = np.random.default_rng(8)
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    for _ in range(10):
        phi = rng.integers(0, 11, size=(4, 2)).astype(float)
        psi = rng.integers(0, 11, size=(3, 2, 2)).astype(float)
        inst = MRFInstance(g, 2, phi, psi)
        labels, score = solve_exact(inst, build_heuristic(g))
        _, oracle = brute_force_solve(inst)
        assert score == oracle
        assert evaluate(inst, labels) == score


def test_triangle_maxcut_via_heuristic_builder():
    inst = maxcut_gadget(cycle_graph(3))
    labels, score = solve_exact(inst, build_heuristic(inst.graph))
    _, oracle = brute_force_solve(inst)
    assert score == oracle == 2.0
    assert evaluate(inst, labels) == 2.0


def test_3x4_grid_seed_11_matches_oracle():
    inst = random_instance(3, 4, 3, 0, 10, 11, extra_edge_prob=1.0)
    labels, score = solve_exact(inst, build_heuristic(inst.graph))
    _, oracle = brute_force_solve(inst)
    assert score == oracle
    assert evaluate(inst, labels) == score


def test_matches_oracle_with_both_builders():
    """Seeded sweep of small instances, heuristic and band builders."""
    rng = np.random.default_rng(21)
    for _ in range(25):
        h = int(rng.integers(2, 4))
        w = int(rng.integers(2, 5))
        L = int(rng.integers(2, 4))
        inst = random_instance(h, w, L, 0, 10, int(rng.integers(0, 10**6)))
        _, oracle = brute_force_solve(inst)

        d1 = build_heuristic(inst.graph)
        labels1, score1 = solve_exact(inst, d1)
        assert score1 == oracle
        assert evaluate(inst, labels1) == oracle

        coords = np.asarray(inst.graph.grid_coords())
        # a large k makes the whole grid one band
        d2 = build_grid_band(inst.graph, coords, k=h + w)
        labels2, score2 = solve_exact(inst, d2)
        assert score2 == oracle
        assert evaluate(inst, labels2) == oracle


def test_negative_entries_are_handled_exactly():
    rng = np.random.default_rng(33)
    for _ in range(10):
        inst = random_instance(2, 4, 2, -10, 10, int(rng.integers(0, 10**6)))
        _, oracle = brute_force_solve(inst)
        labels, score = solve_exact(inst, build_heuristic(inst.graph))
        assert score == oracle
        assert evaluate(inst, labels) == score


def test_rooting_choice_never_changes_value():
    inst = random_instance(2, 3, 2, 0, 9, 77, extra_edge_prob=1.0)
    d = build_heuristic(inst.graph)
    _, oracle = brute_force_solve(inst)
    for te in range(len(d.tree_edges)):
        labels, score = solve_exact(inst, d, tree_edge=te)
        assert score == oracle
        assert evaluate(inst, labels) == oracle


def constrained_oracle(inst, fixed):
    """Brute force restricted to assignments honoring `fixed` (0-based
    vertex -> 1-based label)."""
    n = inst.graph.num_vertices
    L = inst.num_labels
    best = -np.inf
    best_labels = None
    for code in range(L**n):
        labels = []
        c = code
        for _ in range(n):
            labels.append(c % L + 1)
            c //= L
        if any(labels[v] != lab for v, lab in fixed.items()):
            continue
        val = evaluate(inst, labels)
        if val > best:
            best = val
            best_labels = labels
    return best_labels, best


def test_fixed_labels_condition_the_optimum():
    rng = np.random.default_rng(55)
    for _ in range(12):
        inst = random_instance(2, 3, 2, 0, 10, int(rng.integers(0, 10**6)))
        n = inst.graph.num_vertices
        count = int(rng.integers(1, 4))
        fixed = {
            int(v): int(rng.integers(1, 3))
            for v in rng.choice(n, size=count, replace=False)
        }
        labels, score = solve_exact(inst, build_heuristic(inst.graph), fixed=fixed)
        for v, lab in fixed.items():
            assert labels[v] == lab
        _, oracle = constrained_oracle(inst, fixed)
        assert score == pytest.approx(oracle)
        assert evaluate(inst, labels) == pytest.approx(score)


def test_fixed_labels_score_is_true_score():
    """Clamping must not leak sentinel mass into the reported score."""
    inst = random_instance(2, 2, 2, 0, 5, 3)
    labels, score = solve_exact(inst, build_heuristic(inst.graph), fixed={0: 2})
    assert score == evaluate(inst, labels)
    assert score >= 0.0


def test_fixed_label_validation():
    inst = random_instance(2, 2, 2, 0, 5, 3)
    d = build_heuristic(inst.graph)
    with pytest.raises(InputError):
        solve_exact(inst, d, fixed={99: 1})
    with pytest.raises(InputError):
        solve_exact(inst, d, fixed={0: 3})


def test_width_cap_is_enforced():
    inst = random_instance(4, 4, 2, 0, 5, 1, extra_edge_prob=1.0)
    d = build_heuristic(inst.graph)
    with pytest.raises(WidthCapError) as ei:
        solve_exact(inst, d, width_cap=1)
    assert ei.value.cap == 1
    assert ei.value.width is not None and ei.value.width > 1


def test_byte_budget_is_enforced():
    inst = random_instance(4, 4, 4, 0, 5, 2, extra_edge_prob=1.0)
    d = build_heuristic(inst.graph)
    with pytest.raises(MemoryBudgetError):
        solve_exact(inst, d, byte_budget=64)
