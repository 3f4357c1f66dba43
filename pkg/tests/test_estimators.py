"""Estimator wrappers: parameter plumbing and fitted attributes."""

import numpy as np
import pytest
from sklearn.base import clone

from planarmrf import (
    CCEdge,
    CCInstance,
    CorrelationClusterer,
    ExactMapSolver,
    InputError,
    PlanarMapPTAS,
    StereoMatcher,
    brute_force_solve,
    evaluate,
    scene_fixture,
)
from planarmrf.mrf import random_instance
from planarmrf.reductions import best_clustering_exhaustive


def test_ptas_estimator_fit_predict():
    inst = random_instance(3, 4, 2, 0, 10, 0)
    est = PlanarMapPTAS(epsilon=0.5)
    labels = est.fit_predict(inst)
    assert np.array_equal(labels, est.labels_)
    assert est.score_ == pytest.approx(evaluate(inst, labels))
    assert est.diagnostics_.k == 2
    _, opt = brute_force_solve(inst)
    assert est.score_ >= 0.5 * opt - 1e-9


def test_ptas_estimator_rejects_non_instances():
    with pytest.raises(InputError):
        PlanarMapPTAS().fit(np.zeros((3, 3)))


def test_estimators_clone_with_params():
    est = PlanarMapPTAS(epsilon=0.25, workers=2)
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    twin.set_params(epsilon=0.5)
    assert twin.epsilon == 0.5
    assert est.epsilon == 0.25


def test_exact_estimator_matches_oracle():
    inst = random_instance(2, 3, 2, -4, 9, 3)
    est = ExactMapSolver()
    labels = est.fit_predict(inst)
    _, opt = brute_force_solve(inst)
    assert est.score_ == opt
    assert evaluate(inst, labels) == opt


def test_clusterer_reaches_exhaustive_optimum_on_toy():
    cc = CCInstance(
        num_vertices=3,
        edges=[CCEdge(0, 1, 1, 1.0), CCEdge(1, 2, 1, 1.0), CCEdge(0, 2, 1, 1.0)],
    )
    est = CorrelationClusterer()
    clusters = est.fit_predict(cc)
    _, best = best_clustering_exhaustive(cc)
    assert est.value_ == best
    assert len(set(clusters.tolist())) == 3


def test_stereo_matcher_returns_label_grid():
    left, right, truth = scene_fixture(8, 16, 4, seed=1)
    est = StereoMatcher(num_labels=4)
    grid = est.predict((left, right))
    assert grid.shape == truth.shape
    assert grid.min() >= 1 and grid.max() <= 4
    assert est.score_ > 0.0
