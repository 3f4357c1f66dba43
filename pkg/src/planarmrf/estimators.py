"""scikit-learn style wrappers around the solvers.

These follow the clustering-estimator convention: hyperparameters in
__init__, `fit(X)` runs the solve and stores trailing-underscore
results, `fit_predict` returns the labels. They exist so the solvers
compose with get_params/set_params/clone; the functional API underneath
is the primary surface.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .branch import build_heuristic
from .errors import InputError
from .exact import DEFAULT_WIDTH_CAP, solve_exact
from .mrf import MRFInstance
from .ptas import PtasConfig, solve_ptas
from .reductions import cc_to_mrf, cc_value, labels_to_clustering
from .vision import StereoParams, solve_stereo


def _check_instance(X):
    if not isinstance(X, MRFInstance):
        raise InputError(f"expected an MRFInstance, got {type(X).__name__}")
    return X


class PlanarMapPTAS(BaseEstimator):
    """Approximate MAP labeling with a (1 - epsilon) score guarantee."""

    def __init__(self, epsilon=0.5, root=None, width_cap=DEFAULT_WIDTH_CAP, workers=1):
        self.epsilon = epsilon
        self.root = root
        self.width_cap = width_cap
        self.workers = workers

    def fit(self, X, y=None):
        instance = _check_instance(X)
        cfg = PtasConfig(
            epsilon=self.epsilon,
            root=self.root,
            width_cap=self.width_cap,
            workers=self.workers,
        )
        self.labels_, self.score_, self.diagnostics_ = solve_ptas(instance, cfg)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class ExactMapSolver(BaseEstimator):
    """Exact MAP labeling over a branch decomposition."""

    def __init__(self, width_cap=DEFAULT_WIDTH_CAP):
        self.width_cap = width_cap

    def fit(self, X, y=None, decomposition=None):
        instance = _check_instance(X)
        if decomposition is None and instance.graph.num_edges > 1:
            decomposition = build_heuristic(instance.graph)
        self.labels_, self.score_ = solve_exact(
            instance, decomposition, self.width_cap
        )
        return self

    def fit_predict(self, X, y=None, decomposition=None):
        return self.fit(X, decomposition=decomposition).labels_


class CorrelationClusterer(BaseEstimator):
    """Agreement-maximizing clustering through the four-label reduction."""

    def __init__(self, epsilon=1.0 / 3.0, root=None, width_cap=DEFAULT_WIDTH_CAP, workers=1):
        self.epsilon = epsilon
        self.root = root
        self.width_cap = width_cap
        self.workers = workers

    def fit(self, X, y=None):
        cfg = PtasConfig(
            epsilon=self.epsilon,
            root=self.root,
            width_cap=self.width_cap,
            workers=self.workers,
        )
        mrf = cc_to_mrf(X)
        mrf_labels, _, self.diagnostics_ = solve_ptas(mrf, cfg)
        self.labels_ = labels_to_clustering(X, mrf_labels)
        self.value_ = cc_value(X, self.labels_)
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).labels_


class StereoMatcher(BaseEstimator):
    """Disparity labeling for a rectified stereo pair.

    X is a (left, right) pair of uint8 (h, w, 3) arrays; predict
    returns the 1-based label grid (label i = shift i-1).
    """

    def __init__(
        self,
        num_labels=4,
        epsilon=1.0 / 3.0,
        beta=None,
        two_pass=True,
        smooth_radius=1,
        root=None,
        width_cap=DEFAULT_WIDTH_CAP,
        workers=1,
    ):
        self.num_labels = num_labels
        self.epsilon = epsilon
        self.beta = beta
        self.two_pass = two_pass
        self.smooth_radius = smooth_radius
        self.root = root
        self.width_cap = width_cap
        self.workers = workers

    def fit(self, X, y=None):
        left, right = X
        params = StereoParams(
            num_labels=self.num_labels,
            beta=self.beta,
            two_pass=self.two_pass,
            smooth_radius=self.smooth_radius,
        )
        self.labels_, self.score_, self.diagnostics_ = solve_stereo(
            np.asarray(left),
            np.asarray(right),
            params,
            epsilon=self.epsilon,
            root=self.root,
            width_cap=self.width_cap,
            workers=self.workers,
        )
        return self

    def predict(self, X):
        return self.fit(X).labels_
