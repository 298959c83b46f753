"""scikit-learn compatible wrappers around the field optimizer.

``FieldOptimizer`` maps rows of ``(tr0_in_t1, alpha)`` to the optimal
operating point, so scenario grids can flow through pipelines and
``get_params``/``set_params`` tooling. ``SNRtCurveModel`` predicts the
normalized SNR per unit time for an array of field scale factors.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import InvalidParameterError
from .optimize import (
    DEFAULT_F_MAX,
    DEFAULT_GRID,
    DEFAULT_TOL,
    ScanScenario,
    find_optimal_field,
    snr_t_max_sar,
)

OUTPUT_COLUMNS = ("f_opt", "tr_e_opt_in_tr0", "snr_gain")


def _check_scenarios(X):
    X = check_array(X, dtype=np.float64, ensure_min_samples=1)
    if X.shape[1] != 2:
        raise InvalidParameterError(
            f"expected 2 columns (tr0_in_t1, alpha), got {X.shape[1]}")
    if np.any(X[:, 0] <= 0):
        raise InvalidParameterError("tr0_in_t1 must be > 0")
    if np.any((X[:, 1] < 0) | (X[:, 1] > 2)):
        raise InvalidParameterError("alpha must lie in [0, 2]")
    return X


class FieldOptimizer(TransformerMixin, BaseEstimator):
    """Transform scenario rows ``(tr0_in_t1, alpha)`` into optimal points.

    ``transform`` returns columns ``f_opt, tr_e_opt_in_tr0, snr_gain``.
    Nothing is learned from data; ``fit`` validates the input and records
    the optima of the training rows in ``results_``.
    """

    def __init__(self, f_max=DEFAULT_F_MAX, tol=DEFAULT_TOL, f_min=1.0, n_grid=DEFAULT_GRID):
        self.f_max = f_max
        self.tol = tol
        self.f_min = f_min
        self.n_grid = n_grid

    def _solve(self, X):
        return [
            find_optimal_field(ScanScenario.from_ratio(tr0, alpha), f_max=self.f_max,
                               tol=self.tol, f_min=self.f_min, n_grid=self.n_grid)
            for tr0, alpha in X
        ]

    def fit(self, X, y=None):
        X = _check_scenarios(X)
        self.n_features_in_ = X.shape[1]
        self.results_ = self._solve(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "results_")
        X = _check_scenarios(X)
        return np.array([[getattr(r, c) for c in OUTPUT_COLUMNS] for r in self._solve(X)])

    def get_feature_names_out(self, input_features=None):
        return np.array(OUTPUT_COLUMNS, dtype=object)


class SNRtCurveModel(RegressorMixin, BaseEstimator):
    """Normalized SNR per unit time as a function of the field scale factor.

    ``X`` is a single column of scale factors. ``fit`` stores the scenario
    and the optimum over ``[f_min, f_max]``; ``predict`` evaluates the curve.
    """

    def __init__(self, tr0_in_t1=0.4, alpha=0.0, f_max=DEFAULT_F_MAX, tol=DEFAULT_TOL):
        self.tr0_in_t1 = tr0_in_t1
        self.alpha = alpha
        self.f_max = f_max
        self.tol = tol

    def fit(self, X=None, y=None):
        if X is not None:
            X = check_array(X, dtype=np.float64)
            self.n_features_in_ = X.shape[1]
        self.scenario_ = ScanScenario.from_ratio(self.tr0_in_t1, self.alpha)
        self.result_ = find_optimal_field(self.scenario_, f_max=self.f_max, tol=self.tol)
        return self

    def predict(self, X):
        check_is_fitted(self, "scenario_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 1:
            raise InvalidParameterError("expected a single column of scale factors")
        return np.asarray(snr_t_max_sar(self.scenario_, X[:, 0]), dtype=float).reshape(-1)
