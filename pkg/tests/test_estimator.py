import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from mrs_snrt import FieldOptimizer, InvalidParameterError, SNRtCurveModel

X_TABLE = np.array([[0.2, 0.3], [1.0, 0.5], [2.0, 0.5]])


def test_params_round_trip():
    est = FieldOptimizer(f_max=8.0, tol=1e-7)
    assert est.get_params() == {"f_max": 8.0, "tol": 1e-7, "f_min": 1.0, "n_grid": 512}
    other = clone(est).set_params(f_max=6.0)
    assert other.f_max == 6.0 and est.f_max == 8.0


def test_transform_matches_table():
    out = FieldOptimizer().fit_transform(X_TABLE)
    assert out.shape == (3, 3)
    expected = np.array([[2.61, 17.8, 1.83], [1.46, 3.09, 1.13], [1.10, 1.35, 1.01]])
    assert np.all(np.abs(out - expected) <= [0.01, 0.1, 0.01])
    assert list(FieldOptimizer().get_feature_names_out()) == [
        "f_opt", "tr_e_opt_in_tr0", "snr_gain"]


def test_fit_records_results():
    est = FieldOptimizer().fit(X_TABLE)
    assert len(est.results_) == 3 and est.n_features_in_ == 2


def test_not_fitted():
    with pytest.raises(NotFittedError):
        FieldOptimizer().transform(X_TABLE)


@pytest.mark.parametrize("X", [[[0.4]], [[-0.4, 0.3]], [[0.4, 3.0]], [[np.nan, 0.3]]])
def test_rejects_bad_rows(X):
    with pytest.raises(ValueError):
        FieldOptimizer().fit(X)


def test_pipeline():
    # TR0 given in ms and T1 = 1000 ms
    to_ratio = FunctionTransformer(lambda X: np.column_stack([X[:, 0] / 1000.0, X[:, 1]]))
    pipe = make_pipeline(to_ratio, FieldOptimizer())
    out = pipe.fit_transform(np.array([[400.0, 0.0]]))
    assert out[0, 0] == pytest.approx(1.92, abs=0.01)


def test_curve_model():
    model = SNRtCurveModel(tr0_in_t1=0.4, alpha=0.0).fit()
    pred = model.predict(np.array([[1.0], [model.result_.f_opt], [5.0]]))
    assert pred[0] == 1.0
    assert pred[1] == pytest.approx(1.53, abs=0.005)
    assert pred[2] < pred[1]
    with pytest.raises(InvalidParameterError):
        model.predict(np.ones((2, 2)))
    with pytest.raises(NotFittedError):
        SNRtCurveModel().predict([[1.0]])
