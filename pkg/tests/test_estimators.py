import numpy as np
import pytest
from sklearn.base import clone

from simonlab.estimators import (BasisClassifier, MinimalDegreeRegressor, SimonClassifier,
                                 check_matrices)
from simonlab.fflinalg import enumerate_matrices, kernel
from simonlab.qsim import spanning_probability


def all_matrices(n, p):
    return np.array([m.rows for m in enumerate_matrices(n, p)])


def test_check_matrices():
    arr = check_matrices([[[3, 1], [0, 2]]], 2)
    assert arr.tolist() == [[[1, 1], [0, 0]]]
    with pytest.raises(ValueError):
        check_matrices(np.zeros((2, 2, 3)), 2)
    with pytest.raises(ValueError):
        check_matrices(np.zeros((1, 2, 2)), 4)


def test_get_params_and_clone():
    est = SimonClassifier(p=3, rounds=7, random_state=4)
    assert est.get_params() == {"p": 3, "rounds": 7, "random_state": 4}
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    assert clone(MinimalDegreeRegressor(tol=1e-3)).tol == 1e-3


def test_simon_classifier_predicts_labels():
    X = all_matrices(2, 2)
    dims = [kernel(m).dim for m in enumerate_matrices(2, 2)]
    keep = [i for i, h in enumerate(dims) if h <= 1]
    clf = SimonClassifier(random_state=0).fit(X[keep])
    proba = clf.predict_proba(X[keep])
    exact = float(spanning_probability(2, 2, 5))
    for i, row in zip(keep, proba):
        assert row.sum() == pytest.approx(1.0)
        assert row[1] == pytest.approx(exact if dims[i] == 0 else 0.0)
    pred = clf.predict(X[keep])
    assert all(p == "KERNEL_P" for i, p in zip(keep, pred) if dims[i] == 1)
    assert (clf.predict(X[keep]) == SimonClassifier(random_state=0).fit(X[keep]).predict(X[keep])).all()


def test_basis_classifier_is_exact():
    X = all_matrices(3, 2)
    clf = BasisClassifier().fit(X)
    labels = ["ONE_TO_ONE", "KERNEL_P"] + ["UNRESTRICTED"] * 2
    expected = [labels[kernel(m).dim] for m in enumerate_matrices(3, 2)]
    assert clf.predict(X).tolist() == expected
    assert set(clf.queries_used_) == {3}


def test_minimal_degree_regressor():
    x = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    y = 0.25 + 0.5 * x - 0.01 * x ** 2
    reg = MinimalDegreeRegressor().fit(x.reshape(-1, 1), y)
    assert reg.degree_ == 2
    assert np.allclose(reg.coef_, [0.25, 0.5, -0.01])
    assert np.allclose(reg.predict(x.reshape(-1, 1)), y)
    assert reg.residuals_[2] < 1e-6 <= reg.residuals_[1]
    const = MinimalDegreeRegressor().fit([[1], [2], [4]], [0.3, 0.3, 0.3])
    assert const.degree_ == 0


def test_regressor_rejects_duplicates():
    with pytest.raises(ValueError):
        MinimalDegreeRegressor().fit([[1], [1]], [0, 1])
