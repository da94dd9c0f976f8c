"""scikit-learn style wrappers and input validation helpers.

Deciders take a batch of n x n integer matrices (shape (N, n, n)) and
predict promise labels, so they compose with sklearn's model-selection and
metrics utilities.  :class:`MinimalDegreeRegressor` fits the lowest-degree
polynomial that explains a table of (D, Q(D)) values.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_is_fitted, column_or_1d

from .classical import basis_solve
from .fflinalg import FieldSpec, FpMatrix
from .instances import Label, make_linear
from .qsim import simon_decide, simon_round_distribution, spanning_probability

DEGREE_TOL = 1e-6


def check_field(p, n) -> FieldSpec:
    return FieldSpec(int(p), int(n))


def check_matrices(X, p) -> np.ndarray:
    """Validate a batch of square integer matrices and reduce entries mod p."""
    if isinstance(X, FpMatrix):
        X = [X]
    X = [x.rows if isinstance(x, FpMatrix) else x for x in X]
    arr = np.asarray(X)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[1] < 1:
        raise ValueError(f"expected matrices of shape (N, n, n), got {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("matrix entries must be integers")
    check_field(p, arr.shape[1])
    return np.mod(arr.astype(np.int64), p)


def _to_instances(X, p):
    arr = check_matrices(X, p)
    return [make_linear(FpMatrix(p, arr.shape[1], tuple(map(tuple, m.tolist())))) for m in arr]


class SimonClassifier(ClassifierMixin, BaseEstimator):
    """Simon's algorithm as a classifier over linear instances.

    Nothing is learned; ``fit`` only validates and records the dimension.
    """

    def __init__(self, p=2, rounds=None, random_state=None):
        self.p = p
        self.rounds = rounds
        self.random_state = random_state

    def fit(self, X, y=None):
        arr = check_matrices(X, self.p)
        self.n_ = arr.shape[1]
        self.classes_ = np.array([Label.KERNEL_P.value, Label.ONE_TO_ONE.value])
        return self

    def predict(self, X):
        check_is_fitted(self, "n_")
        rng = np.random.default_rng(self.random_state)
        out = []
        for f in _to_instances(X, self.p):
            answer, _ = simon_decide(f, rounds=self.rounds, seed=rng)
            out.append(answer.value)
        return np.array(out)

    def predict_proba(self, X):
        """Exact probability of each answer, columns ordered as ``classes_``."""
        check_is_fitted(self, "n_")
        rounds = self.n_ + 3 if self.rounds is None else self.rounds
        rows = []
        for f in _to_instances(X, self.p):
            dist = simon_round_distribution(f)
            support = int(np.count_nonzero(dist > 1e-9))
            if support == f.p ** f.n:
                one = float(spanning_probability(f.p, f.n, rounds))
            else:
                one = 0.0
            rows.append([1.0 - one, one])
        return np.array(rows)


class BasisClassifier(ClassifierMixin, BaseEstimator):
    """The deterministic n-query classical solver; may also answer UNRESTRICTED."""

    def __init__(self, p=2):
        self.p = p

    def fit(self, X, y=None):
        arr = check_matrices(X, self.p)
        self.n_ = arr.shape[1]
        self.classes_ = np.array([lab.value for lab in Label])
        return self

    def predict(self, X):
        check_is_fitted(self, "n_")
        out = []
        self.queries_used_ = []
        for f in _to_instances(X, self.p):
            label, used = basis_solve(f, f.p, f.n)
            out.append(label.value)
            self.queries_used_.append(used)
        return np.array(out)


class MinimalDegreeRegressor(RegressorMixin, BaseEstimator):
    """Least-degree polynomial whose least-squares fit stays within ``tol``.

    Abscissae are rescaled by their maximum before fitting; ``coef_`` is
    reported in the original variable, lowest degree first.  ``residuals_``
    holds the max-norm residual for every candidate degree.
    """

    def __init__(self, tol=DEGREE_TOL, max_degree=None):
        self.tol = tol
        self.max_degree = max_degree

    def fit(self, X, y):
        x = column_or_1d(np.asarray(X, dtype=float).reshape(len(X), -1)[:, 0])
        y = column_or_1d(np.asarray(y, dtype=float))
        if len(x) != len(y) or len(x) == 0:
            raise ValueError("X and y must be non-empty and of equal length")
        if len(np.unique(x)) != len(x):
            raise ValueError("duplicate abscissae")
        self.scale_ = float(np.max(np.abs(x))) or 1.0
        t = x / self.scale_
        top = len(x) - 1 if self.max_degree is None else min(self.max_degree, len(x) - 1)
        self.residuals_ = []
        fits = []
        for d in range(top + 1):
            vander = np.vander(t, d + 1, increasing=True)
            coef, *_ = np.linalg.lstsq(vander, y, rcond=None)
            self.residuals_.append(float(np.max(np.abs(vander @ coef - y))))
            fits.append(coef)
        passing = [d for d, r in enumerate(self.residuals_) if r < self.tol]
        self.degree_ = passing[0] if passing else top
        scaled = fits[self.degree_]
        self.coef_ = scaled / self.scale_ ** np.arange(len(scaled))
        self._scaled_coef = scaled
        return self

    def predict(self, X):
        check_is_fitted(self, "degree_")
        x = np.asarray(X, dtype=float).reshape(len(X), -1)[:, 0] / self.scale_
        return np.vander(x, len(self._scaled_coef), increasing=True) @ self._scaled_coef
