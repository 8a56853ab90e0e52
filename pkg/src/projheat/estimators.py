"""scikit-learn style wrappers around the heat map and orbit classification.

Both estimators are stateless: ``fit`` only validates the input shape.
Polygons are passed as rows of ``3 n`` homogeneous coordinates and moduli
points as rows of two numbers.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array

from .dynamics import OUTCOME_NAMES, Outcome, iterate_batch, _heat_batch
from .moduli import ModuliPoint, heat_moduli
from .polygon import parse_lambda


def _lam(value):
    return parse_lambda(value, exact=False) if isinstance(value, str) else value


def _as_polygons(X) -> np.ndarray:
    X = check_array(X, dtype=float)
    if X.shape[1] % 3 or X.shape[1] < 15:
        raise ValueError("polygon rows need 3 n >= 15 homogeneous coordinates")
    return X.reshape(len(X), -1, 3)


class HeatMapTransformer(TransformerMixin, BaseEstimator):
    """Apply H_lambda ``steps`` times to each row.

    Rows of length 2 are moduli points; longer rows are polygons.
    """

    def __init__(self, lam=1.0, steps: int = 1):
        self.lam = lam
        self.steps = steps

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        lam = _lam(self.lam)
        X = check_array(X, dtype=float)
        if X.shape[1] == 2:
            out = np.empty_like(X)
            for i, (x, y) in enumerate(X):
                m = ModuliPoint(float(x), float(y))
                for _ in range(self.steps):
                    m = heat_moduli(m, lam)
                out[i] = (m.x, m.y)
            return out
        W = _as_polygons(X)
        W = W / np.linalg.norm(W, axis=-1, keepdims=True)
        for _ in range(self.steps):
            W, _ = _heat_batch(W, lam)
        return W.reshape(len(W), -1)


class OrbitClassifier(ClassifierMixin, BaseEstimator):
    """Label each polygon row with the outcome of its H_lambda orbit."""

    def __init__(self, lam=1.0, max_steps: int = 5000, tol: float = 1e-9):
        self.lam = lam
        self.max_steps = max_steps
        self.tol = tol

    def fit(self, X, y=None):
        _as_polygons(X)
        self.classes_ = np.array([OUTCOME_NAMES[o] for o in Outcome])
        return self

    def predict(self, X):
        res = iterate_batch(_as_polygons(X), _lam(self.lam), self.max_steps, self.tol)
        return np.array([OUTCOME_NAMES[Outcome(int(c))] for c in res.outcome])
