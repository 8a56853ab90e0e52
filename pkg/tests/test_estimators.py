import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from projheat.dynamics import OUTCOME_NAMES, Outcome, iterate_batch
from projheat.estimators import HeatMapTransformer, OrbitClassifier
from projheat.moduli import ModuliPoint, heat_moduli
from projheat.polygon import Polygon, heat_map
from projheat.sampling import random_convex_polygon
import math


def test_transformer_on_moduli_rows():
    X = np.array([[0.2, 0.7], [0.5, 0.5], [0.9, 0.1]])
    out = HeatMapTransformer(lam="phi").fit_transform(X)
    assert np.allclose(out, 2 / (1 + math.sqrt(5)), atol=1e-12)
    two = HeatMapTransformer(lam=0.8, steps=2).fit_transform(X)
    for row, (x, y) in zip(two, X):
        m = heat_moduli(heat_moduli(ModuliPoint(x, y), 0.8), 0.8)
        assert np.allclose(row, (m.x, m.y), atol=1e-14)


def test_transformer_on_polygon_rows(rng):
    polys = [random_convex_polygon(rng, 6) for _ in range(4)]
    X = np.stack([P.array().ravel() for P in polys])
    out = HeatMapTransformer(lam=1.3).fit_transform(X)
    assert out.shape == X.shape
    for row, P in zip(out, polys):
        expected = heat_map(P.to_float(), 1.3)
        assert Polygon(row.reshape(-1, 3)).equals(expected, tol=1e-9)


def test_transformer_rejects_bad_width():
    with pytest.raises(ValueError):
        HeatMapTransformer().fit_transform(np.zeros((2, 7)))


def test_classifier_matches_batch_engine(rng):
    polys = np.stack([random_convex_polygon(rng, 5).array() for _ in range(6)])
    X = polys.reshape(len(polys), -1)
    for lam in (0.5, 3.0):
        clf = OrbitClassifier(lam=lam, max_steps=3000).fit(X)
        assert set(clf.classes_) == set(OUTCOME_NAMES.values())
        labels = clf.predict(X)
        res = iterate_batch(polys, lam, 3000, 1e-9)
        assert list(labels) == [OUTCOME_NAMES[Outcome(int(c))] for c in res.outcome]
    assert set(OrbitClassifier(lam=3.0, max_steps=3000).fit(X).predict(X)) == {OUTCOME_NAMES[Outcome.LINE]}


def test_clone_and_pipeline(rng):
    est = HeatMapTransformer(lam=2.0, steps=3)
    twin = clone(est)
    assert twin.get_params() == {"lam": 2.0, "steps": 3}
    clf = clone(OrbitClassifier(lam="1/phi", max_steps=100))
    assert clf.get_params()["lam"] == "1/phi"
    X = np.stack([random_convex_polygon(rng, 5).array().ravel() for _ in range(3)])
    pipe = make_pipeline(HeatMapTransformer(lam=1.0, steps=2), OrbitClassifier(lam=1.0, max_steps=2000))
    assert len(pipe.fit(X).predict(X)) == 3
