import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metapath.dataset import PREDICTORS, Dataset, impute_zeros
from metapath.errors import BadComponentCount, InputError, NotSymmetric
from metapath.pca import PcaModel, fit_pca, jacobi_eigen, project, standardize


def frame(x):
    cols = {c: x[:, j] for j, c in enumerate(PREDICTORS)}
    cols["Outcome"] = np.arange(x.shape[0]) % 2
    return Dataset(cols)


def test_standardize_simple_column():
    d = frame(np.tile(np.array([[1.0], [2.0], [3.0]]), (1, 8)) * np.arange(1, 9))
    z, params = standardize(d)
    np.testing.assert_allclose(z[:, 0], [-1, 0, 1], atol=1e-15)
    again, _ = standardize(frame(z))
    np.testing.assert_allclose(again, z, atol=1e-10)
    assert params.columns == PREDICTORS


def test_standardized_means_vanish(synth_raw):
    z, _ = standardize(impute_zeros(synth_raw)[0])
    assert z.shape == (768, 8)
    assert np.max(np.abs(z.mean(axis=0))) <= 1e-10


def test_jacobi_identity_and_2x2():
    vals, vecs = jacobi_eigen(np.eye(8))
    np.testing.assert_array_equal(vals, np.ones(8))
    np.testing.assert_array_equal(vecs, np.eye(8))
    vals, vecs = jacobi_eigen([[2.0, 1.0], [1.0, 2.0]])
    np.testing.assert_allclose(vals, [3.0, 1.0], atol=1e-14)
    s = 1 / np.sqrt(2)
    assert np.allclose(np.abs(vecs[:, 0]), [s, s])
    assert np.allclose(np.abs(vecs[:, 1]), [s, s])
    assert vecs[0, 1] * vecs[1, 1] < 0


def test_jacobi_rejects_bad_input():
    with pytest.raises(NotSymmetric):
        jacobi_eigen([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NotSymmetric):
        jacobi_eigen(np.ones((2, 3)))
    with pytest.raises(InputError):
        jacobi_eigen(np.eye(65))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_jacobi_decomposition_property(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    s = a + a.T
    vals, vecs = jacobi_eigen(s)
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(n), atol=1e-10)
    np.testing.assert_allclose(vecs @ np.diag(vals) @ vecs.T, s, atol=1e-9)
    assert np.all(np.diff(vals) <= 1e-12)
    np.testing.assert_allclose(vals, np.sort(np.linalg.eigvalsh(s))[::-1], atol=1e-9)
    for j in range(n):
        assert vecs[np.argmax(np.abs(vecs[:, j])), j] > 0


def test_pca_rank_one_line():
    t = np.linspace(-2, 3, 40)
    x = 1.0 + np.outer(t, np.arange(1, 9))
    m = fit_pca(frame(x))
    np.testing.assert_allclose(m.explained_fraction, [1, 0, 0, 0, 0, 0, 0, 0], atol=1e-12)
    assert m.cumulative_fraction[-1] == 1.0


def test_pca_two_column_closed_form():
    rng = np.random.default_rng(3)
    u, w = rng.normal(size=(2, 200))
    u = (u - u.mean()) / u.std(ddof=1)
    w = w - w.mean()
    w -= u * (u @ w) / (u @ u)
    w /= w.std(ddof=1)
    x2 = 0.5 * u + np.sqrt(0.75) * w
    base = np.column_stack([u, x2] + [rng.normal(size=200) for _ in range(6)])
    m = fit_pca(frame(base), columns=("Pregnancies", "Glucose"))
    np.testing.assert_allclose(m.eigenvalues, [1.5, 0.5], atol=1e-12)


def test_pca_on_synthetic(synth_raw):
    m = fit_pca(impute_zeros(synth_raw)[0])
    assert abs(m.eigenvalues.sum() - 8.0) <= 1e-8
    np.testing.assert_allclose(m.eigenvectors.T @ m.eigenvectors, np.eye(8), atol=1e-9)
    assert np.all(np.diff(m.cumulative_fraction) >= 0)


def test_projection_round_trip_and_decorrelation(synth_raw):
    d = impute_zeros(synth_raw)[0]
    m = fit_pca(d)
    z, _ = standardize(d)
    scores = project(m, d, 8)
    np.testing.assert_allclose(scores @ m.eigenvectors.T, z, atol=1e-8)
    s5 = project(m, d, 5)
    r = np.corrcoef(s5, rowvar=False)
    assert np.max(np.abs(r - np.eye(5))) <= 1e-8
    centre = frame(np.tile(m.params.means, (2, 1)))
    np.testing.assert_allclose(project(m, centre, 3), 0.0, atol=1e-10)


def test_project_component_count():
    m = fit_pca(frame(np.random.default_rng(0).normal(size=(20, 8))))
    for k in (0, 9, 2.0):
        with pytest.raises(BadComponentCount):
            project(m, frame(np.zeros((1, 8))), k)


def test_model_json_round_trip(synth_raw):
    m = fit_pca(impute_zeros(synth_raw)[0])
    back = PcaModel.from_json(m.to_json())
    np.testing.assert_array_equal(back.eigenvalues, m.eigenvalues)
    np.testing.assert_array_equal(back.eigenvectors, m.eigenvectors)
    np.testing.assert_array_equal(back.params.means, m.params.means)
    assert back.columns == m.columns
    with pytest.raises(InputError):
        PcaModel.from_json('{"schema": "other"}')
