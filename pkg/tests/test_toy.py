import numpy as np
import pytest

from smoothcert.errors import DomainError, TrainingError
from smoothcert.smoothing import GenGaussian
from smoothcert.toy import Dataset, ToyModel, eot_pgd_l2, make_blobs, train_noise_augmented


def test_blobs_basic():
    a = make_blobs(16, 2, 200, seed=3)
    b = make_blobs(16, 2, 200, seed=3)
    np.testing.assert_array_equal(a.X, b.X)
    assert np.bincount(a.y).tolist() == [200, 200]
    assert a.X.shape == (400, 16)
    with pytest.raises(DomainError):
        make_blobs(4, 1, 10)


def test_blob_centers_separated_and_linearly_separable():
    data = make_blobs(8, 3, 300, separation=10.0, seed=0, cluster_std=1.0)
    centers = np.array([data.X[data.y == c].mean(axis=0) for c in range(3)])
    dists = [np.linalg.norm(centers[i] - centers[j]) for i in range(3) for j in range(i)]
    assert min(dists) == pytest.approx(10.0, rel=0.05)
    two = make_blobs(8, 2, 500, separation=10.0, seed=1)
    c0, c1 = (two.X[two.y == c].mean(axis=0) for c in range(2))
    w = (c1 - c0) / np.linalg.norm(c1 - c0)
    proj = (two.X - (c0 + c1) / 2) @ w
    # margin to the midpoint plane is about separation / 2 minus the scatter
    assert np.mean(np.sign(proj) == 2 * two.y - 1) > 0.999
    assert np.median(np.abs(proj)) == pytest.approx(5.0, rel=0.2)


def test_dataset_csv_roundtrip(tmp_path):
    data = make_blobs(3, 2, 5, seed=0)
    path = tmp_path / "d.csv"
    data.save_csv(path)
    assert path.read_text().splitlines()[0] == "x_0,x_1,x_2,label"
    back = Dataset.load_csv(path)
    np.testing.assert_array_equal(back.X, data.X)
    np.testing.assert_array_equal(back.y, data.y)
    with pytest.raises(DomainError):
        Dataset(np.zeros((2, 2)), np.array([0, 3]), 2)


def _fd_check(model, X, y, eps=1e-6):
    _, grads = model.loss_and_grads(X, y)
    for name, value in model.params().items():
        num = np.zeros_like(value)
        for idx in np.ndindex(value.shape):
            plus, minus = value.copy(), value.copy()
            plus[idx] += eps
            minus[idx] -= eps
            fp = ToyModel(**{**model.params(), name: plus}).loss(X, y)
            fm = ToyModel(**{**model.params(), name: minus}).loss(X, y)
            num[idx] = (fp - fm) / (2 * eps)
        np.testing.assert_allclose(grads[name], num, rtol=1e-5, atol=1e-8)


@pytest.mark.parametrize("hidden", [None, 6])
def test_parameter_gradients_finite_difference(hidden):
    rng = np.random.default_rng(0)
    model = ToyModel.init(5, 3, hidden, seed=1, scale=0.5)
    X, y = rng.standard_normal((7, 5)), rng.integers(0, 3, 7)
    _fd_check(model, X, y)


@pytest.mark.parametrize("hidden", [None, 6])
def test_input_gradient_finite_difference(hidden):
    rng = np.random.default_rng(2)
    model = ToyModel.init(4, 3, hidden, seed=3, scale=0.5)
    X, y = rng.standard_normal((5, 4)), rng.integers(0, 3, 5)
    g = model.input_grad(X, y)
    eps = 1e-6
    for i in range(X.shape[0]):
        for j in range(X.shape[1]):
            P, M = X.copy(), X.copy()
            P[i, j] += eps
            M[i, j] -= eps
            num = (model.loss(P, y) - model.loss(M, y)) * len(y) / (2 * eps)
            assert g[i, j] == pytest.approx(num, rel=1e-5, abs=1e-8)


def test_training():
    data = make_blobs(16, 2, 200, seed=0)
    init = ToyModel.init(16, 2, seed=0)
    same = train_noise_augmented(init, data, GenGaussian(0.1, 2), epochs=0)
    np.testing.assert_array_equal(same.W, init.W)
    model = train_noise_augmented(init, data, GenGaussian(0.1, 2), epochs=100, seed=0)
    assert np.mean(model.predict(data.X) == data.y) >= 0.99
    again = train_noise_augmented(init, data, GenGaussian(0.1, 2), epochs=100, seed=0)
    np.testing.assert_array_equal(model.W, again.W)
    hidden = train_noise_augmented(ToyModel.init(16, 2, 8, seed=0), data, GenGaussian(0.1, 2), epochs=100, step_size=0.2)
    assert np.mean(hidden.predict(data.X) == data.y) >= 0.99


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_training_divergence_raises():
    data = make_blobs(4, 2, 20, seed=0, separation=1e150)
    flipped = Dataset(data.X, 1 - data.y, 2)
    with pytest.raises(TrainingError):
        train_noise_augmented(ToyModel.init(4, 2, seed=0), flipped, GenGaussian(0.1, 2), epochs=5, step_size=1e200)


def _threshold_model():
    # class 1 iff x > 0
    return ToyModel(W=np.array([[-1.0], [1.0]]), b=np.zeros(2))


def test_attack_misclassified_input():
    res = eot_pgd_l2(_threshold_model(), np.array([0.5]), 0, GenGaussian(0.1, 2), n_mc=200)
    assert res.success and res.norm == 0.0


def test_attack_finds_threshold_margin():
    margin = 1.0
    res = eot_pgd_l2(_threshold_model(), np.array([-margin]), 0, GenGaussian(0.25, 2), n_mc=1000, steps=30, step_size=0.2)
    assert res.success
    assert res.norm == pytest.approx(margin, rel=0.05)


def test_attack_fails_with_tiny_budget():
    res = eot_pgd_l2(_threshold_model(), np.array([-5.0]), 0, GenGaussian(0.25, 2), n_mc=100, steps=3, step_size=0.1)
    assert not res.success
    with pytest.raises(DomainError):
        eot_pgd_l2(_threshold_model(), np.array([-5.0]), 0, GenGaussian(0.25, 2), n_mc=0)
