import math

import numpy as np
import pytest

import _qadvlab as q


def test_embed_amplitude():
    rho = q.embed("amplitude", [3.0, 4.0])
    assert rho.shape == (2, 2)
    assert rho[0, 0].real == pytest.approx(0.36)
    assert rho[0, 1].real == pytest.approx(0.48)
    assert rho[1, 1].real == pytest.approx(0.64)
    q.validate_density(rho)


def test_schatten_and_eigh():
    m = np.diag([3.0, -4.0]).astype(complex)
    assert q.schatten_norm(m, 1) == pytest.approx(7.0)
    assert q.schatten_norm(m, 2) == pytest.approx(5.0)
    assert q.schatten_norm(m, math.inf) == pytest.approx(4.0)
    eigs, vecs = q.eigh(m)
    assert eigs == pytest.approx([-4.0, 3.0])
    assert np.allclose(vecs.conj().T @ vecs, np.eye(2))
    assert q.dual_order(1) == math.inf
    assert q.dual_order(4) == pytest.approx(4.0 / 3.0)


def test_model_attack_roundtrip():
    model = q.Model("angle", 2, circuit_layers=2, init_seed=7)
    x = [0.4, -0.3]
    f = model.score(x)
    assert abs(f) <= 2.0 + 1e-9  # z_all on two qubits
    loss = model.loss(x, 0)
    assert 0.0 < loss < 1.0

    g = model.grad_input(x, 0)
    x_adv = model.fgsm(x, 0, epsilon=0.25)
    for j in range(2):
        if g[j] != 0.0:
            assert x_adv[j] - x[j] == pytest.approx(0.25 * math.copysign(1.0, g[j]))

    rho_adv = model.quantum_fgsm(x, 0, epsilon=0.01)
    q.validate_density(rho_adv)


def test_bounds_dominance():
    states = [q.embed("angle", [0.3 * i, -0.1 * i]) for i in range(1, 6)]
    cfg = q.BoundConfig(r=math.inf, b=1.0, m=5, d=2, d_h=4)
    bound = q.rc_bound_thm2(states, cfg)
    mean, stderr = q.mc_rc_estimate(states, cfg, n_draws=300, seed=11)
    assert mean <= bound + 3.0 * stderr
    assert q.j_of_r(math.inf) > 0.0
    rep = q.arc_bound_thm3(states, cfg, 0.5)
    assert rep["arc_bound"] >= rep["rc_bound"]


def test_dataset_seeded():
    train, test = q.gen_dataset(2, 5, 3, seed=42)
    train2, _ = q.gen_dataset(2, 5, 3, seed=42)
    assert len(train) == 5 and len(test) == 3
    assert train == train2
    xs, y = train[0]
    assert len(xs) == 2 and y in (0, 1)
