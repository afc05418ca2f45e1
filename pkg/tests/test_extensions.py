import numpy as np
import pytest

from chshlab.algebra import Direction
from chshlab.chsh import maximize_chsh
from chshlab.extensions import (
    ContinuousBasisModel,
    IndependentSourceModel,
    PeakedDensity,
    RegularizedDelta,
    WernerModel,
    WernerState,
    kappa_sm,
    model1_correlation,
    model1_prefactor,
    model2_chsh_threshold,
    model2_correlation,
    model3_correlation,
    model3_prefactor,
    source_angular_factor,
)
from chshlab.gudder import gudder_correlation
from chshlab.quantum import qm_correlation

from conftest import ALL_STATES, random_unit

Z = Direction(0.0)
SQRT2 = np.sqrt(2.0)


def normal(x, mu, s):
    return np.exp(-0.5 * ((x - mu) / s) ** 2) / (s * np.sqrt(2 * np.pi))


def closed_sq_integral(s):
    return 1.0 / (2 * s * np.sqrt(np.pi))


def closed_model1(rho_S, rho_M, eps, lam):
    # Gaussian-Gaussian overlap widens the device density by eps
    smeared = normal(lam, rho_M.mu, np.hypot(rho_M.sigma, eps))
    return normal(lam, rho_S.mu, rho_S.sigma) * smeared / np.sqrt(4 * closed_sq_integral(rho_S.sigma))


def closed_model3_side(rho, eps, lam):
    return normal(lam, rho.mu, np.hypot(rho.sigma, eps)) / np.sqrt(closed_sq_integral(rho.sigma))


@pytest.mark.parametrize("mu, sigma", [(0.0, 1.0), (2.5, 0.01), (-1.0, 3.0)])
def test_peaked_density_integrals(mu, sigma):
    rho = PeakedDensity(mu, sigma)
    assert rho.integral().value == pytest.approx(1.0, abs=1e-10)
    assert rho.square_integral().value == pytest.approx(closed_sq_integral(sigma), rel=1e-8)


def test_regularized_delta_normalized():
    assert RegularizedDelta(1e-4).integral().value == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        RegularizedDelta(0.0)
    with pytest.raises(ValueError):
        PeakedDensity(0.0, -1.0)


def test_model1_kappa_example():
    rho_S, rho_M = PeakedDensity(0.2, 0.05), PeakedDensity(0.2, 0.08)
    eps = RegularizedDelta(0.08 / 100)
    kappa = kappa_sm(rho_S, rho_M)
    assert kappa == pytest.approx(normal(0.2, 0.2, 0.05) * normal(0.2, 0.2, 0.08) / np.sqrt(4 * closed_sq_integral(0.05)), rel=1e-9)
    got = model1_correlation("PhiPlus", Z, Z, rho_S, rho_M, eps, lambda_A=0.2)
    assert got == pytest.approx(kappa, rel=1e-3)


@pytest.mark.parametrize("lam", [0.0, 0.03, -0.05])
def test_model1_prefactor_matches_closed_form(lam):
    rho_S, rho_M, eps = PeakedDensity(0.0, 0.04), PeakedDensity(0.01, 0.05), RegularizedDelta(5e-4)
    pre = model1_prefactor(rho_S, rho_M, eps, lam)
    assert pre.value == pytest.approx(closed_model1(rho_S, rho_M, 5e-4, lam), rel=1e-9)


@pytest.mark.parametrize("state", ALL_STATES)
def test_model1_reproduces_qm_after_normalization(state, rng):
    rho_S, rho_M = PeakedDensity(0.0, 0.1), PeakedDensity(0.0, 0.1)
    eps = RegularizedDelta(0.1 / 100)
    kappa = kappa_sm(rho_S, rho_M)
    for a, b in zip(random_unit(rng, 20), random_unit(rng, 20)):
        got = model1_correlation(state, a, b, rho_S, rho_M, eps) / kappa
        want = qm_correlation(state, a, b)
        assert got == pytest.approx(want, rel=1e-3, abs=1e-12)


def test_model1_perpendicular_settings_vanish():
    rho = PeakedDensity(0.0, 0.1)
    x = Direction(np.pi / 2, 0.0)
    assert model1_correlation("PhiPlus", x, Z, rho, rho, RegularizedDelta(1e-3)) == pytest.approx(0.0, abs=1e-10)


def test_model1_convergence_within_error_estimate():
    rho_S, rho_M = PeakedDensity(0.0, 0.1), PeakedDensity(0.02, 0.1)
    eps = RegularizedDelta(1e-3)
    base = model1_prefactor(rho_S, rho_M, eps, 0.01)
    halved = model1_prefactor(rho_S, rho_M, RegularizedDelta(5e-4), 0.01)
    doubled = model1_prefactor(rho_S, rho_M, eps, 0.01, order=20)
    assert abs(halved.value - base.value) < base.error
    assert abs(doubled.value - base.value) < base.error
    # the estimate is not vacuous
    assert base.error < 1e-3 * abs(base.value)


def test_werner_examples(rng):
    assert model2_correlation(WernerState(0.5, "PhiPlus"), Z, Z) == pytest.approx(0.5, abs=1e-15)
    for a, b in zip(random_unit(rng, 50), random_unit(rng, 50)):
        assert model2_correlation(WernerState(1.0, "PsiPlus"), a, b) == gudder_correlation("PsiPlus", a, b)
        assert model2_correlation(WernerState(0.0, "PsiPlus"), a, b) == 0.0
    with pytest.raises(ValueError):
        WernerState(1.2)


def test_werner_linear_in_mixing(rng):
    for a, b in zip(random_unit(rng, 100), random_unit(rng, 100)):
        e = [model2_correlation(WernerState(l, "PhiMinus"), a, b) for l in (0.1, 0.4, 0.7)]
        assert e[2] - e[1] == pytest.approx(e[1] - e[0], abs=1e-12)
        assert e[1] == pytest.approx(0.4 * qm_correlation("PhiMinus", a, b), abs=1e-12)


def test_werner_half_mixture_optimum():
    assert maximize_chsh(WernerModel(0.5)).S == pytest.approx(SQRT2, abs=1e-4)


@pytest.mark.parametrize("state", ALL_STATES)
def test_werner_threshold(state):
    lam = model2_chsh_threshold(state)
    assert lam == pytest.approx(1 / SQRT2, abs=1e-3)
    assert maximize_chsh(WernerModel(lam - 2e-3, state)).S < 2.0


@pytest.mark.parametrize("lam_A, lam_B", [(None, None), (0.31, -0.2)])
def test_model3_prefactor_matches_closed_form(lam_A, lam_B):
    rho_A, rho_B = PeakedDensity(0.3, 0.02), PeakedDensity(-0.2, 0.05)
    eps = RegularizedDelta(2e-6)
    pre = model3_prefactor(rho_A, rho_B, eps, lam_A, lam_B)
    la = 0.3 if lam_A is None else lam_A
    lb = -0.2 if lam_B is None else lam_B
    want = closed_model3_side(rho_A, 2e-6, la) * closed_model3_side(rho_B, 2e-6, lb)
    assert pre.value == pytest.approx(want, rel=1e-9)
    # unregularized limit rho_A rho_B / sqrt(N_A N_B)
    sifted = normal(la, 0.3, 0.02) * normal(lb, -0.2, 0.05) / np.sqrt(closed_sq_integral(0.02) * closed_sq_integral(0.05))
    assert pre.value == pytest.approx(sifted, rel=1e-6)


def test_model3_equal_densities_prefactor():
    rho = PeakedDensity(0.0, 0.07)
    pre = model3_prefactor(rho, rho)
    n = closed_sq_integral(0.07)
    assert pre.value == pytest.approx(normal(0.0, 0.0, 0.07) ** 2 / np.sqrt(n * n), rel=1e-6)


@pytest.mark.parametrize("state", ALL_STATES)
def test_model3_reproduces_qm(state, rng):
    rho_A, rho_B = PeakedDensity(0.0, 0.1), PeakedDensity(0.5, 0.2)
    pre = model3_prefactor(rho_A, rho_B).value
    for a, b in zip(random_unit(rng, 20), random_unit(rng, 20)):
        got = model3_correlation(state, a, b, rho_A, rho_B) / pre
        assert got == pytest.approx(qm_correlation(state, a, b), rel=1e-6, abs=1e-12)


def test_model3_singlet_sign():
    rho = PeakedDensity(0.0, 0.1)
    pre = model3_prefactor(rho, rho).value
    assert model3_correlation("PsiMinus", Z, Z, rho, rho) == pytest.approx(-pre, rel=1e-12)


def test_angular_factor_signs(rng):
    a, b = random_unit(rng), random_unit(rng)
    assert source_angular_factor("PhiPlus", a, b) == pytest.approx(a[0] * b[0] - a[1] * b[1] + a[2] * b[2], abs=1e-14)


def test_factor_absorption_ratio_independent_of_densities(rng):
    a0, b0 = random_unit(rng), random_unit(rng)
    pairs = list(zip(random_unit(rng, 5), random_unit(rng, 5)))
    ratios = []
    for s1, s2 in [(0.1, 0.1), (0.03, 0.2), (0.5, 0.05)]:
        r1, r2 = PeakedDensity(0.0, s1), PeakedDensity(0.0, s2)
        eps = RegularizedDelta(min(s1, s2) / 100)
        ref1 = model1_correlation("PsiPlus", a0, b0, r1, r2, eps)
        ref3 = model3_correlation("PsiPlus", a0, b0, r1, r2)
        ratios.append(
            [model1_correlation("PsiPlus", a, b, r1, r2, eps) / ref1 for a, b in pairs]
            + [model3_correlation("PsiPlus", a, b, r1, r2) / ref3 for a, b in pairs]
        )
    np.testing.assert_allclose(ratios[0], ratios[1], rtol=1e-9)
    np.testing.assert_allclose(ratios[0], ratios[2], rtol=1e-9)


@pytest.mark.parametrize(
    "model",
    [
        ContinuousBasisModel("PsiMinus", PeakedDensity(0, 0.1), PeakedDensity(0, 0.1), RegularizedDelta(1e-3)),
        IndependentSourceModel("PhiPlus", PeakedDensity(0, 0.1), PeakedDensity(1, 0.3)),
        WernerModel(1.0, "PsiPlus"),
    ],
    ids=lambda m: m.name,
)
def test_normalized_models_reach_tsirelson(model):
    assert maximize_chsh(model, restarts=2).S == pytest.approx(2 * SQRT2, abs=1e-6)


def test_normalized_model_matches_qm_at_z():
    m = ContinuousBasisModel("PhiPlus", PeakedDensity(0, 0.1), PeakedDensity(0, 0.1), RegularizedDelta(1e-3))
    assert m.correlation(Z, Z) == pytest.approx(1.0, abs=1e-14)
    assert m.constant.value > 0


def test_model3_convergence_within_error_estimate():
    rho_A, rho_B = PeakedDensity(0.0, 0.1), PeakedDensity(0.3, 0.05)
    eps = RegularizedDelta(1e-4)
    base = model3_prefactor(rho_A, rho_B, eps, 0.02, 0.31)
    halved = model3_prefactor(rho_A, rho_B, RegularizedDelta(5e-5), 0.02, 0.31)
    doubled = model3_prefactor(rho_A, rho_B, eps, 0.02, 0.31, order=20)
    assert abs(halved.value - base.value) < base.error
    assert abs(doubled.value - base.value) < base.error
    assert base.error < 1e-5 * abs(base.value)
