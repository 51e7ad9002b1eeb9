import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from monogamy import measures as ms
from monogamy.linalg import ValidationError, projector
from monogamy.roof import (
    Ensemble,
    RoofConfig,
    UnsupportedError,
    brute_force_roof,
    convex_roof,
    eigendecomposition_ensemble,
    mix_ensemble,
    random_isometry,
)
from monogamy.sampler import random_mixed_batch
from monogamy.states import basis, bell_phi_plus, ghz, w_state, zeros

from conftest import random_density


def c2(states):
    return ms.pure_bipartite_c2(states, (0,))


# brute_force_roof(rho_ghz_000, gen_concurrence2, 64), frozen
GHZ_000_BRUTE_64 = 0.37542614998672236


def ghz_000():
    return (projector(ghz()) + projector(zeros(3))) / 2


def test_eigendecomposition_rank_one():
    ens = eigendecomposition_ensemble(projector(ghz()))
    assert len(ens) == 1
    assert abs(np.vdot(ens.states[0], ghz())) == pytest.approx(1.0, abs=1e-12)


def test_eigendecomposition_maximally_mixed_qubit():
    ens = eigendecomposition_ensemble(np.eye(2) / 2)
    np.testing.assert_allclose(ens.weights, [0.5, 0.5])
    np.testing.assert_allclose(ens.density_matrix(), np.eye(2) / 2, atol=1e-15)


def test_eigendecomposition_orthogonal_mixture():
    assert abs(np.vdot(zeros(3), w_state())) == 0.0
    rho = (projector(zeros(3)) + projector(w_state())) / 2
    ens = eigendecomposition_ensemble(rho)
    np.testing.assert_allclose(ens.weights, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(ens.density_matrix(), rho, atol=1e-12)


def test_mix_identity_leaves_base():
    base = eigendecomposition_ensemble(random_density(np.random.default_rng(1), 2, 3))
    out = mix_ensemble(base, np.eye(3))
    np.testing.assert_allclose(out.weights, base.weights)
    np.testing.assert_allclose(out.states, base.states)


def test_mix_rank_one_duplicates():
    base = eigendecomposition_ensemble(projector(bell_phi_plus()))
    out = mix_ensemble(base, np.array([[1], [1]]) / np.sqrt(2))
    np.testing.assert_allclose(out.weights, [0.5, 0.5])
    np.testing.assert_allclose(out.states[0], out.states[1])


def test_mix_rejects_non_isometry():
    base = eigendecomposition_ensemble(np.eye(2) / 2)
    with pytest.raises(ValidationError):
        mix_ensemble(base, np.array([[1, 0], [0, 2]]))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(0, 3))
def test_mix_reconstructs_source(seed, rank, extra):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 2, rank)
    base = eigendecomposition_ensemble(rho)
    out = mix_ensemble(base, random_isometry(len(base) + extra, len(base), rng))
    np.testing.assert_allclose(out.density_matrix(), rho, atol=1e-10)
    assert out.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_roof_config_validation():
    with pytest.raises(ValidationError):
        RoofConfig(ensemble_size=5).resolve_size(2)
    with pytest.raises(ValidationError):
        RoofConfig(step_decay=1.0).resolve_size(2)
    assert RoofConfig().resolve_size(2) == 4
    assert RoofConfig().resolve_size(3) == 5
    with pytest.raises(ValidationError):
        convex_roof(np.eye(4) / 4, c2, RoofConfig(restarts=0))


def test_roof_rank_one_is_pure_value():
    est = convex_roof(projector(w_state()), ms.gen_concurrence_sq_pure)
    assert est.value == pytest.approx(4 / 3, abs=1e-12)
    assert est.converged


def test_roof_separable_maximally_mixed():
    assert convex_roof(np.eye(4) / 4, c2).value < 1e-9


def test_roof_matches_wootters_square():
    for rho in random_mixed_batch(2, 2, 3, 0, 10):
        est = convex_roof(rho, c2)
        assert est.value == pytest.approx(ms.wootters_concurrence(rho) ** 2, abs=1e-4)


def test_roof_matches_brute_force_on_bell_mixture():
    rho = (projector(bell_phi_plus()) + projector(basis("01"))) / 2
    est = convex_roof(rho, c2)
    assert abs(est.value - brute_force_roof(rho, c2, 64)) <= 2e-3


def test_roof_regression_ghz_mixture():
    assert brute_force_roof(ghz_000(), ms.gen_concurrence_sq_pure, 64) == pytest.approx(GHZ_000_BRUTE_64, abs=1e-12)
    est = convex_roof(ghz_000(), ms.gen_concurrence_sq_pure)
    assert est.value <= GHZ_000_BRUTE_64 + 1e-9
    assert abs(est.value - GHZ_000_BRUTE_64) <= 2e-3


def test_estimate_invariants():
    rho = random_mixed_batch(3, 2, 9, 0, 1)[0]
    est = convex_roof(rho, ms.gen_concurrence_sq_pure, RoofConfig(restarts=8, seed=4))
    ens = est.ensemble
    assert est.value == pytest.approx(ens.average(ms.gen_concurrence_sq_pure), abs=1e-10)
    np.testing.assert_allclose(ens.density_matrix(), rho, atol=1e-8)
    assert est.value <= eigendecomposition_ensemble(rho).average(ms.gen_concurrence_sq_pure) + 1e-12
    assert est.value >= 0


def test_roof_deterministic_for_seed():
    rho = random_mixed_batch(2, 2, 5, 0, 1)[0]
    a = convex_roof(rho, c2, RoofConfig(restarts=4, seed=11))
    b = convex_roof(rho, c2, RoofConfig(restarts=4, seed=11))
    assert a.value == b.value
    np.testing.assert_array_equal(a.ensemble.states, b.ensemble.states)


def test_restart_results_independent_of_restart_count():
    # restart k only depends on the k-th sub-seed
    rho = random_mixed_batch(2, 2, 6, 0, 1)[0]
    few = convex_roof(rho, c2, RoofConfig(restarts=3, seed=2)).restart_values
    many = convex_roof(rho, c2, RoofConfig(restarts=6, seed=2)).restart_values
    np.testing.assert_array_equal(few, many[:3])


@pytest.mark.parametrize("lam", [0.25, 0.5, 0.75])
def test_roof_convexity(lam):
    r1, r2 = random_mixed_batch(2, 1, 8, 0, 2)
    cfg = RoofConfig(seed=1)
    mixed = convex_roof(lam * r1 + (1 - lam) * r2, c2, cfg).value
    parts = lam * convex_roof(r1, c2, cfg).value + (1 - lam) * convex_roof(r2, c2, cfg).value
    assert mixed <= parts + 2 * cfg.tolerance


def test_brute_force_rank_one_and_limits():
    assert brute_force_roof(projector(ghz()), ms.gen_concurrence_sq_pure, 8) == pytest.approx(1.5, abs=1e-12)
    with pytest.raises(UnsupportedError):
        brute_force_roof(random_density(np.random.default_rng(0), 2, 3), c2, 8)


def test_brute_force_monotone_in_density():
    rho = random_mixed_batch(2, 2, 12, 0, 1)[0]
    vals = [brute_force_roof(rho, c2, g) for g in (1, 2, 3, 5, 8, 13, 21, 34, 64)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(ms.wootters_concurrence(rho) ** 2, abs=2e-3)


def test_ensemble_validation():
    with pytest.raises(ValidationError):
        Ensemble([0.5, 0.6], np.eye(2))
