import math

import numpy as np
import pytest

from merminbound.bounds import (
    ConsistencyError,
    MeasurementSettings,
    Tightness,
    analytic_bound,
    certify_tightness,
    classical_bound,
    contracted_expectation,
    decompose_top_vectors,
    expectation,
    mabk4_explicit_operator,
    mabk_coefficients,
    mabk_operator,
    mermin_operator,
    reshape_tensor,
    settings_from_certificate,
    singular_spectrum,
    spin,
)
from merminbound.optimizer import OptResult, seesaw_maximize
from merminbound.qstate import (
    correlation_data,
    generalized_ghz4,
    ghz,
    ghz_symmetric,
    maximally_mixed,
    noisy_ghz_tilde,
    noisy_w,
    pauli_string,
    product_zero,
)

from conftest import random_density_matrix, random_unit

SQRT2 = math.sqrt(2)
SQRT3 = math.sqrt(3)
X, Y, Z = np.eye(3)


def _random_settings(n, rng):
    return MeasurementSettings.random(n, rng)


# settings


def test_settings_reject_non_unit():
    with pytest.raises(ValueError, match="unit"):
        MeasurementSettings.from_pairs([(X, 2 * Y)])


def test_settings_json_roundtrip(rng):
    s = _random_settings(3, rng)
    doc = s.to_json()
    assert set(doc[0]) == {"v", "vPrime"}
    np.testing.assert_array_equal(MeasurementSettings.from_json(doc).vectors, s.vectors)


# operators


def test_mermin_all_z_settings():
    s = MeasurementSettings.from_pairs([(Z, Z)] * 3)
    np.testing.assert_allclose(mermin_operator(s), 2 * pauli_string((3, 3, 3)), atol=0)


def test_mermin_is_hermitian(rng):
    op = mermin_operator(_random_settings(3, rng))
    np.testing.assert_allclose(op, op.conj().T, atol=1e-15)


def test_mermin_wrong_party_count(rng):
    with pytest.raises(ValueError):
        mermin_operator(_random_settings(2, rng))


def test_mabk_three_parties_is_mermin(rng):
    for _ in range(100):
        s = _random_settings(3, rng)
        assert np.max(np.abs(mabk_operator(s) - mermin_operator(s))) <= 1e-12


def test_mabk_four_parties_matches_explicit_form(rng):
    for _ in range(100):
        s = _random_settings(4, rng)
        assert np.max(np.abs(mabk_operator(s) - mabk4_explicit_operator(s))) <= 1e-12


def test_chsh_optimal_settings():
    s = MeasurementSettings.from_pairs([(X, Y), ((X + Y) / SQRT2, (X - Y) / SQRT2)])
    assert np.linalg.eigvalsh(mabk_operator(s))[-1] == pytest.approx(2 * SQRT2, abs=1e-12)


def test_mabk_needs_two_parties(rng):
    with pytest.raises(ValueError):
        mabk_operator(_random_settings(1, rng))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_coefficients_rebuild_operator(n, rng):
    # sum_c C[c] A_1^(c1) ... A_n^(cn) built independently of the recursion
    s = _random_settings(n, rng)
    coef = mabk_coefficients(n)
    ops = [(spin(v), spin(w)) for v, w in s.pairs()]
    total = np.zeros((2**n, 2**n), complex)
    for c in np.ndindex(*coef.shape):
        term = np.eye(1)
        for j, cj in enumerate(c):
            term = np.kron(term, ops[j][cj])
        total += coef[c] * term
    np.testing.assert_allclose(total, mabk_operator(s), atol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_mabk_square_bound(n, rng):
    # <B_n>^2 <= 2^(n+1): largest eigenvalue magnitude at most 2^((n+1)/2)
    for _ in range(20):
        w = np.linalg.eigvalsh(mabk_operator(_random_settings(n, rng)))
        assert np.max(np.abs(w)) <= 2 ** ((n + 1) / 2) + 1e-10


# expectation


def test_expectation_on_maximally_mixed(rng):
    op = mermin_operator(_random_settings(3, rng))
    assert expectation(op, maximally_mixed(3)) == pytest.approx(np.trace(op).real / 8, abs=1e-15)


def test_expectation_dimension_mismatch(rng):
    with pytest.raises(ValueError):
        expectation(np.eye(4), ghz(3))


def test_oracle_settings_on_ghz_give_four():
    opt = seesaw_maximize(ghz(3), "mermin")
    op = mermin_operator(opt.best_settings)
    assert np.linalg.eigvalsh(op)[-1] == pytest.approx(4, abs=1e-9)
    assert expectation(op, ghz(3)) == pytest.approx(4, abs=1e-9)
    for p in (0.2, 0.55, 0.9):
        assert expectation(op, noisy_ghz_tilde(p)) == pytest.approx(4 * p, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dual_path_agreement(n, rng):
    for _ in range(50):
        rho = random_density_matrix(n, rng)
        s = _random_settings(n, rng)
        direct = expectation(mabk_operator(s), rho)
        assert abs(contracted_expectation(correlation_data(rho), s) - direct) <= 1e-10


def test_contracted_zero_tensor(rng):
    corr = correlation_data(maximally_mixed(3))
    for _ in range(5):
        assert contracted_expectation(corr, _random_settings(3, rng)) == 0.0


def test_contracted_unsupported_n(rng):
    with pytest.raises(ValueError):
        contracted_expectation(correlation_data(ghz(5)), _random_settings(5, rng))


# reshaping and spectra


def test_reshape_ghz_symmetric_matches_printed_matrix():
    ell = 0.3
    m = reshape_tensor(correlation_data(ghz_symmetric(ell, 0.4))).matrix
    printed = 2 * ell * np.array(
        [[1, 0, 0, 0, -1, 0, 0, 0, 0], [0, -1, 0, -1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0, 0, 0, 0]]
    )
    np.testing.assert_allclose(m, printed, atol=1e-14)


@pytest.mark.parametrize("p", [0.4, 1.0])
def test_reshape_w_matches_printed_matrix(p):
    m = reshape_tensor(correlation_data(noisy_w(p))).matrix
    t = 2 / 3
    printed = p * np.array(
        [[0, 0, t, 0, 0, 0, t, 0, 0], [0, 0, 0, 0, 0, t, 0, t, 0], [t, 0, 0, 0, t, 0, 0, 0, -1]]
    )
    np.testing.assert_allclose(m, printed, atol=1e-14)


def test_reshape_four_qubit_product():
    r = reshape_tensor(correlation_data(product_zero(4)))
    assert r.shape == (9, 9)
    expected = np.zeros((9, 9))
    expected[8, 8] = 1
    np.testing.assert_allclose(r.matrix, expected, atol=1e-15)


def test_reshape_split_override():
    corr = correlation_data(ghz(5))
    assert reshape_tensor(corr).shape == (9, 27)
    assert reshape_tensor(corr, 1).shape == (3, 81)
    with pytest.raises(ValueError):
        reshape_tensor(corr, 5)


def test_spectrum_invariants(rng):
    for n in (3, 4):
        spec = singular_spectrum(reshape_tensor(correlation_data(random_density_matrix(n, rng))))
        assert np.all(np.diff(spec.values) <= 0) and np.all(spec.values >= 0)
        k = len(spec.values)
        np.testing.assert_allclose(spec.left.T @ spec.left, np.eye(k), atol=1e-10)
        np.testing.assert_allclose(spec.right.T @ spec.right, np.eye(k), atol=1e-10)


def test_spectrum_reconstructs_matrix(rng):
    r = reshape_tensor(correlation_data(random_density_matrix(4, rng)))
    assert np.max(np.abs(singular_spectrum(r).reconstruct() - r.matrix)) <= 1e-10


@pytest.mark.parametrize("ell, theta", [(0.3, 0.4), (-0.2, 0.1), (0.05, 0.0)])
def test_ghz_symmetric_spectrum(ell, theta):
    spec = singular_spectrum(reshape_tensor(correlation_data(ghz_symmetric(ell, theta))))
    assert spec.lambda_max == pytest.approx(2 * SQRT2 * abs(ell), abs=1e-14)
    assert spec.degeneracy == 2
    assert spec.values[2] == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("p", [0.3, 0.7, 1.0])
def test_noisy_ghz_tilde_spectrum(p):
    spec = singular_spectrum(reshape_tensor(correlation_data(noisy_ghz_tilde(p))))
    assert spec.lambda_max == pytest.approx(SQRT2 * p, abs=1e-14)
    assert spec.degeneracy == 2


@pytest.mark.parametrize("p", [0.5, 1.0])
def test_w_spectrum(p):
    spec = singular_spectrum(reshape_tensor(correlation_data(noisy_w(p))))
    np.testing.assert_allclose(spec.values, p * np.array([math.sqrt(17) / 3, 2 * SQRT2 / 3, 2 * SQRT2 / 3]),
                               atol=1e-12)
    assert spec.degeneracy == 1


# analytic bound


@pytest.mark.parametrize("ell, theta", [(0.3, 0.4), (-0.1, 0.2), (0.25, 0.3)])
def test_bound_ghz_symmetric(ell, theta):
    rep = analytic_bound(ghz_symmetric(ell, theta))
    assert rep.bound == pytest.approx(8 * abs(ell), abs=1e-12)
    assert rep.bound == 2 * SQRT2 * rep.lambda_max
    assert rep.tightness is Tightness.UNDETERMINED


def test_bound_w():
    assert analytic_bound(noisy_w(1)).bound == pytest.approx(2 * math.sqrt(34) / 3, abs=1e-10)


def test_bound_generalized_ghz4_quarter_pi():
    assert analytic_bound(generalized_ghz4(math.pi / 4)).bound == pytest.approx(4 * SQRT2, abs=1e-12)


def test_bound_accepts_correlation_data():
    corr = correlation_data(ghz(3))
    assert analytic_bound(corr).bound == analytic_bound(ghz(3)).bound


def test_bound_rejects_single_qubit():
    with pytest.raises(ValueError):
        analytic_bound(maximally_mixed(1))


def test_report_dict_schema():
    d = analytic_bound(ghz(3)).to_dict()
    assert list(d) == ["lambdaMax", "bound", "degeneracy", "singularValues", "tightness", "classicalBound",
                       "violatesClassical"]
    assert d["classicalBound"] == 2.0 and d["violatesClassical"] is True


def test_classical_bounds():
    assert classical_bound(3) == 2.0
    for n in (2, 4, 5, 6):
        assert classical_bound(n) == 2.0


def test_cauchy_schwarz_bilinear_bound(rng):
    for shape in [(3, 9), (9, 9)]:
        for _ in range(200):
            b = rng.standard_normal(shape)
            lam = singular_spectrum(b).lambda_max
            x, y = rng.standard_normal(shape[0]), rng.standard_normal(shape[1])
            assert abs(x @ b @ y) <= lam * np.linalg.norm(x) * np.linalg.norm(y) + 1e-10
            spec = singular_spectrum(b)
            assert spec.left[:, 0] @ b @ spec.right[:, 0] == pytest.approx(lam, abs=1e-10)


def test_half_angle_inequality():
    lam = 1.7
    for theta in np.linspace(0, math.pi, 181):
        assert lam * (math.cos(theta / 2) + math.sin(theta / 2)) <= SQRT2 * lam + 1e-15


# tightness


def _fake_oracle(value, converged=True, restarts=32):
    s = MeasurementSettings.from_pairs([(X, Y)] * 3)
    return OptResult(value, s, (value,) * restarts, converged, 1)


def test_certify_tight():
    rep = certify_tightness(analytic_bound(ghz_symmetric(0.3, 0.4)), _fake_oracle(2.4))
    assert rep.tightness is Tightness.CERTIFIED_TIGHT
    assert rep.to_dict()["oracleValue"] == 2.4


def test_certify_not_tight_needs_converged_restarts():
    base = analytic_bound(noisy_w(1))
    assert certify_tightness(base, _fake_oracle(3.0)).tightness is Tightness.CERTIFIED_NOT_TIGHT
    assert certify_tightness(base, _fake_oracle(3.0, converged=False)).tightness is Tightness.UNDETERMINED
    assert certify_tightness(base, _fake_oracle(3.0, restarts=8)).tightness is Tightness.UNDETERMINED


def test_certify_raises_when_oracle_beats_bound():
    with pytest.raises(ConsistencyError):
        certify_tightness(analytic_bound(noisy_w(1)), _fake_oracle(4.0))


def test_certify_maximally_mixed():
    rho = maximally_mixed(3)
    rep = certify_tightness(analytic_bound(rho), seesaw_maximize(rho, "mermin"))
    assert rep.bound == 0 and rep.oracle_value == 0
    assert rep.tightness is Tightness.CERTIFIED_TIGHT


def test_certify_w_not_tight():
    rho = noisy_w(1)
    rep = certify_tightness(analytic_bound(rho), seesaw_maximize(rho, "mermin"))
    assert rep.tightness is Tightness.CERTIFIED_NOT_TIGHT


# decomposition of top singular vectors


def test_principal_angle_identities(rng):
    for _ in range(200):
        b, bp, c, cp = random_unit(rng, 4)
        cb, cc = b @ bp, c @ cp
        assert np.sum((np.kron(b, cp) + np.kron(bp, c)) ** 2) == pytest.approx(2 + 2 * cb * cc, abs=1e-12)
        assert np.sum((np.kron(b, c) - np.kron(bp, cp)) ** 2) == pytest.approx(2 - 2 * cb * cc, abs=1e-12)


def test_ghz_symmetric_decomposition():
    spec = singular_spectrum(reshape_tensor(correlation_data(ghz_symmetric(0.3, 0.4))))
    cert = decompose_top_vectors(spec, 3)
    assert cert.decomposed and cert.saturating
    assert cert.principal_angle == pytest.approx(math.pi / 2, abs=1e-12)
    dec = cert.decomposition
    printed = [np.array([0, -1, 0, -1, 0, 0, 0, 0, 0], float), np.array([1, 0, 0, 0, -1, 0, 0, 0, 0], float)]
    # rotating (x, x') by 90 degrees swaps the two forms, so compare as an unordered pair up to sign
    for form in (dec.plus_form, dec.minus_form):
        assert min(np.linalg.norm(form - s * p) for p in printed for s in (1, -1)) <= 1e-8
    assert abs(dec.plus_form @ dec.minus_form) <= 1e-12
    (x, xp), (y, yp) = dec.first, dec.second
    np.testing.assert_allclose(np.kron(x, yp) + np.kron(xp, y), dec.plus_form, atol=1e-12)
    np.testing.assert_allclose(np.kron(x, y) - np.kron(xp, yp), dec.minus_form, atol=1e-12)
    for v in (x, xp, y, yp):
        assert np.linalg.norm(v) == pytest.approx(1, abs=1e-12)


def test_decomposition_forms_lie_in_top_subspace():
    spec = singular_spectrum(reshape_tensor(correlation_data(noisy_ghz_tilde(0.8))))
    dec = decompose_top_vectors(spec, 3).decomposition
    basis = spec.right[:, :2]
    for f in (dec.plus_form, dec.minus_form):
        assert np.linalg.norm(f - basis @ (basis.T @ f)) <= 1e-8


def test_settings_from_certificate_reach_bound():
    rho = ghz_symmetric(-0.35, 0.3)
    reshaped = reshape_tensor(correlation_data(rho))
    cert = decompose_top_vectors(singular_spectrum(reshaped), 3)
    s = settings_from_certificate(reshaped, cert)
    val = contracted_expectation(correlation_data(rho), s)
    assert val == pytest.approx(8 * 0.35, abs=1e-12)
    assert expectation(mermin_operator(s), rho) == pytest.approx(val, abs=1e-12)


def test_non_decomposable_subspace():
    # the top subspace is spanned by vec(I) and vec(diag(-1, 0, 1)); every
    # complex combination is diagonal with entries s - t, s, s + t, never rank one
    m = np.zeros((3, 9))
    m[0] = np.eye(3).reshape(-1) / SQRT3
    m[1] = np.diag([-1.0, 0.0, 1.0]).reshape(-1) / SQRT2
    spec = singular_spectrum(m)
    assert spec.degeneracy == 2
    cert = decompose_top_vectors(spec, 3)
    assert not cert.decomposed
    assert cert.principal_angle is None
    assert cert.candidate_vectors.shape == (2, 9)


def test_four_party_decomposition_ghz4():
    spec = singular_spectrum(reshape_tensor(correlation_data(generalized_ghz4(math.pi / 4))))
    cert = decompose_top_vectors(spec, 4)
    assert cert.decomposed
    dec = cert.decomposition
    (x, xp), (y, yp) = dec.first, dec.second
    np.testing.assert_allclose(np.kron(x, yp) + np.kron(xp, y), dec.plus_form, atol=1e-12)
    basis = spec.left[:, : spec.degeneracy]
    for f in (dec.plus_form, dec.minus_form):
        assert np.linalg.norm(f - basis @ (basis.T @ f)) <= 1e-8


def test_decomposition_requires_degeneracy():
    spec = singular_spectrum(reshape_tensor(correlation_data(noisy_w(1))))
    with pytest.raises(ValueError, match="degenera"):
        decompose_top_vectors(spec, 3)


def test_eq12_identities(rng):
    for _ in range(200):
        c, cp, d, dp = random_unit(rng, 4)
        dplus, dminus = (d + dp) / 2, (d - dp) / 2
        assert np.sum((np.kron(cp, dplus) - np.kron(c, dminus)) ** 2) == pytest.approx(1, abs=1e-12)
        assert np.sum((np.kron(c, dplus) + np.kron(cp, dminus)) ** 2) == pytest.approx(1, abs=1e-12)
