import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacobi_spectra.background import BorgData, floquet_w, green, reconstruct
from jacobi_spectra.errors import ValidationError
from jacobi_spectra.perturbation import Perturbation, kernel_A, kernel_A_tilde, kernel_tilde_matrix, moments
from jacobi_spectra.regions import constants
from jacobi_spectra.verify import random_perturbation


def test_single_site_moments():
    bg = reconstruct(BorgData(1, 3, 0, -1))
    pert = Perturbation.from_deviations(bg, db=[0.1j])
    mo = moments(pert, bg)
    assert mo.d_seq.tolist() == pytest.approx([0.1, 0.0])
    assert mo.total0 == pytest.approx(0.1) and mo.total1 == pytest.approx(0.1)


def test_zero_perturbation_moments():
    bg = reconstruct(BorgData(1, 3, 0.5, 1))
    mo = moments(Perturbation.zero(bg, 5), bg)
    assert np.all(mo.d_seq == 0) and mo.total0 == 0 and mo.total1 == 0


def test_product_cancellation():
    bg = reconstruct(BorgData(1, 3, 0, -1))
    a0 = bg.a1
    pert = Perturbation(a=[2 * a0], b=[bg.b1], c=[a0 / 2])
    mo = moments(pert, bg)
    assert np.all(mo.d_seq == 0)


def test_validation():
    with pytest.raises(ValidationError):
        Perturbation(a=[1.0, 0.0], b=[0, 0], c=[1, 1])
    with pytest.raises(ValidationError):
        Perturbation(a=[1.0], b=[0, 0], c=[1])
    with pytest.raises(ValidationError):
        Perturbation(a=[np.nan], b=[0], c=[1])


def test_entries_are_read_only():
    bg = reconstruct(BorgData(1, 3, 0, -1))
    pert = Perturbation.from_deviations(bg, db=[0.1, 0.2])
    with pytest.raises(ValueError):
        pert.b[0] = 3.0
    assert pert.entries(bg, 2) == (bg.a2, bg.b2 + 0.2, bg.a2)
    assert pert.entries(bg, 7) == (bg.a1, bg.b1, bg.a1)


@given(st.integers(1, 12), st.integers(0, 10_000))
@settings(max_examples=100, deadline=None)
def test_kappa_monotone(M, seed):
    bg = reconstruct(BorgData(1, 3, 0.5, 1))
    pert = random_perturbation(bg, M, 0.7, np.random.default_rng(seed))
    mo = moments(pert, bg)
    k0 = [mo.kappa0(n) for n in range(M + 4)]
    k1 = [mo.kappa1(n) for n in range(M + 4)]
    assert all(x >= y for x, y in zip(k0, k0[1:]))
    assert all(x >= y for x, y in zip(k1, k1[1:]))
    assert k0[M + 1 :] == [0.0] * 3 and k1[M + 1 :] == [0.0] * 3
    assert mo.kappa0(0) == pytest.approx(mo.total0) and mo.kappa1(0) == pytest.approx(mo.total1)


def test_kernel_against_definition(ref, rng):
    borg, bg = ref
    pert = random_perturbation(bg, 4, 0.5, rng)
    db, da = pert.delta_b(bg), pert.delta_a(bg)
    lam = 0.4 + 0.9j
    for n in range(6):
        for m in range(7):
            expect = 0j
            if m > n and m <= pert.support + 1:
                if m <= pert.support:
                    expect += db[m] * green(borg, bg, lam, n, m)
                expect += da[m - 1] * green(borg, bg, lam, n, m - 1)
            assert kernel_A(pert, borg, bg, lam, n, m) == pytest.approx(expect, rel=1e-12, abs=1e-14)


def test_kernel_first_superdiagonal(ref, rng):
    borg, bg = ref
    pert = random_perturbation(bg, 5, 0.5, rng)
    db = pert.delta_b(bg)
    for lam in (2.0 + 0.5j, -0.1 + 0.01j, 40.0):
        for n in range(1, 6):
            assert kernel_A(pert, borg, bg, lam, n - 1, n) == pytest.approx(db[n] / bg.a(n - 1), rel=1e-12)
        assert kernel_A(pert, borg, bg, lam, 3, 3) == 0
        assert kernel_A(pert, borg, bg, lam, 2, 9) == 0


def test_kernel_zero_perturbation(ref):
    borg, bg = ref
    pert = Perturbation.zero(bg, 4)
    assert np.all(kernel_tilde_matrix(pert, borg, bg, np.array([0.3j, 5.0])) == 0)


def test_kernel_tilde_scaling_and_matrix(ref, rng):
    borg, bg = ref
    pert = random_perturbation(bg, 3, 0.5, rng)
    lam = np.array([0.3 + 0.4j, -5 + 1j])
    mat = kernel_tilde_matrix(pert, borg, bg, lam)
    w = floquet_w(borg, lam)
    for n in range(pert.support + 3):
        for m in range(pert.support + 3):
            at = kernel_A_tilde(pert, borg, bg, lam, n, m)
            assert mat[n, m] == pytest.approx(at, rel=1e-13, abs=1e-15)
            if m > n:
                assert kernel_A(pert, borg, bg, lam, n, m) * w ** (m - n) == pytest.approx(at, rel=1e-12, abs=1e-15)


def test_kernel_bounds_on_grid(ref, rng):
    borg, bg = ref
    K1 = constants(borg).K1
    pert = random_perturbation(bg, 6, 0.3, rng)
    dm = np.concatenate(([0.0], moments(pert, bg).d_seq))
    r = 2 * borg.d * np.sqrt(rng.uniform(0, 1, 2000))
    lam = r * np.exp(2j * np.pi * rng.uniform(0, 1, 2000))
    keep = borg.dist_to_band_edges(lam) > 1e-3
    if borg.eps == 1:
        keep &= np.abs(lam - borg.nu) > 1e-3
    lam = lam[keep]
    w = floquet_w(borg, lam)
    At = np.abs(kernel_tilde_matrix(pert, borg, bg, lam))
    for n in range(pert.support + 1):
        for m in range(n + 1, pert.support + 2):
            assert np.all(At[n, m] * np.abs(1 - w**4) / np.abs(w) <= K1 * dm[m])
            assert np.all(At[n, m] <= K1 * (m - n) * dm[m] * np.abs(w))
