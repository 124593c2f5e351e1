import numpy as np
import pytest

from jacobi_spectra.background import BorgData, reconstruct
from jacobi_spectra.errors import ContourError, ValidationError
from jacobi_spectra.jost import jost_value, regularized_jost_values
from jacobi_spectra.perturbation import Perturbation, moments
from jacobi_spectra.regions import Rect, constants, criterion_lhs
from jacobi_spectra.verify import (
    Circle,
    contour_clearance,
    contour_points,
    finite_section,
    locate_zeros,
    random_perturbation,
    section_eigenvalues,
    section_size,
    truncated_eigs,
    winding,
)


def test_one_by_one_section():
    bg = reconstruct(BorgData(1, 3, 0.5, 1))
    pert = Perturbation.from_deviations(bg, db=[0.25j])
    assert section_eigenvalues(pert, bg, 1) == pytest.approx([0.5 + 0.25j])
    with pytest.raises(ValidationError):
        finite_section(pert, bg, 0)


def test_section_against_dense_eigvals(rng):
    bg = reconstruct(BorgData(1, 3, 0.2, -1))
    pert = random_perturbation(bg, 6, 1.0, rng)
    sub, diag, sup = finite_section(pert, bg, 30)
    dense = np.diag(diag) + np.diag(sup, 1) + np.diag(sub, -1)
    ref = np.sort_complex(np.linalg.eigvals(dense))
    assert section_eigenvalues(pert, bg, 30) == pytest.approx(ref, abs=1e-10)


def test_section_size_parity():
    assert section_size(BorgData(1, 3, 0, -1), 200) == 200
    assert section_size(BorgData(1, 3, 0, -1), 201) == 202
    assert section_size(BorgData(1, 3, 0, 1), 200) == 201


def test_zero_perturbation_oracle(ref):
    borg, bg = ref
    res = truncated_eigs(Perturbation.zero(bg, 0), borg, bg, 200)
    if borg.eps == -1:
        assert len(res.filtered) == 0
    else:
        # the background's own gap eigenvalue
        assert res.filtered == pytest.approx([borg.nu], abs=1e-10)
    assert set(map(complex, res.filtered)) <= set(map(complex, res.eigenvalues))
    assert all(res.stable[np.isin(res.eigenvalues, res.filtered)])


def test_truncation_too_small():
    bg = reconstruct(BorgData(1, 3, 0, -1))
    with pytest.raises(ValidationError):
        truncated_eigs(Perturbation.zero(bg, 10), BorgData(1, 3, 0, -1), bg, 25)


def test_large_single_site(ref):
    borg, bg = ref
    pert = Perturbation.from_deviations(bg, db=[5j])
    res = truncated_eigs(pert, borg, bg, 200)
    near_site = [z for z in res.filtered if abs(z - (bg.b1 + 5j)) < 1.5]
    assert len(near_site) == 1
    for z in res.filtered:
        assert abs(regularized_jost_values(pert, borg, bg, z)) < 1e-6 * (1 + abs(z))
        assert winding(pert, borg, bg, Circle(z, 1e-3)).zeros_inside == 1
    z = near_site[0]
    assert abs(jost_value(pert, borg, bg, z)) < 1e-6 * (1 + abs(z))


def test_winding_zero_perturbation(ref):
    borg, bg = ref
    pert = Perturbation.zero(bg, 2)
    for c in (Circle(0.2 + 1j, 0.5), Rect(3.5, 6, -1, 1), Rect(-0.8, 0.8, -0.5, 0.5) if borg.eps == -1 else Rect(-8, 8, 2, 3)):
        res = winding(pert, borg, bg, c)
        assert res.zeros_inside == 0 and res.min_modulus_on_contour > 0


def test_winding_counts_background_eigenvalue():
    borg = BorgData(1, 3, 0.5, 1)
    bg = reconstruct(borg)
    res = winding(Perturbation.zero(bg, 0), borg, bg, Rect(-0.4, 0.9, -0.3, 0.3))
    assert res.zeros_inside == 1


def test_winding_rejects_bad_contours(ref):
    borg, bg = ref
    pert = Perturbation.from_deviations(bg, db=[0.5])
    with pytest.raises(ContourError):
        winding(pert, borg, bg, Rect(2, 4, -1, 1))
    with pytest.raises(ContourError):
        winding(pert, borg, bg, Circle(1.0005 + 0j, 0.0001))
    if borg.eps == 1:
        with pytest.raises(ContourError):
            winding(pert, borg, bg, Circle(borg.nu + 1e-4, 1e-4))


def test_winding_rejects_zero_on_contour():
    borg = BorgData(1, 3, 0, -1)
    bg = reconstruct(borg)
    pert = Perturbation.from_deviations(bg, db=[5j])
    z = truncated_eigs(pert, borg, bg, 100).filtered[0]
    with pytest.raises(ContourError):
        winding(pert, borg, bg, Circle(z - 0.5, 0.5))


def test_contour_geometry():
    pts = contour_points(Rect(0, 2, 0, 1), np.array([0, 0.25, 0.5, 0.75, 1.0]))
    assert pts == pytest.approx([0, 2, 2 + 1j, 1j, 0])
    c = contour_points(Circle(1j, 2), np.array([0.0, 0.25]))
    assert c == pytest.approx([2 + 1j, 3j])
    assert contour_clearance(BorgData(1, 3, 0, -1), Circle(0j, 0.5)) == pytest.approx(0.5)


def test_locate_zeros_matches_oracle(ref, rng):
    borg, bg = ref
    pert = random_perturbation(bg, 6, 2.0, rng)
    res = truncated_eigs(pert, borg, bg, 200)
    delta = res.delta
    search = locate_zeros(pert, borg, bg, Rect(-8, 8.1, -6, 6.3), delta)
    found = np.array(search.zeros)
    found = found[borg.dist_to_continuous_spectrum(found) > delta + 1e-9] if found.size else found
    assert len(found) == len(res.filtered)
    for z in res.filtered:
        assert np.min(np.abs(found - z)) < 1e-6
        assert abs(regularized_jost_values(pert, borg, bg, z)) < 1e-6 * (1 + abs(z))


def test_region_free_of_eigenvalues(ref, rng):
    borg, bg = ref
    params = constants(borg)
    pert = random_perturbation(bg, 5, 0.2, rng)
    total0 = moments(pert, bg).total0
    for z in truncated_eigs(pert, borg, bg, 200).filtered:
        lhs = criterion_lhs(borg, params, total0, z)
        assert np.isnan(lhs) or lhs >= params.t
