import numpy as np
import pytest

from contstab import (
    Annulus,
    BernsteinEllipse,
    ConditioningError,
    ConfigurationError,
    HalfPlaneGeometry,
    ResolutionError,
    annulus_branch_rates,
    basis_for,
    build,
    parfenov_rate,
    solve,
    solve_numeric,
    spectrum,
)
from contstab.nystrom import apply, symmetric_projector

ANNULUS = Annulus(0.25, 0.5)


@pytest.fixture(scope="module")
def annulus_op():
    return build(ANNULUS, 256)


@pytest.fixture(scope="module")
def annulus_spectrum(annulus_op):
    return spectrum(annulus_op)


def _closed_form(geometry, count):
    b = basis_for(geometry)
    return np.sort(b.eigenvalue(b.indices(count)))[::-1][:count]


@pytest.mark.parametrize("M", [15, 17, 8, 2.5, True])
def test_node_count_validation(M):
    with pytest.raises(ConfigurationError):
        build(ANNULUS, M)


def test_row_sum_is_direct_quadrature():
    op = build(ANNULUS, 64)
    ones = np.ones(op.size)
    tau = op.nodes
    direct = np.array([sum(op.kernel(t, s) * (2 * np.pi * 0.5 / 64) for s in tau) for t in tau])
    assert np.allclose(op.matrix @ ones, direct, rtol=0, atol=1e-13)
    assert np.allclose(apply(op, ones, tau), direct, atol=1e-13)


@pytest.mark.parametrize("geometry", [ANNULUS, HalfPlaneGeometry(0.6), BernsteinEllipse(2.0)])
def test_matrix_hermitian(geometry):
    op = build(geometry, 128)
    assert np.max(np.abs(op.matrix - op.matrix.conj().T)) < 1e-13
    assert not op.matrix.flags.writeable


def test_spectral_convergence_under_doubling():
    a = spectrum(build(ANNULUS, 128), "dense").eigenvalues[:10]
    b = spectrum(build(ANNULUS, 256), "dense").eigenvalues[:10]
    assert np.max(np.abs(a / b - 1)) < 1e-12


def test_annulus_top_eigenvalue(annulus_spectrum):
    assert annulus_spectrum.eigenvalues[0] == pytest.approx(np.pi, rel=1e-10)


def test_annulus_spectrum_against_closed_form(annulus_spectrum):
    mu = annulus_spectrum.eigenvalues[:15]
    assert np.max(np.abs(mu / _closed_form(ANNULUS, 15) - 1)) < 1e-9


def test_halfplane_spectrum_against_closed_form():
    mu = spectrum(build(HalfPlaneGeometry(0.6), 256)).eigenvalues
    k = np.arange(9)
    assert np.max(np.abs(mu[:9] / (9.0 ** -k / 3) - 1)) < 1e-8


def test_ellipse_view_spectrum_is_symmetric_subspace_spectrum():
    g = BernsteinEllipse(2.0)
    mu = spectrum(build(g, 256)).eigenvalues[:15]
    assert np.max(np.abs(mu / _closed_form(g, 15) - 1)) < 1e-9


def test_dense_agrees_with_accurate_on_leading_values(annulus_op, annulus_spectrum):
    dense = spectrum(annulus_op, "dense")
    assert np.allclose(dense.eigenvalues[:6], annulus_spectrum.eigenvalues[:6], rtol=1e-12)
    assert dense.eigenvalues.size == 256


def test_spectrum_invariants(annulus_spectrum):
    mu = annulus_spectrum.eigenvalues
    assert np.all(np.diff(mu) <= 0)
    assert np.all(mu[: annulus_spectrum.valid_count] > 0)
    assert mu[annulus_spectrum.valid_count - 1] > annulus_spectrum.noise_floor
    assert annulus_spectrum.noise_floor == pytest.approx(1e3 * np.finfo(float).eps * mu[0])


def test_unknown_method(annulus_op):
    with pytest.raises(ConfigurationError):
        spectrum(annulus_op, "lanczos")


def test_parfenov_disk_proxy():
    rep = parfenov_rate(build(Annulus(1e-9, 0.5), 256))
    assert rep.valid_count >= 5
    assert np.max(np.abs(rep.ratios - 0.25)) < 1e-6
    assert np.max(np.abs(rep.prefactors - 2 * np.pi)) < 1e-6
    assert rep.rho_hat == pytest.approx(0.5, abs=1e-6)
    assert rep.r_squared > 0.999999


def test_parfenov_requires_disk_proxy(annulus_op):
    with pytest.raises(ConfigurationError):
        parfenov_rate(annulus_op)


def test_parfenov_insufficient_resolution():
    op = build(Annulus(1e-9, 0.5), 16)
    spec = spectrum(op, "dense")
    short = type(spec)(spec.eigenvalues[:3], 3, spec.noise_floor, spec.slope, spec.intercept, spec.method)
    with pytest.raises(ResolutionError):
        parfenov_rate(op, short)


@pytest.mark.parametrize("rho, r", [(0.2, 0.5), (0.05, 0.6), (0.25, 0.5)])
def test_annulus_branch_rates_descriptive(rho, r):
    op = build(Annulus(rho, r), 128)
    spec = spectrum(op)
    rep = annulus_branch_rates(op, spec)
    assert rep.outer_count + rep.inner_count == spec.valid_count
    assert rep.outer_expected == pytest.approx(r * r) and rep.inner_expected == pytest.approx((rho / r) ** 2)
    assert rep.outer_rate == pytest.approx(r * r, rel=1e-8)
    assert rep.inner_rate == pytest.approx((rho / r) ** 2, rel=1e-8)


def test_branch_rates_reject_symmetric_operator():
    op = build(BernsteinEllipse(2.0), 64)
    with pytest.raises(ConfigurationError):
        annulus_branch_rates(op)


def test_numeric_solve_against_spectral(annulus_op):
    eps = 1e-3
    num = solve_numeric(annulus_op, 0.75, eps)
    ref = solve(ANNULUS, 0.75, eps)
    assert num.residual < 1e-10
    pts = np.array([rad * np.exp(1j * (0.3 + k * np.pi / 2)) for rad in (0.6, 0.7, 0.8, 0.9) for k in range(4)])
    assert np.max(np.abs(num(pts) / ref(pts) - 1)) < 1e-6
    assert num.norm_gamma ** 2 == pytest.approx(ref.norm_Gamma ** 2, rel=1e-6)


def test_numeric_solve_on_grid_needs_no_extension(annulus_op):
    num = solve_numeric(annulus_op, 0.75, 1e-3)
    ref = solve(ANNULUS, 0.75, 1e-3)
    assert np.max(np.abs(num.grid_values / ref(annulus_op.nodes) - 1)) < 1e-6


def test_numeric_solve_halfplane_and_ellipse():
    g = HalfPlaneGeometry(0.6)
    num = solve_numeric(build(g, 256), 3j, 1e-3)
    assert complex(num(3j)).real == pytest.approx(solve(g, 3j, 1e-3).value_at_z, rel=1e-6)
    e = BernsteinEllipse(2.0)
    num = solve_numeric(build(e, 256), 0.5j, 1e-3)
    assert complex(num(num.z)).real == pytest.approx(solve(e, 0.5j, 1e-3).value_at_z, rel=1e-6)


def test_numeric_solve_refuses_small_eps(annulus_op):
    with pytest.raises(ConditioningError):
        solve_numeric(annulus_op, 0.75, 1e-7)


def test_projector_commutes_with_full_operator():
    view = BernsteinEllipse(2.0).annulus_view
    op = build(view, 256)
    P = symmetric_projector(op)
    assert np.allclose(P @ P, P)
    assert np.linalg.norm(P @ op.matrix - op.matrix @ P, 2) < 1e-8
    with pytest.raises(ConfigurationError):
        symmetric_projector(build(Annulus(0.2, 0.5), 32))
