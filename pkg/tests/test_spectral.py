import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from contstab import (
    Annulus,
    BernsteinEllipse,
    ConfigurationError,
    HalfPlaneGeometry,
    basis_annulus,
    basis_annulus_symmetric,
    basis_for,
    basis_halfplane,
    project_symmetric,
)
from contstab.spectral import annulus_inner_product, kernel_annulus, kernel_halfplane, laurent_coefficients


def _circle_integral(f, center, radius):
    """int over |tau - center| = radius of f(tau) |dtau| with adaptive quadrature."""
    def part(fn):
        return integrate.quad(lambda t: fn(center + radius * cmath.exp(1j * t)), 0, 2 * math.pi,
                              limit=200, epsabs=1e-13, epsrel=1e-12)[0] * radius
    return part(lambda x: f(x).real) + 1j * part(lambda x: f(x).imag)


def test_annulus_kernel_is_sum_of_eigenfunction_products():
    a = Annulus(0.25, 0.5)
    b = basis_annulus(a)
    zeta, tau = 0.6 + 0.2j, -0.4 + 0.5j
    n = np.arange(-200, 201)
    direct = np.sum(b.eigenfunction(n, zeta) * np.conj(b.eigenfunction(n, tau)))
    assert complex(kernel_annulus(zeta, tau, a)) == pytest.approx(direct, rel=1e-13)


def test_halfplane_kernel_is_sum_of_eigenfunction_products():
    g = HalfPlaneGeometry(0.6)
    b = basis_halfplane(g)
    zeta, tau = 0.3 + 2j, -0.5 + 1.1j
    n = np.arange(0, 400)
    direct = np.sum(b.eigenfunction(n, zeta) * np.conj(b.eigenfunction(n, tau)))
    assert complex(kernel_halfplane(zeta, tau)) == pytest.approx(direct, rel=1e-12)


@given(st.floats(0.05, 0.4), st.floats(0.45, 0.95), st.floats(0.3, 0.99), st.floats(0.3, 0.99),
       st.floats(0, 6.28), st.floats(0, 6.28))
def test_annulus_kernel_hermitian(rho, r, s1, s2, t1, t2):
    a = Annulus(rho, r)
    z = (rho + s1 * (1 - rho)) * cmath.exp(1j * t1)
    w = (rho + s2 * (1 - rho)) * cmath.exp(1j * t2)
    assert complex(kernel_annulus(z, w, a)) == pytest.approx(np.conj(kernel_annulus(w, z, a)), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n", [-3, -1, 0, 1, 4])
def test_annulus_eigenvalue_is_l2_norm_on_data_circle(n):
    a = Annulus(0.25, 0.5)
    b = basis_annulus(a)
    val = _circle_integral(lambda x: abs(complex(b.eigenfunction(n, x))) ** 2, 0, a.r)
    assert float(b.eigenvalue(n)) == pytest.approx(val.real, rel=1e-12)


@pytest.mark.parametrize("n", [0, 2, 5])
def test_annulus_eigen_equation(n):
    # (K e_n)(zeta) = int_Gamma p(zeta, tau) e_n(tau) |dtau| = lambda_n e_n(zeta)
    a = Annulus(0.25, 0.5)
    b = basis_annulus(a)
    zeta = 0.8 * cmath.exp(0.4j)
    lhs = _circle_integral(lambda t: complex(kernel_annulus(zeta, t, a)) * complex(b.eigenfunction(n, t)), 0, a.r)
    rhs = complex(b.eigenvalue(n) * b.eigenfunction(n, zeta))
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_annulus_first_eigenvalue_is_two_pi_r():
    b = basis_annulus(Annulus(0.25, 0.5))
    assert float(b.eigenvalue(0)) == pytest.approx(math.pi, rel=1e-15)


def _real_line_inner(f, g):
    # x = tan(t) keeps the integration interval finite
    def integrand(t, part):
        x = math.tan(t)
        v = f(x) * np.conj(g(x)) / math.cos(t) ** 2
        return v.real if part == 0 else v.imag
    re = integrate.quad(integrand, -math.pi / 2, math.pi / 2, args=(0,), limit=400, epsabs=1e-13)[0]
    im = integrate.quad(integrand, -math.pi / 2, math.pi / 2, args=(1,), limit=400, epsabs=1e-13)[0]
    return re + 1j * im


@pytest.mark.parametrize("n, m", [(0, 0), (1, 1), (3, 3), (0, 1), (2, 5)])
def test_halfplane_basis_orthonormal_on_real_line(n, m):
    b = basis_halfplane(HalfPlaneGeometry(0.6))
    val = _real_line_inner(lambda x: complex(b.eigenfunction(n, x)), lambda x: complex(b.eigenfunction(m, x)))
    assert val == pytest.approx(1.0 if n == m else 0.0, abs=1e-10)


@pytest.mark.parametrize("n", [0, 1, 4])
def test_halfplane_eigenvalues(n):
    g = HalfPlaneGeometry(0.6)
    b = basis_halfplane(g)
    val = _circle_integral(lambda x: abs(complex(b.eigenfunction(n, x))) ** 2, 1j, g.r)
    assert float(b.eigenvalue(n)) == pytest.approx(val.real, rel=1e-11)
    assert float(b.eigenvalue(n)) == pytest.approx(g.rho ** (2 * n + 1), rel=1e-13)
    assert float(b.eigenvalue(n)) == pytest.approx(9.0 ** (-n) / 3.0, rel=1e-13)


def test_symmetric_basis_requires_symmetric_annulus():
    with pytest.raises(ConfigurationError):
        basis_annulus_symmetric(Annulus(0.25, 0.6))


@pytest.mark.parametrize("n", [0, 1, 3])
def test_symmetric_eigenvalues(n):
    a = BernsteinEllipse(2.0).annulus_view
    b = basis_annulus_symmetric(a)
    val = _circle_integral(lambda x: abs(complex(b.eigenfunction(n, x))) ** 2, 0, a.r)
    assert float(b.eigenvalue(n)) == pytest.approx(val.real, rel=1e-12)
    assert float(b.eigenvalue(n)) == pytest.approx(2 * math.pi * math.sqrt(a.rho) * a.rho ** n, rel=1e-13)


def test_symmetric_basis_orthonormal_in_annulus_product():
    a = BernsteinEllipse(2.0).annulus_view
    b = basis_annulus_symmetric(a)
    gram = np.array([[annulus_inner_product(lambda z, i=i: b.eigenfunction(i, z),
                                            lambda z, j=j: b.eigenfunction(j, z), a, count=16)
                      for j in range(5)] for i in range(5)])
    assert np.allclose(gram, np.eye(5), atol=1e-12)


def test_symmetric_kernel_is_projected_kernel():
    a = BernsteinEllipse(2.0).annulus_view
    b = basis_annulus_symmetric(a)
    tau = 0.7 * cmath.exp(1.1j)
    proj = project_symmetric(lambda z: kernel_annulus(z, tau, a), a)
    zeta = np.array([0.6 + 0.1j, -0.3 + 0.5j])
    assert np.allclose(proj(zeta), b.kernel(zeta, tau), rtol=1e-14)
    n = np.arange(0, 200)
    direct = np.sum(b.eigenfunction(n, zeta[0]) * np.conj(b.eigenfunction(n, tau)))
    assert complex(b.kernel(zeta[0], tau)) == pytest.approx(direct, rel=1e-13)


def test_laurent_coefficients_of_known_function():
    n, c = laurent_coefficients(lambda z: 3 * z ** 2 + 0.5 / z, 0.7, 4)
    expect = {2: 3.0, -1: 0.5}
    for k, v in zip(n, c):
        assert v == pytest.approx(expect.get(int(k), 0.0), abs=1e-13)


def test_annulus_inner_product_matches_basis_norms():
    a = Annulus(0.25, 0.5)
    b = basis_annulus(a)
    assert annulus_inner_product(lambda z: b.eigenfunction(-2, z), lambda z: b.eigenfunction(-2, z), a, count=8) \
        == pytest.approx(1.0, rel=1e-12)
    assert annulus_inner_product(lambda z: b.eigenfunction(3, z), lambda z: b.eigenfunction(-1, z), a, count=8) \
        == pytest.approx(0.0, abs=1e-13)


def test_basis_for_dispatch():
    assert type(basis_for(Annulus(0.25, 0.5))).__name__ == "AnnulusBasis"
    assert type(basis_for(HalfPlaneGeometry(0.5))).__name__ == "HalfPlaneBasis"
    assert type(basis_for(BernsteinEllipse(2))).__name__ == "SymmetricAnnulusBasis"
    with pytest.raises(TypeError):
        basis_for("disk")
