import math

import numpy as np
import pytest

from osclab import (
    BumpSymbol,
    PhasePoint,
    PolySymbol,
    QuadratureConvergenceError,
    QuadratureSpec,
    annihilate,
    basis_state,
    compose_flow,
    compose_linear,
    energy_symbol,
    expectation,
    hbar_schedule,
    inner_product,
    microlocal_norm,
    quadrature_expectation,
    random_ortho_symplectic,
    reference_state,
    transport_reference,
    w_symbol,
    wbar_symbol,
    weyl_apply,
    weyl_apply_average,
)
from osclab.weyl import _weyl_1d

from conftest import random_sparse_state


# -- symbol algebra -----------------------------------------------------------

def test_symbol_constructors_and_degree():
    p = energy_symbol(2)
    assert p.degree == 2 and p.is_real()
    a = w_symbol(2, 1) * wbar_symbol(2, 2)
    assert a.degree == 2
    assert (a + a.conj()).is_real()
    assert PolySymbol.one(3).degree == 0


def test_symbol_product_is_pointwise():
    d = 2
    a = w_symbol(d, 1) + 2.0 * wbar_symbol(d, 2)
    b = energy_symbol(d)
    z = PhasePoint(np.array([0.3, -0.1]), np.array([0.2, 0.5]))
    assert (a * b).value(z) == pytest.approx(a.value(z) * b.value(z), rel=1e-14)


def test_real_symbol_condition():
    bad = PolySymbol.monomial((1, 0), (0, 0), 1.0)  # conj(w_1) alone is not real
    assert not bad.is_real()


# -- normal-ordering table ----------------------------------------------------

def test_weyl_table_small_cases():
    # W(1,1) = A*A + h,  W(2,1) = (A*)^2 A + 2h A*
    assert _weyl_1d(1, 1) == ((0, 0, 1, 1.0), (1, 1, 0, 1.0))
    assert _weyl_1d(2, 1) == ((1, 0, 1, 2.0), (2, 1, 0, 1.0))
    # closed form k! C(b,k) C(g,k): W(2,2) = (A*)^2 A^2 + 4h A*A + 2h^2
    assert _weyl_1d(2, 2) == ((0, 0, 2, 2.0), (1, 1, 1, 4.0), (2, 2, 0, 1.0))


def test_weyl_table_integer_coefficients_up_to_degree_8():
    from math import comb, factorial
    for b in range(5):
        for g in range(5):
            table = {(p, q, k): r for (p, q, k, r) in _weyl_1d(b, g)}
            for k in range(min(b, g) + 1):
                want = float(factorial(k) * comb(b, k) * comb(g, k))
                assert table[(b - k, g - k, k)] == want


# -- weyl_apply ---------------------------------------------------------------

def test_quantization_of_one_is_identity(rng):
    u = random_sparse_state(2, 0.2, 5, rng)
    out = weyl_apply(PolySymbol.one(2), u)
    assert out.coeffs == u.coeffs


def test_energy_acts_as_scalar_on_levels():
    for n, d in ((3, 1), (5, 2), (2, 3)):
        h = 0.37
        alpha = (n,) + (0,) * (d - 1)
        u = basis_state(alpha, h)
        out = weyl_apply(energy_symbol(d), u)
        assert set(out.coeffs) == {alpha}
        assert out.amplitude(alpha) == pytest.approx((2 * n + d) * h, rel=1e-15)


def test_w_symbol_quantizes_to_annihilation(rng):
    # oracle: ladder_apply
    n, h = 9, 1.0 / 19.0
    u = basis_state((n,), h)
    out = weyl_apply(w_symbol(1, 1), u)
    oracle = annihilate(1, u)
    assert out.coeffs == oracle.coeffs
    assert out.amplitude((n - 1,)) == pytest.approx(math.sqrt(2 * h * n), rel=1e-15)


def test_weyl_apply_linearity(rng):
    d, h = 2, 0.25
    u = random_sparse_state(d, h, 4, rng)
    v = random_sparse_state(d, h, 4, rng)
    a = w_symbol(d, 1) * w_symbol(d, 1) + 0.5 * energy_symbol(d)
    left = weyl_apply(a, u.add(v.scaled(2.0)))
    right = weyl_apply(a, u).add(weyl_apply(a, v).scaled(2.0))
    diff = left.add(right.scaled(-1.0))
    assert diff.norm() <= 1e-14 * max(1.0, right.norm())


def test_weyl_apply_level_bounds(rng):
    u = random_sparse_state(2, 0.2, 6, rng)
    a = energy_symbol(2) * energy_symbol(2)  # degree 4
    out = weyl_apply(a, u)
    levels = {sum(alpha) for alpha in out.coeffs}
    umin = min(sum(alpha) for alpha in u.coeffs)
    umax = max(sum(alpha) for alpha in u.coeffs)
    assert all(umin - 4 <= l <= umax + 4 for l in levels)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_recursion_matches_permutation_average(seed):
    rng = np.random.default_rng(seed)
    for d in (1, 2):
        h = float(rng.uniform(0.05, 0.8))
        u = random_sparse_state(d, h, 5, rng)
        for _ in range(6):
            beta = tuple(int(rng.integers(0, 3)) for _ in range(d))
            gamma = tuple(int(rng.integers(0, 3)) for _ in range(d))
            if sum(beta) + sum(gamma) > 6:
                continue
            a = PolySymbol.monomial(beta, gamma, 1.0)
            r1 = weyl_apply(a, u)
            r2 = weyl_apply_average(a, u)
            assert r1.add(r2.scaled(-1.0)).norm() <= 1e-12


def test_permutation_average_degree_guard():
    with pytest.raises(ValueError):
        weyl_apply_average(PolySymbol.monomial((4,), (4,)), basis_state((0,), 1.0))


def test_weyl_apply_rejects_bumps():
    bump = BumpSymbol(PhasePoint(np.zeros(1), np.zeros(1)), 0.2)
    with pytest.raises(TypeError):
        weyl_apply(bump, basis_state((0,), 1.0))


# -- expectation --------------------------------------------------------------

def test_energy_expectation_is_one_on_schedule():
    for n, d in ((8, 1), (16, 2), (64, 3)):
        u = reference_state(n, d)
        assert expectation(energy_symbol(d), u, u) == 1.0 + 0.0j


def test_level_changing_symbol_has_zero_diagonal():
    u = reference_state(7, 2)
    assert expectation(w_symbol(2, 1), u, u) == 0.0 + 0.0j


def test_quartic_energy_expectation_closed_form():
    # exact ladder value 4 h^2 n(n+1) + 2 h^2 against the implementation
    for n in (4, 12, 33):
        h = hbar_schedule(n, 1)
        u = reference_state(n, 1)
        a = energy_symbol(1) * energy_symbol(1)
        val = expectation(a, u, u)
        assert val.real == pytest.approx(4 * h * h * n * (n + 1) + 2 * h * h, rel=1e-14)
        assert val.imag == 0.0


def test_self_adjointness(rng):
    d, h = 2, 0.2
    u = random_sparse_state(d, h, 5, rng)
    v = random_sparse_state(d, h, 5, rng)
    a = energy_symbol(d) + w_symbol(d, 1) + wbar_symbol(d, 1)
    assert a.is_real()
    assert expectation(a, u, v) == pytest.approx(expectation(a, v, u).conjugate(),
                                                 abs=1e-12)
    assert abs(expectation(a, u, u).imag) <= 1e-12


def test_commutator_with_energy_vanishes_on_eigenstates(rng):
    d = 2
    n = 11
    u = transport_reference(n, random_ortho_symplectic(d, rng))
    p = energy_symbol(d)
    a = w_symbol(d, 1) * wbar_symbol(d, 2) + energy_symbol(d)
    pa = inner_product(weyl_apply(a, weyl_apply(p, u)), u)
    ap = inner_product(weyl_apply(p, weyl_apply(a, u)), u)
    assert abs(ap - pa) <= 1e-12


def test_product_rule_remainder_is_order_h():
    # |<a^w b^w u, u> - <(ab)^w u, u>| <= C h with C bounded along the schedule
    d = 1
    a = energy_symbol(d) + w_symbol(d, 1) + wbar_symbol(d, 1)
    b = w_symbol(d, 1) * w_symbol(d, 1) + wbar_symbol(d, 1) * wbar_symbol(d, 1)
    ratios = []
    for n in (10, 20, 40, 80, 100):
        u = reference_state(n, d)
        composed = inner_product(weyl_apply(a, weyl_apply(b, u)), u)
        product = expectation(a * b, u, u)
        ratios.append(abs(composed - product) / u.hbar)
    # the ratio converges to a finite limit; bound it by a loose constant
    assert max(ratios) <= 3.0 * ratios[0] + 1.0


def test_garding_positivity_at_the_limit(rng):
    # a = |q|^2 >= 0 pointwise: expectation >= -C h with C bounded
    d = 1
    for _ in range(5):
        q = PolySymbol.monomial((0,), (1,), complex(rng.standard_normal(),
                                                    rng.standard_normal()))
        q = q + PolySymbol.one(d) * complex(rng.standard_normal(), rng.standard_normal())
        a = q.conj() * q
        assert a.is_real(tol=1e-15)
        worst = 0.0
        for n in (10, 25, 50, 100):
            u = reference_state(n, d)
            val = expectation(a, u, u).real
            worst = max(worst, -val / u.hbar)
        assert worst <= 20.0


# -- quadrature oracle --------------------------------------------------------

def test_quadrature_of_constant_is_inner_product(rng):
    d, h = 1, 0.2
    u = random_sparse_state(d, h, 6, rng)
    v = random_sparse_state(d, h, 6, rng)
    got = quadrature_expectation(PolySymbol.one(d), u, v)
    assert abs(got - inner_product(u, v)) <= 1e-8


def test_quadrature_ground_state_gaussian_closed_form():
    # Wigner of the ground state is (pi h)^{-d} exp(-|z|^2/h); the pairing
    # with a Gaussian bump has the closed form amp * (sigma^2/(h+sigma^2))^d
    for d in (1, 2):
        n = 0
        u = reference_state(n, d)
        h = u.hbar
        sigma, amp = 0.2, 1.3
        bump = BumpSymbol(PhasePoint(np.zeros(d), np.zeros(d)), sigma, amp)
        got = quadrature_expectation(bump, u, u)
        want = amp * (sigma ** 2 / (h + sigma ** 2)) ** d
        assert got.real == pytest.approx(want, rel=1e-10)
        assert abs(got.imag) <= 1e-12


def test_quadrature_cross_validates_ladder_path(rng):
    for d in (1, 2):
        for _ in range(6):
            n = int(rng.integers(1, 9))
            h = hbar_schedule(n, d)
            u = random_sparse_state(d, h, n, rng, entries=3)
            v = random_sparse_state(d, h, n, rng, entries=3)
            beta = tuple(int(rng.integers(0, 3)) for _ in range(d))
            gamma = tuple(int(rng.integers(0, 3)) for _ in range(d))
            a = PolySymbol.monomial(beta, gamma, complex(rng.standard_normal(),
                                                         rng.standard_normal()))
            assert abs(expectation(a, u, v) - quadrature_expectation(a, u, v)) <= 1e-6


def test_quadrature_validation_catches_coarse_grids():
    u = reference_state(12, 1)
    a = energy_symbol(1) * energy_symbol(1)
    bad = QuadratureSpec(position_nodes=6, offset_nodes=24, offset_span=4.0)
    with pytest.raises(QuadratureConvergenceError):
        quadrature_expectation(a, u, u, bad)


def test_quadrature_spec_override_and_no_validation():
    u = reference_state(4, 1)
    spec = QuadratureSpec(validate=False)
    val = quadrature_expectation(energy_symbol(1), u, u, spec)
    assert val.real == pytest.approx(1.0, abs=1e-10)


# -- microlocal norms ---------------------------------------------------------

def test_microlocal_norm_decays_for_bump_at_origin():
    bump = BumpSymbol(PhasePoint(np.array([0.0]), np.array([0.0])), 0.2)
    values = [microlocal_norm(bump, reference_state(n, 1)) for n in (8, 16, 32, 64)]
    floor = 1e-6  # oracle resolution; below it values are ties
    assert all(b <= max(a, floor) for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-3
    assert values[0] == pytest.approx(2.96e-2, rel=0.05)  # Laguerre-transform value


def test_microlocal_norm_bump_outside_sphere():
    bump = BumpSymbol(PhasePoint(np.array([2.0]), np.array([0.0])), 0.2)
    values = [microlocal_norm(bump, reference_state(n, 1)) for n in (8, 16, 32, 64)]
    floor = 1e-6
    assert all(b <= max(a, floor) for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-3


def test_microlocal_norm_homogeneity():
    u = reference_state(8, 1)
    b1 = BumpSymbol(PhasePoint(np.array([0.0]), np.array([0.0])), 0.2, 1.0)
    b3 = BumpSymbol(PhasePoint(np.array([0.0]), np.array([0.0])), 0.2, 3.0)
    assert microlocal_norm(b3, u) == pytest.approx(3.0 * microlocal_norm(b1, u),
                                                   rel=1e-10)


def test_microlocal_norm_rejects_bump_near_sphere():
    bump = BumpSymbol(PhasePoint(np.array([1.1]), np.array([0.0])), 0.2)
    with pytest.raises(ValueError):
        microlocal_norm(bump, reference_state(8, 1))


def test_microlocal_norm_requires_schedule():
    bump = BumpSymbol(PhasePoint(np.array([0.0]), np.array([0.0])), 0.2)
    u = basis_state((8,), 0.123)
    with pytest.raises(ValueError):
        microlocal_norm(bump, u)
    with pytest.raises(TypeError):
        microlocal_norm(energy_symbol(1), reference_state(8, 1))


# -- symbol composition -------------------------------------------------------

def test_compose_flow_matches_compose_linear(rng):
    d = 2
    a = energy_symbol(d) + w_symbol(d, 1) * w_symbol(d, 2)
    t = 0.7
    U = np.exp(-2j * t) * np.eye(d)
    direct = compose_flow(a, t)
    generic = compose_linear(a, U)
    z = PhasePoint(np.array([0.1, 0.4]), np.array([-0.2, 0.3]))
    assert direct.value(z) == pytest.approx(generic.value(z), rel=1e-13)


def test_compose_linear_is_pullback(rng):
    d = 2
    g = random_ortho_symplectic(d, rng)
    a = w_symbol(d, 1) * wbar_symbol(d, 2) + energy_symbol(d)
    z = PhasePoint(np.array([0.3, -0.2]), np.array([0.1, 0.5]))
    gz = PhasePoint.from_w(g.unitary @ z.w)
    assert compose_linear(a, g.unitary).value(z) == pytest.approx(a.value(gz), rel=1e-12)
