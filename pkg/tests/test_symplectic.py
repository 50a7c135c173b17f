import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osclab import (
    Orbit,
    PhasePoint,
    flow,
    from_unitary,
    hermitian_annihilator_dim,
    identity_map,
    is_ortho_symplectic,
    orbit_through,
    orbits_equal,
    random_orbit,
    random_orbit_pair,
    random_ortho_symplectic,
    reference_orbit,
    tangent_dimension_check,
    to_unitary,
    transporter,
)
from osclab.symplectic import haar_unitary, random_phase_point

from conftest import make_rng


# -- is_ortho_symplectic ----------------------------------------------------

def test_identity_is_ortho_symplectic():
    for d in (1, 2, 3):
        assert is_ortho_symplectic(np.eye(2 * d))


@pytest.mark.parametrize("theta", np.linspace(0.0, 2 * math.pi, 9))
def test_rotations_are_flow_maps_and_in_group(theta):
    c, s = math.cos(theta), math.sin(theta)
    M = np.array([[c, s], [-s, c]])
    assert is_ortho_symplectic(M)
    # these are exactly the time-(theta/2) flow maps acting on (x, xi)
    z = PhasePoint(np.array([0.7]), np.array([-0.3]))
    zt = flow(theta / 2.0, z)
    assert np.allclose(M @ np.array([z.x[0], z.xi[0]]), [zt.x[0], zt.xi[0]])


def test_symplectic_but_not_orthogonal_rejected():
    assert not is_ortho_symplectic(np.diag([2.0, 0.5]))


def test_wrong_block_shape_rejected():
    M = np.eye(4)
    M[2, 0] = 0.5  # breaks the [-B, A] block
    assert not is_ortho_symplectic(M)


def test_odd_dimension_errors():
    with pytest.raises(ValueError):
        is_ortho_symplectic(np.eye(3))


# -- unitary correspondence -------------------------------------------------

def test_to_unitary_identity():
    g = identity_map(3)
    assert np.array_equal(to_unitary(g), np.eye(3))


def test_from_unitary_phase_d1():
    theta = 0.83
    g = from_unitary(np.array([[np.exp(1j * theta)]]))
    assert g.A[0, 0] == pytest.approx(math.cos(theta), rel=1e-15)
    assert g.B[0, 0] == pytest.approx(math.sin(theta), rel=1e-15)
    assert is_ortho_symplectic(g.matrix)


def test_unitary_round_trip_exact(rng):
    for d in (1, 2, 3):
        U = haar_unitary(d, rng)
        assert np.array_equal(to_unitary(from_unitary(U)), U)


def test_from_unitary_rejects_nonunitary():
    with pytest.raises(ValueError):
        from_unitary(np.array([[1.0, 0.0], [0.0, 2.0]]))


def test_composition_homomorphism(rng):
    # oracle: multiply the real block matrices, compare with U_g U_h
    for d in (1, 2, 3):
        for _ in range(20):
            g = random_ortho_symplectic(d, rng)
            h = random_ortho_symplectic(d, rng)
            via_blocks = (g @ h).matrix
            via_unitary = from_unitary(to_unitary(g) @ to_unitary(h)).matrix
            assert np.max(np.abs(via_blocks - via_unitary)) <= 1e-12


def test_group_closure_1000_products(rng):
    d = 2
    for _ in range(1000):
        g = random_ortho_symplectic(d, rng)
        h = random_ortho_symplectic(d, rng)
        assert is_ortho_symplectic((g @ h).matrix, 1e-10)
    assert is_ortho_symplectic(g.inverse().matrix, 1e-10)
    assert np.max(np.abs((g @ g.inverse()).matrix - np.eye(2 * d))) <= 1e-12


# -- flow ---------------------------------------------------------------------

def test_flow_identity_at_zero():
    z = PhasePoint(np.array([0.2, 0.1]), np.array([0.5, -0.4]))
    z0 = flow(0.0, z)
    assert np.array_equal(z0.x, z.x) and np.array_equal(z0.xi, z.xi)


def test_flow_quarter_period():
    d = 2
    e1 = np.zeros(d)
    e1[0] = 1.0
    z = PhasePoint(e1, np.zeros(d))
    zt = flow(math.pi / 4.0, z)
    assert np.allclose(zt.x, 0.0, atol=1e-15)
    assert np.allclose(zt.xi, -e1, atol=1e-15)


def test_flow_is_phase_in_complex_coordinates():
    z = PhasePoint(np.array([0.6]), np.array([0.8]))
    t = 0.37
    assert flow(t, z).w[0] == pytest.approx(np.exp(-2j * t) * z.w[0], rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(-10, 10), st.integers(1, 3), st.integers(0, 2 ** 31 - 1))
def test_flow_preserves_energy(t, d, seed):
    z = random_phase_point(d, make_rng(seed))
    assert flow(t, z).norm() == pytest.approx(z.norm(), rel=1e-12)


def test_flow_period_pi():
    z = PhasePoint(np.array([0.3, -0.5]), np.array([0.1, 0.2]))
    zp = flow(math.pi, z)
    assert np.allclose(zp.x, z.x, atol=1e-14) and np.allclose(zp.xi, z.xi, atol=1e-14)


# -- orbits -------------------------------------------------------------------

def test_orbit_contains_its_flow(rng):
    for d in (1, 2, 3):
        z = random_phase_point(d, rng)
        o = orbit_through(z)
        for t in (0.1, 1.0, 2.7):
            assert orbits_equal(o, orbit_through(flow(t, z)))


def test_coordinate_orbits_distinct_d2():
    a = reference_orbit(2)
    b = orbit_through(PhasePoint(np.array([0.0, 1.0]), np.zeros(2)))
    assert not orbits_equal(a, b)
    assert a != b


def test_d1_has_single_orbit(rng):
    for _ in range(10):
        assert orbits_equal(random_orbit(1, rng), reference_orbit(1))


def test_orbit_zero_vector_errors():
    with pytest.raises(ValueError):
        orbit_through(PhasePoint(np.zeros(2), np.zeros(2)))


def test_orbit_equality_is_phase_equivalence():
    w0 = np.array([0.6 + 0.0j, 0.8j])
    a = Orbit(PhasePoint.from_w(w0))
    b = Orbit(PhasePoint.from_w(np.exp(1.2j) * w0))
    c = Orbit(PhasePoint.from_w(np.conj(w0)))  # conjugate is a different orbit
    assert a == b
    assert a != c


# -- transporter --------------------------------------------------------------

def test_transporter_reference_orbit_is_identity_column():
    for d in (1, 2, 3):
        g = transporter(reference_orbit(d))
        col = to_unitary(g)[:, 0]
        e1 = np.zeros(d, dtype=complex)
        e1[0] = 1.0
        assert np.array_equal(col, e1)


def test_transporter_swap_example():
    target = orbit_through(PhasePoint(np.array([0.0, 1.0]), np.zeros(2)))
    g = transporter(target)
    U = to_unitary(g)
    assert np.allclose(U[:, 0], [0.0, 1.0], atol=1e-15)
    assert is_ortho_symplectic(g.matrix, 1e-10)


def test_transporter_hits_random_targets(rng):
    for d in (2, 3):
        for _ in range(100):
            target = random_orbit(d, rng)
            g = transporter(target)
            assert is_ortho_symplectic(g.matrix, 1e-10)
            image = orbit_through(g.apply(reference_orbit(d).generator))
            assert orbits_equal(image, target)


def test_transporter_deterministic(rng):
    target = random_orbit(3, rng)
    g1, g2 = transporter(target), transporter(target)
    assert np.array_equal(g1.matrix, g2.matrix)


def test_flow_commutes_with_group(rng):
    for d in (1, 2, 3):
        g = random_ortho_symplectic(d, rng)
        z = random_phase_point(d, rng)
        for t in (0.3, 1.9):
            a = g.apply(flow(t, z))
            b = flow(t, g.apply(z))
            assert np.allclose(a.x, b.x, atol=1e-12)
            assert np.allclose(a.xi, b.xi, atol=1e-12)


def test_point_transitivity_from_reference(rng):
    # reach any unit point: transporter to its orbit (handed an arbitrary
    # other representative), then flow along the orbit
    for d in (1, 2, 3):
        zp = random_phase_point(d, rng)
        s = float(rng.uniform(0, math.pi))
        g = transporter(orbit_through(flow(s, zp)))
        start = g.apply(reference_orbit(d).generator)
        phase = np.vdot(start.w, zp.w)  # e^{i phi} since both generate the orbit
        t = -np.angle(phase) / 2.0
        reached = flow(t, start)
        assert np.allclose(reached.x, zp.x, atol=1e-10)
        assert np.allclose(reached.xi, zp.xi, atol=1e-10)


def test_random_orbit_pair_is_separated(rng):
    a, b = random_orbit_pair(2, rng, max_overlap=0.9)
    assert abs(np.vdot(a.w0, b.w0)) <= 0.9
    with pytest.raises(ValueError):
        random_orbit_pair(1, rng)


# -- dimension counts ---------------------------------------------------------

def test_tangent_dimension_identity():
    assert tangent_dimension_check(identity_map(1)) == 1
    assert tangent_dimension_check(identity_map(2)) == 4


def test_tangent_dimension_random_d3(rng):
    for _ in range(5):
        assert tangent_dimension_check(random_ortho_symplectic(3, rng)) == 9


def test_hermitian_annihilator_examples(rng):
    assert hermitian_annihilator_dim(np.array([0.0, 1.0])) == 1
    assert hermitian_annihilator_dim(np.array([1.0, 1.0j]) / math.sqrt(2)) == 1
    for _ in range(5):
        u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        assert hermitian_annihilator_dim(u) == 4


def test_hermitian_annihilator_rejects_zero():
    with pytest.raises(ValueError):
        hermitian_annihilator_dim(np.zeros(3, dtype=complex))
