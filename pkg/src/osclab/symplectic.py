"""Ortho-symplectic transformations, the energy flow, and its orbits.

The classical energy p(x, xi) = |x|^2 + |xi|^2 generates the flow

    x(t) = cos(2t) x0 + sin(2t) xi0,   xi(t) = cos(2t) xi0 - sin(2t) x0,

which in the complex coordinate w = x + i*xi reads w(t) = exp(-2it) w0.  Its
trajectories on the unit sphere S^{2d-1} are disjoint great circles; each is
represented here by an `Orbit` that stores one generator point, two orbits
being equal when their complex generators differ by a phase.

The 2d x 2d matrices that are both orthogonal and symplectic form a group;
they have the block shape [[A, B], [-B, A]] with A A^T + B B^T = I and A B^T
symmetric, and U = A + iB is unitary.  Group elements act on phase points
through U acting on w; note that the raw block matrix applied to the real
vector (x, xi) realizes conj(U), so the complex convention is the one every
construction here (transport, orbit images) is written in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import MultiIndex  # noqa: F401  (re-exported type vocabulary)

ORBIT_TOL = 1e-10
GROUP_TOL = 1e-10
RANK_THRESHOLD = 1e-8


@dataclass(frozen=True)
class PhasePoint:
    """Point (x, xi) of phase space R^d x R^d."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        if x.shape != xi.shape or x.ndim != 1:
            raise ValueError("x and xi must be 1-d arrays of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @property
    def dim(self) -> int:
        return len(self.x)

    @property
    def w(self) -> np.ndarray:
        """Complex coordinates w = x + i xi."""
        return self.x + 1j * self.xi

    @classmethod
    def from_w(cls, w) -> "PhasePoint":
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        return cls(w.real.copy(), w.imag.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.x * self.x) + np.sum(self.xi * self.xi)))

    def normalized(self) -> "PhasePoint":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero phase point")
        return PhasePoint(self.x / nrm, self.xi / nrm)


def flow(t: float, z: PhasePoint) -> PhasePoint:
    """Energy flow at time t; period pi on every trajectory."""
    c, s = np.cos(2.0 * t), np.sin(2.0 * t)
    return PhasePoint(c * z.x + s * z.xi, c * z.xi - s * z.x)


@dataclass(frozen=True, eq=False)
class Orbit:
    """Closed trajectory of the flow on S^{2d-1}, held by a unit generator."""

    generator: PhasePoint

    @property
    def dim(self) -> int:
        return self.generator.dim

    @property
    def w0(self) -> np.ndarray:
        return self.generator.w

    def __eq__(self, other):
        if not isinstance(other, Orbit):
            return NotImplemented
        return orbits_equal(self, other)


def orbits_equal(a: Orbit, b: Orbit, tol: float = ORBIT_TOL) -> bool:
    """Same trajectory iff the generators differ by a phase: |<w0', w0>| = 1."""
    if a.dim != b.dim:
        return False
    return abs(abs(np.vdot(b.w0, a.w0)) - 1.0) <= tol


def orbit_through(z: PhasePoint) -> Orbit:
    """Orbit of the flow through z (renormalized onto the sphere)."""
    return Orbit(z.normalized())


def reference_orbit(d: int) -> Orbit:
    """The orbit generated by (x, xi) = (e_1, 0), i.e. w0 = e_1."""
    x = np.zeros(d)
    x[0] = 1.0
    return Orbit(PhasePoint(x, np.zeros(d)))


@dataclass(frozen=True)
class OrthoSymplectic:
    """Orthogonal-and-symplectic map, stored by the blocks of [[A,B],[-B,A]].

    The associated unitary is U = A + iB; composition, inversion and the
    action on phase points all go through U (see the module docstring for
    the sign convention of the raw real matrix).
    """

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float).copy()
        B = np.asarray(self.B, dtype=float).copy()
        if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A and B must be square matrices of equal shape")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [-self.B, self.A]])

    @property
    def unitary(self) -> np.ndarray:
        return self.A + 1j * self.B

    def compose(self, other: "OrthoSymplectic") -> "OrthoSymplectic":
        A = self.A @ other.A - self.B @ other.B
        B = self.A @ other.B + self.B @ other.A
        return OrthoSymplectic(A, B)

    def __matmul__(self, other):
        if isinstance(other, OrthoSymplectic):
            return self.compose(other)
        return NotImplemented

    def inverse(self) -> "OrthoSymplectic":
        return OrthoSymplectic(self.A.T, -self.B.T)

    def apply(self, z: PhasePoint) -> PhasePoint:
        return PhasePoint.from_w(self.unitary @ z.w)

    def validate(self, tol: float = GROUP_TOL):
        if not is_ortho_symplectic(self.matrix, tol):
            raise ValueError("blocks do not satisfy the ortho-symplectic identities")


def identity_map(d: int) -> OrthoSymplectic:
    return OrthoSymplectic(np.eye(d), np.zeros((d, d)))


def is_ortho_symplectic(M, tol: float = GROUP_TOL) -> bool:
    """Check the block shape [[A,B],[-B,A]] and the two block identities."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    if M.shape[0] % 2 != 0:
        raise ValueError("expected an even-dimensioned matrix")
    d = M.shape[0] // 2
    A, B = M[:d, :d], M[:d, d:]
    if np.max(np.abs(M[d:, :d] + B)) > tol or np.max(np.abs(M[d:, d:] - A)) > tol:
        return False
    if np.max(np.abs(A @ A.T + B @ B.T - np.eye(d))) > tol:
        return False
    AB = A @ B.T
    return np.max(np.abs(AB - AB.T)) <= tol


def to_unitary(g: OrthoSymplectic) -> np.ndarray:
    return g.unitary


def from_unitary(U, tol: float = GROUP_TOL) -> OrthoSymplectic:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("expected a square matrix")
    if np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))) > tol:
        raise ValueError("matrix is not unitary within tolerance")
    return OrthoSymplectic(U.real.copy(), U.imag.copy())


def transporter(target: Orbit) -> OrthoSymplectic:
    """Group element carrying the reference orbit (w0 = e_1) onto `target`.

    Householder column completion: the returned unitary has first column
    exactly target.w0.  Pivot phase is taken from the first component
    (+1 when it vanishes), which makes the construction deterministic.
    """
    w0 = target.w0
    d = len(w0)
    lam = w0[0] / abs(w0[0]) if abs(w0[0]) > 0 else 1.0 + 0.0j
    v = w0.astype(complex).copy()
    v[0] += lam
    R = np.eye(d, dtype=complex) - (2.0 / np.vdot(v, v).real) * np.outer(v, v.conj())
    # R e_1 = -conj(lam) w0, so R diag(-lam, 1, ..) has first column w0; write
    # the column in exactly and keep the reflector's orthogonal complement.
    U = R.copy()
    U[:, 0] = w0
    return from_unitary(U)


def tangent_dimension_check(g: OrthoSymplectic, threshold: float = RANK_THRESHOLD) -> int:
    """Dimension of the solution space of the tangent constraints at g.

    Tangent vectors have the same block shape, with blocks (M, N) subject to
    A N^T - B M^T symmetric and A M^T + B N^T skew-symmetric.  The constraint
    map is assembled on the d^2 + d^2 real block entries and its nullity is
    read off the singular values (relative threshold on the largest one).
    """
    A, B = g.A, g.B
    d = g.dim
    rows = []
    for M, N in _block_pair_basis(d):
        S = A @ N.T - B @ M.T
        K = A @ M.T + B @ N.T
        rows.append(np.concatenate([_skew_part_entries(S), _sym_part_entries(K)]))
    constraint = np.array(rows).T  # (d^2,) constraints x (2 d^2) unknowns
    return _nullity(constraint, threshold)


def hermitian_annihilator_dim(u, threshold: float = RANK_THRESHOLD) -> int:
    """Real dimension of {M Hermitian : M u = 0} for a nonzero vector u."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 1 or len(u) < 2:
        raise ValueError("expected a vector of length >= 2")
    if np.linalg.norm(u) == 0:
        raise ValueError("u must be nonzero")
    q = len(u)
    cols = []
    for H in _hermitian_basis(q):
        v = H @ u
        cols.append(np.concatenate([v.real, v.imag]))
    constraint = np.array(cols).T  # (2q) equations x (q^2) real parameters
    return _nullity(constraint, threshold)


def _nullity(mat: np.ndarray, threshold: float) -> int:
    sv = np.linalg.svd(mat, compute_uv=False)
    if len(sv) == 0 or sv[0] == 0:
        return mat.shape[1]
    rank = int(np.sum(sv > threshold * sv[0]))
    return mat.shape[1] - rank


def _block_pair_basis(d):
    for which in range(2):
        for i in range(d):
            for j in range(d):
                M = np.zeros((d, d))
                N = np.zeros((d, d))
                (M if which == 0 else N)[i, j] = 1.0
                yield M, N


def _sym_part_entries(K):
    S = K + K.T
    iu = np.triu_indices(K.shape[0])
    return S[iu]


def _skew_part_entries(K):
    S = K - K.T
    iu = np.triu_indices(K.shape[0], k=1)
    return S[iu]


def _hermitian_basis(q):
    for i in range(q):
        H = np.zeros((q, q), dtype=complex)
        H[i, i] = 1.0
        yield H
    for i in range(q):
        for j in range(i + 1, q):
            H = np.zeros((q, q), dtype=complex)
            H[i, j] = 1.0
            H[j, i] = 1.0
            yield H
            H = np.zeros((q, q), dtype=complex)
            H[i, j] = 1.0j
            H[j, i] = -1.0j
            yield H


# -- random elements (seeded generators only; no global state) -------------

def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r).copy()
    ph = ph / np.abs(ph)
    return q * ph.conj()


def random_ortho_symplectic(d: int, rng: np.random.Generator) -> OrthoSymplectic:
    return from_unitary(haar_unitary(d, rng))


def random_phase_point(d: int, rng: np.random.Generator) -> PhasePoint:
    v = rng.standard_normal(2 * d)
    v /= np.linalg.norm(v)
    return PhasePoint(v[:d], v[d:])


def random_orbit(d: int, rng: np.random.Generator) -> Orbit:
    return orbit_through(random_phase_point(d, rng))


def random_orbit_pair(d: int, rng: np.random.Generator, max_overlap: float = 0.9):
    """Two random orbits with |<w0_a, w0_b>| <= max_overlap.

    Decay of cross terms is governed by the generator overlap, and distinct
    orbits can be arbitrarily close; the separation bound keeps randomized
    decay checks meaningful at desk-scale n.  Rejection-samples (the bound
    is hit with probability ~ max_overlap^(2d-2) per draw).
    """
    if d < 2:
        raise ValueError("d=1 has a single orbit; no distinct pair exists")
    a = random_orbit(d, rng)
    while True:
        b = random_orbit(d, rng)
        if abs(np.vdot(b.w0, a.w0)) <= max_overlap:
            return a, b
