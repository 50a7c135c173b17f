"""Multi-index Fock basis for the semiclassical harmonic oscillator.

States live in L^2(R^d) and are finite complex combinations of the joint
eigenfunctions of -h^2 Delta + |x|^2.  The basis element |alpha> is the
tensor product of L^2-normalized one-dimensional eigenfunctions
v_{alpha_j}^h(x_j), and the ladder operators

    A_j = h d/dx_j + x_j          (annihilation)
    A_j* = -h d/dx_j + x_j        (creation)

act per coordinate with the normalization fixed by [A_j, A_k*] = 2h delta_jk:

    A_j* |..alpha_j..> = sqrt(2h(alpha_j+1)) |..alpha_j+1..>
    A_j  |..alpha_j..> = sqrt(2h alpha_j)    |..alpha_j-1..>

Direct computation gives -h^2 Delta + x^2 = A*A + h = AA* - h per coordinate,
so |alpha> has energy (2|alpha| + d) h.  On the schedule h_n = 1/(2n+d) every
level-n state is an eigenfunction with eigenvalue 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MultiIndex = tuple  # tuple of d non-negative ints

NORM_TOL = 1e-12

# Occupation numbers are packed into int64 keys, 16 bits per coordinate.
_PACK_BITS = 16
_PACK_MAX = (1 << _PACK_BITS) - 1


def level(alpha) -> int:
    """Total occupation |alpha| of a multi-index."""
    return int(sum(alpha))


def hbar_schedule(n: int, d: int) -> float:
    """Planck parameter h_n = 1/(2n+d); a single floating-point division."""
    if n < 0 or d < 1:
        raise ValueError(f"need n >= 0 and d >= 1, got n={n}, d={d}")
    return 1.0 / (2 * n + d)


@dataclass(frozen=True)
class PlanckSchedule:
    """The canonical schedule n -> 1/(2n+d), plus an additive slack hook.

    `slack` perturbs every h_n by a constant; it exists only for robustness
    experiments (eigen-residuals become |(2n+d)*slack| instead of ~0).
    """

    dim: int
    slack: float = 0.0

    def hbar(self, n: int) -> float:
        return hbar_schedule(n, self.dim) + self.slack


@dataclass(frozen=True)
class FockState:
    """Finite complex combination of Fock basis states at a fixed h.

    coeffs maps multi-index tuples (length dim, entries >= 0) to complex
    amplitudes.  Instances are immutable; all operations return new states.
    """

    dim: int
    hbar: float
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        clean = {}
        for alpha, amp in self.coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.dim:
                raise ValueError(f"multi-index {alpha} has length != dim={self.dim}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative occupation in {alpha}")
            if any(a > _PACK_MAX for a in alpha):
                raise ValueError(f"occupation too large in {alpha}")
            amp = complex(amp)
            if amp != 0:
                clean[alpha] = amp
        object.__setattr__(self, "coeffs", clean)

    # -- basic queries ----------------------------------------------------

    def norm_squared(self) -> float:
        return float(sum((a.real * a.real + a.imag * a.imag) for a in self.coeffs.values()))

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol

    @property
    def level(self):
        """Common level when the support is level-homogeneous, else None."""
        levels = {level(a) for a in self.coeffs}
        if len(levels) == 1:
            return levels.pop()
        return None

    def is_level_homogeneous(self, n=None) -> bool:
        lv = self.level
        if lv is None:
            return False
        return True if n is None else lv == n

    def amplitude(self, alpha) -> complex:
        return self.coeffs.get(tuple(alpha), 0.0 + 0.0j)

    # -- arithmetic --------------------------------------------------------

    def scaled(self, c) -> "FockState":
        return FockState(self.dim, self.hbar, {a: c * v for a, v in self.coeffs.items()})

    def normalized(self) -> "FockState":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero state")
        return self.scaled(1.0 / nrm)

    def add(self, other: "FockState") -> "FockState":
        _check_compatible(self, other)
        out = dict(self.coeffs)
        for a, v in other.coeffs.items():
            out[a] = out.get(a, 0.0) + v
        return FockState(self.dim, self.hbar, out)

    def with_hbar(self, h: float) -> "FockState":
        """Same coefficients, different Planck parameter (perturbation hook)."""
        return FockState(self.dim, h, self.coeffs)

    # -- packed array view (internal; used by the quantization engine) ----

    @cached_property
    def _support(self):
        """(idx, amp): occupations as an (N, dim) int array and amplitudes."""
        if not self.coeffs:
            return np.zeros((0, self.dim), dtype=np.int64), np.zeros(0, dtype=complex)
        idx = np.array(sorted(self.coeffs), dtype=np.int64)
        amp = np.array([self.coeffs[tuple(a)] for a in idx], dtype=complex)
        return idx, amp


def _check_compatible(u: FockState, v: FockState):
    if u.dim != v.dim:
        raise ValueError(f"dimension mismatch: {u.dim} != {v.dim}")
    if u.hbar != v.hbar:
        raise ValueError(f"hbar mismatch: {u.hbar} != {v.hbar}")


def pack_indices(idx: np.ndarray) -> np.ndarray:
    """Encode an (N, d) occupation array into int64 keys (16 bits/coordinate)."""
    keys = np.zeros(len(idx), dtype=np.int64)
    for j in range(idx.shape[1]):
        keys = (keys << _PACK_BITS) | idx[:, j]
    return keys


def zero_state(dim: int, hbar: float) -> FockState:
    return FockState(dim, hbar, {})


def basis_state(alpha, hbar: float) -> FockState:
    return FockState(len(alpha), hbar, {tuple(alpha): 1.0})


def reference_state(n: int, d: int) -> FockState:
    """Level-n tensor eigenstate |n, 0, ..., 0> at h = 1/(2n+d)."""
    alpha = (n,) + (0,) * (d - 1)
    return basis_state(alpha, hbar_schedule(n, d))


def eigenvalue(alpha, h: float) -> float:
    """Oscillator energy (2|alpha| + d) h of the basis state |alpha>."""
    return (2 * level(alpha) + len(alpha)) * h


def inner_product(u: FockState, v: FockState) -> complex:
    """<u, v> = sum_alpha u_alpha conj(v_alpha); linear in u, antilinear in v."""
    _check_compatible(u, v)
    small, big, flip = (u, v, False) if len(u.coeffs) <= len(v.coeffs) else (v, u, True)
    acc = 0.0 + 0.0j
    for a, x in small.coeffs.items():
        y = big.coeffs.get(a)
        if y is not None:
            acc += (x * y.conjugate()) if not flip else (y * x.conjugate())
    return acc


def ladder_apply(kind: str, coord: int, state: FockState) -> FockState:
    """Apply a creation or annihilation operator on coordinate `coord` (1-based).

    creation:     |..a..> -> sqrt(2h(a+1)) |..a+1..>
    annihilation: |..a..> -> sqrt(2h a)    |..a-1..>   (a=0 gives the zero state)
    """
    if kind not in ("creation", "annihilation"):
        raise ValueError(f"kind must be 'creation' or 'annihilation', got {kind!r}")
    if not 1 <= coord <= state.dim:
        raise ValueError(f"coordinate {coord} out of range 1..{state.dim}")
    j = coord - 1
    two_h = 2.0 * state.hbar
    out = {}
    for alpha, v in state.coeffs.items():
        a = alpha[j]
        if kind == "annihilation":
            if a == 0:
                continue
            amp = math.sqrt(two_h * a)
            target = alpha[:j] + (a - 1,) + alpha[j + 1:]
        else:
            amp = math.sqrt(two_h * (a + 1))
            target = alpha[:j] + (a + 1,) + alpha[j + 1:]
        out[target] = out.get(target, 0.0) + amp * v
    return FockState(state.dim, state.hbar, out)


def create(coord: int, state: FockState) -> FockState:
    return ladder_apply("creation", coord, state)


def annihilate(coord: int, state: FockState) -> FockState:
    return ladder_apply("annihilation", coord, state)


# -- Hermite function evaluation ------------------------------------------

# exp(-y^2/2) underflows to 0.0 in double precision beyond y^2 ~ 1490; past
# that point the whole eigenfunction is returned as exactly 0.
_UNDERFLOW_Y2 = 1480.0


def hermite_eval(n: int, h: float, x):
    """Value of the L^2-normalized n-th eigenfunction of -h^2 d^2/dx^2 + x^2.

    Uses the stable three-term recurrence on normalized functions
        psi_0(y) = pi^(-1/4) exp(-y^2/2),  psi_1(y) = sqrt(2) y psi_0(y),
        psi_n(y) = sqrt(2/n) y psi_{n-1}(y) - sqrt((n-1)/n) psi_{n-2}(y),
    with y = x / sqrt(h), and returns h^(-1/4) psi_n(x/sqrt(h)).
    Accepts scalars or arrays.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not h > 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    y = np.atleast_1d(x) / math.sqrt(h)
    y2 = y * y
    safe = y2 <= _UNDERFLOW_Y2
    ys = np.where(safe, y, 0.0)
    p_prev = np.pi ** -0.25 * np.exp(-ys * ys / 2.0)
    if n == 0:
        val = p_prev
    else:
        p_cur = math.sqrt(2.0) * ys * p_prev
        for k in range(2, n + 1):
            p_cur, p_prev = math.sqrt(2.0 / k) * ys * p_cur - math.sqrt((k - 1) / k) * p_prev, p_cur
        val = p_cur
    val = np.where(safe, val, 0.0) * h ** -0.25
    return float(val[0]) if scalar else val


def hermite_rows(max_level: int, y: np.ndarray) -> np.ndarray:
    """Table of normalized h=1 eigenfunctions psi_0..psi_max at points y.

    Shape (max_level+1,) + y.shape.  Shared workhorse for quadrature grids.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty((max_level + 1,) + y.shape)
    out[0] = np.pi ** -0.25 * np.exp(-y * y / 2.0)
    if max_level >= 1:
        out[1] = math.sqrt(2.0) * y * out[0]
    for k in range(2, max_level + 1):
        out[k] = math.sqrt(2.0 / k) * y * out[k - 1] - math.sqrt((k - 1) / k) * out[k - 2]
    return out
