"""Quantized action of ortho-symplectic maps on Fock states.

An ortho-symplectic g with unitary U acts on the oscillator eigenspaces by
the unitary T(U) fixed by

    T(U) |vac> = |vac>,      T(U) A_k* T(U)* = sum_j U[j,k] A_j*,

i.e. creation operators transform by the columns of U.  T(U) preserves
levels, is a true representation (T(U1) T(U2) = T(U1 U2)), commutes with the
oscillator energy, and realizes the covariance identity

    (a o g)^w(x, hD) = T* a^w(x, hD) T

exactly on the polynomial symbol algebra, with (a o g)(w) = a(U w).

The transported reference state T(U) |n,0,...,0> depends on g only through
the first column u = U e_1; its coefficient on |alpha| = n is the coherent
multinomial sqrt(n!/alpha!) prod_j u_j^alpha_j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockState, hbar_schedule, level
from .symplectic import OrthoSymplectic
from .weyl import PolySymbol, compose_linear, energy_symbol, expectation, weyl_apply

# exact integer factorials stay in float range below this; above, go through
# lgamma (the multinomials themselves stay bounded by d^n)
_FACTORIAL_EXACT_MAX = 170


@dataclass(frozen=True)
class TransportedState(FockState):
    """FockState carrying its construction record (level n, group element)."""

    source: tuple = None

    @property
    def source_level(self) -> int:
        return self.source[0]

    @property
    def source_map(self) -> OrthoSymplectic:
        return self.source[1]


def _multi_indices(d: int, n: int):
    """All occupation tuples of length d with total n, lexicographic."""
    if d == 1:
        return [(n,)]
    out = []
    for k in range(n, -1, -1):
        out.extend((k,) + rest for rest in _multi_indices(d - 1, n - k))
    return out


def _coherent_coefficients(n: int, col: np.ndarray) -> dict:
    """Coefficients sqrt(n!/alpha!) prod_j col_j^alpha_j over |alpha| = n."""
    d = len(col)
    coeffs = {}
    if n <= _FACTORIAL_EXACT_MAX:
        fact_n = math.factorial(n)
        for alpha in _multi_indices(d, n):
            ratio = fact_n
            for a in alpha:
                ratio //= math.factorial(a)
            amp = math.sqrt(float(ratio))
            for j, a in enumerate(alpha):
                if a:
                    amp *= col[j] ** a
            if amp != 0:
                coeffs[alpha] = amp
    else:
        lg_n = math.lgamma(n + 1)
        mod = np.abs(col)
        ang = np.angle(col)
        for alpha in _multi_indices(d, n):
            if any(a > 0 and mod[j] == 0.0 for j, a in enumerate(alpha)):
                continue
            log_amp = 0.5 * (lg_n - sum(math.lgamma(a + 1) for a in alpha))
            log_amp += sum(a * math.log(mod[j]) for j, a in enumerate(alpha) if a)
            phase = sum(a * ang[j] for j, a in enumerate(alpha) if a)
            coeffs[alpha] = math.exp(log_amp) * complex(math.cos(phase), math.sin(phase))
    return coeffs


def transport_reference(n: int, g: OrthoSymplectic, hbar: float = None) -> TransportedState:
    """T(U) applied to the reference state |n, 0, ..., 0> at h = 1/(2n+d).

    Normalized and level-homogeneous by construction (the squared
    coefficients are the multinomial expansion of (sum_j |u_j|^2)^n = 1).
    `hbar` overrides the schedule for perturbation experiments.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    d = g.dim
    h = hbar_schedule(n, d) if hbar is None else hbar
    col = g.unitary[:, 0]
    return TransportedState(d, h, _coherent_coefficients(n, col), source=(n, g))


def metaplectic_apply(g: OrthoSymplectic, state: FockState) -> FockState:
    """T(U) applied to any finite state, level by level.

    Each basis vector prod_j (A_j*)^{alpha_j} |vac> is mapped by substituting
    A_j* -> sum_k U[k,j] A_k*; the expansion is the coefficient product of
    per-coordinate multinomials, so the new amplitude on |m> picks up
    sqrt(m!/alpha!) times the polynomial coefficient.
    """
    U = g.unitary
    d = state.dim
    if U.shape[0] != d:
        raise ValueError("dimension mismatch")
    out = {}
    for alpha, amp in sorted(state.coeffs.items()):
        poly = {(0,) * d: 1.0 + 0.0j}
        for j, a in enumerate(alpha):
            for _ in range(a):
                new = {}
                for mi, c in poly.items():
                    for k in range(d):
                        if U[k, j] == 0:
                            continue
                        key = mi[:k] + (mi[k] + 1,) + mi[k + 1:]
                        new[key] = new.get(key, 0.0) + c * U[k, j]
                poly = new
        log_a = sum(math.lgamma(x + 1) for x in alpha)
        for mi, c in poly.items():
            ratio = math.exp(0.5 * (sum(math.lgamma(x + 1) for x in mi) - log_a))
            out[mi] = out.get(mi, 0.0) + amp * c * ratio
    return FockState(d, state.hbar, out)


def verify_eigen(state: FockState) -> float:
    """Residual ||p^w(x, hD) state - state|| in the Fock representation.

    On the schedule h = 1/(2n+d) the energy acts on level-n states as the
    scalar (2n+d) h = 1, so the residual is rounding-level; with a perturbed
    hbar it is |(2n+d) eps| times the norm.
    """
    p = energy_symbol(state.dim)
    applied = weyl_apply(p, state)
    diff = applied.add(state.scaled(-1.0))
    return diff.norm()


def covariance_check(symbol: PolySymbol, g: OrthoSymplectic, u: FockState, v: FockState):
    """The two sides of the covariance identity, as a pair of pairings.

    Returns (<a^w T u, T v>, <(a o g)^w u, v>); the two agree within 1e-9
    on the polynomial algebra.  Transported states move by composing the
    group elements; anything else goes through the general level action.
    """
    if not isinstance(symbol, PolySymbol):
        raise TypeError("covariance check is exact only on the polynomial algebra")
    if not (u.is_level_homogeneous() and v.is_level_homogeneous()):
        raise ValueError("u and v must be level-homogeneous")

    def transport(state):
        if isinstance(state, TransportedState):
            return transport_reference(state.source_level, g @ state.source_map,
                                       hbar=state.hbar)
        return metaplectic_apply(g, state)

    tu, tv = transport(u), transport(v)
    lhs = expectation(symbol, tu, tv)
    rhs = expectation(compose_linear(symbol, g.unitary), u, v)
    return lhs, rhs
