"""Flow-invariant measures on the energy sphere and their pairings.

An elementary (orbit) measure is the uniform probability measure on one
closed trajectory; against a polynomial symbol it has the exact value

    int conj(w)^beta w^gamma dc = conj(w0)^beta w0^gamma   if |beta| = |gamma|
                                 = 0                        otherwise,

read off the parametrization w(t) = exp(-2it) w0.  Convex measures are
finite mixtures of distinct orbit measures.  Arbitrary invariant measures
enter through user-supplied point samplers and are approximated by the
empirical mixture of the sampled orbits; distances between functionals are
measured with a truncated weak-* metric over a fixed graded symbol family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .symplectic import ORBIT_TOL, Orbit, PhasePoint, flow, orbit_through, orbits_equal
from .weyl import PolySymbol, expectation

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class OrbitMeasure:
    """Uniform probability measure on a single closed orbit."""

    orbit: Orbit

    @property
    def dim(self) -> int:
        return self.orbit.dim


@dataclass(frozen=True)
class ConvexMeasure:
    """Finite mixture sum_i lambda_i c_i of distinct orbit measures."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), m) for (w, m) in self.components)
        if not comps:
            raise ValueError("a convex measure needs at least one component")
        if any(w <= 0 for w, _ in comps):
            raise ValueError("weights must be positive")
        total = sum(w for w, _ in comps)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        for i in range(len(comps)):
            for k in range(i + 1, len(comps)):
                if orbits_equal(comps[i][1].orbit, comps[k][1].orbit):
                    raise ValueError(f"components {i} and {k} share an orbit")
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.components[0][1].dim

    @classmethod
    def single(cls, orbit: Orbit) -> "ConvexMeasure":
        return cls(((1.0, OrbitMeasure(orbit)),))

    @classmethod
    def mixture(cls, weights, orbits) -> "ConvexMeasure":
        return cls(tuple((w, OrbitMeasure(o)) for w, o in zip(weights, orbits)))


def orbit_integral(a: PolySymbol, m: OrbitMeasure) -> complex:
    """Exact orbit average via the |beta| = |gamma| selection rule."""
    w0 = m.orbit.w0
    acc = 0.0 + 0.0j
    for (b, g), c in a.terms.items():
        if sum(b) != sum(g):
            continue
        term = c
        for j, (bj, gj) in enumerate(zip(b, g)):
            if bj:
                term *= np.conj(w0[j]) ** bj
            if gj:
                term *= w0[j] ** gj
        acc += term
    return acc


def orbit_integral_trapezoid(a: PolySymbol, m: OrbitMeasure, nodes: int = None) -> complex:
    """Uniform rule over one flow period; exact for trigonometric polynomials.

    Independent of the selection-rule path: samples the orbit with the flow
    and averages the symbol values.  Default node count 2*degree + 1.
    """
    if nodes is None:
        nodes = 2 * a.degree + 1
    z0 = m.orbit.generator
    acc = 0.0 + 0.0j
    for k in range(nodes):
        t = np.pi * k / nodes
        acc += a.value(flow(t, z0))
    return acc / nodes


def convex_integral(a: PolySymbol, mu: ConvexMeasure) -> complex:
    return sum(w * orbit_integral(a, m) for w, m in mu.components)


# ---------------------------------------------------------------------------
# graded test family and the weak-* metric
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFamily:
    """Ordered monomial symbols a_1, a_2, ... with metric weights 2^-k.

    The default family takes every monomial with |beta| <= max_half and
    |gamma| <= max_half, coefficient 1 (so each is bounded by 1 on the
    sphere) in graded-lexicographic order; the constant symbol comes first.
    """

    dim: int
    symbols: tuple
    labels: tuple

    def __len__(self):
        return len(self.symbols)

    @property
    def weights(self) -> np.ndarray:
        return 0.5 ** np.arange(1, len(self.symbols) + 1)

    @classmethod
    def graded(cls, d: int, max_half: int = 2) -> "TestFamily":
        exps = _exponents_upto(d, max_half)
        keys = []
        for b in exps:
            for g in exps:
                keys.append((b, g))
        keys.sort(key=lambda bg: (sum(bg[0]) + sum(bg[1]), bg))
        symbols = tuple(PolySymbol.monomial(b, g) for b, g in keys)
        labels = tuple(_monomial_label(b, g) for b, g in keys)
        return cls(d, symbols, labels)


def _exponents_upto(d: int, deg: int):
    """All length-d exponent tuples with total <= deg, lexicographic."""
    if d == 0:
        return [()]
    out = []
    for head in range(deg + 1):
        out.extend((head,) + rest for rest in _exponents_upto(d - 1, deg - head))
    out.sort()
    return out


def _monomial_label(b, g) -> str:
    if not any(b) and not any(g):
        return "1"
    parts = []
    for j, e in enumerate(b):
        if e:
            parts.append(f"cw{j + 1}^{e}" if e > 1 else f"cw{j + 1}")
    for j, e in enumerate(g):
        if e:
            parts.append(f"w{j + 1}^{e}" if e > 1 else f"w{j + 1}")
    return "*".join(parts)


def measure_table(mu: ConvexMeasure, family: TestFamily) -> np.ndarray:
    """Values of the measure on the family symbols."""
    return np.array([convex_integral(a, mu) for a in family.symbols], dtype=complex)


def state_table(u, family: TestFamily) -> np.ndarray:
    """Diagonal pairings <a^w u, u> on the family symbols."""
    return np.array([expectation(a, u, u) for a in family.symbols], dtype=complex)


def weak_star_distance(v1, v2, family: TestFamily) -> float:
    """sum_k min(|v1_k - v2_k|, 2^-k); a metric on value tables."""
    v1 = np.asarray(v1)
    v2 = np.asarray(v2)
    if len(v1) != len(family) or len(v2) != len(family):
        raise ValueError("value tables must match the family length")
    return float(np.sum(np.minimum(np.abs(v1 - v2), family.weights)))


# ---------------------------------------------------------------------------
# empirical approximation of invariant measures
# ---------------------------------------------------------------------------

def uniform_sphere_sampler(d: int):
    """Sampler for the uniform measure on S^{2d-1} (Gaussian, normalized)."""

    def draw(rng: np.random.Generator) -> PhasePoint:
        v = rng.standard_normal(2 * d)
        v /= np.linalg.norm(v)
        return PhasePoint(v[:d], v[d:])

    return draw


def fixed_point_sampler(z: PhasePoint):
    def draw(rng: np.random.Generator) -> PhasePoint:
        return z

    return draw


def mixture_point_sampler(weights, points):
    """Draw one of the given phase points with the given probabilities."""
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    points = list(points)

    def draw(rng: np.random.Generator) -> PhasePoint:
        return points[int(rng.choice(len(points), p=weights))]

    return draw


def approximate_invariant(sampler, m: int, rng: np.random.Generator,
                          family: TestFamily = None, reference=None):
    """Empirical convex measure from m sampled points.

    Each draw is sent to its orbit; coincident orbits (within the orbit
    equality tolerance) are merged with weights k/m.  When a family and a
    reference value table are supplied, also returns the weak-* distance of
    the empirical measure to the reference.
    """
    if m <= 0:
        raise ValueError("m must be positive")
    gens = []       # complex generators of distinct orbits found so far
    counts = []
    for _ in range(m):
        z = sampler(rng)
        orb = orbit_through(z)
        w0 = orb.w0
        hit = None
        if gens:
            overlaps = np.abs(np.array(gens) @ w0.conj())
            best = int(np.argmax(overlaps))
            if abs(overlaps[best] - 1.0) <= ORBIT_TOL:
                hit = best
        if hit is None:
            gens.append(w0)
            counts.append(1)
        else:
            counts[hit] += 1
    comps = tuple((c / m, OrbitMeasure(Orbit(PhasePoint.from_w(g))))
                  for g, c in zip(gens, counts))
    measure = ConvexMeasure(comps)
    if family is not None and reference is not None:
        dist = weak_star_distance(measure_table(measure, family), reference, family)
        return measure, dist
    return measure


# ---------------------------------------------------------------------------
# measure description files (consumed by the CLI)
# ---------------------------------------------------------------------------

MEASURE_FORMAT = """\
# measure description: one 'dim' line, then one 'component' line per orbit
#   dim <d>
#   component <weight> <x_1 .. x_d> <xi_1 .. xi_d>
# '#' starts a comment; values are plain decimal; weights must sum to 1.
"""


def parse_measure(text: str) -> ConvexMeasure:
    dim = None
    comps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        key = fields[0]
        if key == "dim":
            dim = int(fields[1])
        elif key == "component":
            if dim is None:
                raise ValueError(f"line {lineno}: 'component' before 'dim'")
            vals = [float(x) for x in fields[1:]]
            if len(vals) != 1 + 2 * dim:
                raise ValueError(
                    f"line {lineno}: expected weight + {2 * dim} coordinates, "
                    f"got {len(vals)} values")
            w = vals[0]
            z = PhasePoint(np.array(vals[1:1 + dim]), np.array(vals[1 + dim:]))
            comps.append((w, OrbitMeasure(orbit_through(z))))
        else:
            raise ValueError(f"line {lineno}: unknown directive {key!r}")
    if dim is None or not comps:
        raise ValueError("measure text needs a 'dim' line and at least one component")
    return ConvexMeasure(tuple(comps))


def format_measure(mu: ConvexMeasure) -> str:
    lines = [f"dim {mu.dim}"]
    for w, m in mu.components:
        gen = m.orbit.generator
        coords = " ".join(f"{x:.17g}" for x in np.concatenate([gen.x, gen.xi]))
        lines.append(f"component {w:.17g} {coords}")
    return "\n".join(lines) + "\n"


def load_measure(path) -> ConvexMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_measure(fh.read())
