"""End-to-end pipelines: eigenstate sequences targeting a measure, the
convergence / cross-term / microlocalization reports, and the property
suites run by the CLI.  Reports are plain CSV with comment headers carrying
the package version, a hash of the configuration, and the seed, so a rerun
with the same configuration is byte-identical.
"""

from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .fock import FockState, hbar_schedule, reference_state
from .metaplectic import covariance_check, transport_reference, verify_eigen
from .measures import (
    ConvexMeasure,
    OrbitMeasure,
    TestFamily,
    approximate_invariant,
    convex_integral,
    format_measure,
    mixture_point_sampler,
    orbit_integral,
    orbit_integral_trapezoid,
    parse_measure,
    weak_star_distance,
)
from .symplectic import (
    Orbit,
    PhasePoint,
    orbit_through,
    orbits_equal,
    random_orbit,
    random_orbit_pair,
    random_ortho_symplectic,
    reference_orbit,
    transporter,
)
from .weyl import (
    BumpSymbol,
    PolySymbol,
    compose_flow,
    expectation,
    microlocal_norm,
    quadrature_expectation,
    weyl_apply,
    weyl_apply_average,
)

FLOAT_FMT = "{:.17g}"


def _fmt(x) -> str:
    return FLOAT_FMT.format(float(x))


# ---------------------------------------------------------------------------
# state construction
# ---------------------------------------------------------------------------

def build_state(mu: ConvexMeasure, n: int) -> FockState:
    """Normalized sum of sqrt(weight)-scaled transported reference states.

    Every component is a level-n eigenstate at h = 1/(2n+d), so the sum is
    too; the raw combination norm is 1 + o(1) (cross terms decay with orbit
    separation) and exactly 1 for orthogonal-generator orbits.
    """
    state, _ = build_state_diagnostics(mu, n)
    return state


def build_state_diagnostics(mu: ConvexMeasure, n: int):
    """(state, raw_norm): the normalized state and the pre-normalization norm."""
    if n < 0:
        raise ValueError("n must be >= 0")
    acc = None
    for w, m in mu.components:
        g = transporter(m.orbit)
        piece = transport_reference(n, g).scaled(math.sqrt(w))
        acc = piece if acc is None else acc.add(piece)
    raw = acc.norm()
    return acc.scaled(1.0 / raw), raw


# ---------------------------------------------------------------------------
# trend assertions
# ---------------------------------------------------------------------------

def median_successive_ratio(values, floor: float = 1e-12):
    """Median of e_{k+1}/e_k over pairs with e_k above the floor; None if none."""
    ratios = []
    vals = list(values)
    for prev, nxt in zip(vals, vals[1:]):
        if prev > floor:
            ratios.append(nxt / prev)
    if not ratios:
        return None
    return float(np.median(ratios))


def column_converged(errors, final_tol: float, floor: float = 1e-12):
    """Final error below tolerance and a decreasing trend (or all-noise column)."""
    errors = [float(e) for e in errors]
    if errors[-1] > final_tol:
        return False, f"final error {errors[-1]:.3e} > {final_tol:.1e}"
    med = median_successive_ratio(errors, floor)
    if med is not None and med >= 1.0:
        return False, f"median successive ratio {med:.3f} >= 1"
    return True, ""


# ---------------------------------------------------------------------------
# convergence report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    hbar: float
    symbol: str
    value: complex
    target: complex
    abs_error: float


@dataclass
class ConvergenceReport:
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, symbol: str):
        return [r.abs_error for r in self.rows if r.symbol == symbol]

    @property
    def symbols(self):
        seen = []
        for r in self.rows:
            if r.symbol not in seen:
                seen.append(r.symbol)
        return seen

    def check(self, final_tol: float = 5e-2, floor: float = 1e-12):
        """List of violated columns; empty means every symbol converged."""
        failures = []
        for sym in self.symbols:
            ok, why = column_converged(self.column(sym), final_tol, floor)
            if not ok:
                failures.append(f"{sym}: {why}")
        return failures

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.metadata):
            buf.write(f"# {key}: {self.metadata[key]}\n")
        buf.write("n,hbar,symbol,value_re,value_im,target_re,target_im,abs_error\n")
        for r in self.rows:
            buf.write(",".join([
                str(r.n), _fmt(r.hbar), r.symbol,
                _fmt(r.value.real), _fmt(r.value.imag),
                _fmt(r.target.real), _fmt(r.target.imag),
                _fmt(r.abs_error)]) + "\n")
        return buf.getvalue()

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv())


def converge_report(mu: ConvexMeasure, family: TestFamily, n_list,
                    metadata: dict = None) -> ConvergenceReport:
    """Pairings <a^w g_n, g_n> against the measure integrals, per (n, symbol)."""
    rows = []
    targets = [convex_integral(a, mu) for a in family.symbols]
    for n in n_list:
        g_n = build_state(mu, n)
        for a, label, target in zip(family.symbols, family.labels, targets):
            val = expectation(a, g_n, g_n)
            rows.append(ConvergenceRow(n, g_n.hbar, label, val, target, abs(val - target)))
    meta = dict(metadata or {})
    meta.setdefault("osclab-version", __version__)
    meta.setdefault("measure", format_measure(mu).replace("\n", "; ").strip("; "))
    return ConvergenceReport(rows, meta)


def load_convergence_report(path) -> ConvergenceReport:
    """Read a report back; the error column is recomputed from value and target."""
    rows = []
    metadata = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                metadata[key.strip()] = val.strip()
                continue
            if line.startswith("n,") or not line:
                continue
            parts = line.split(",")
            value = complex(float(parts[3]), float(parts[4]))
            target = complex(float(parts[5]), float(parts[6]))
            rows.append(ConvergenceRow(int(parts[0]), float(parts[1]), parts[2],
                                       value, target, abs(value - target)))
    return ConvergenceReport(rows, metadata)


# ---------------------------------------------------------------------------
# cross-term report
# ---------------------------------------------------------------------------

@dataclass
class CrossTermReport:
    rows: list            # (n, symbol, magnitude)
    metadata: dict = field(default_factory=dict)

    def column(self, symbol: str):
        return [mag for (_, sym, mag) in self.rows if sym == symbol]

    @property
    def symbols(self):
        seen = []
        for (_, sym, _) in self.rows:
            if sym not in seen:
                seen.append(sym)
        return seen

    def check(self, final_tol: float = 1e-2, floor: float = 1e-12):
        """Final magnitude small; decay may fluctuate within a factor 2."""
        failures = []
        for sym in self.symbols:
            col = self.column(sym)
            if col[-1] > final_tol:
                failures.append(f"{sym}: final {col[-1]:.3e} > {final_tol:.1e}")
                continue
            for prev, nxt in zip(col, col[1:]):
                if nxt > 2.0 * prev + floor:
                    failures.append(f"{sym}: rise {prev:.3e} -> {nxt:.3e}")
                    break
        return failures

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.metadata):
            buf.write(f"# {key}: {self.metadata[key]}\n")
        buf.write("n,symbol,magnitude\n")
        for (n, sym, mag) in self.rows:
            buf.write(f"{n},{sym},{_fmt(mag)}\n")
        return buf.getvalue()

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv())


def cross_term_report(orbit_a: Orbit, orbit_b: Orbit, family: TestFamily,
                      n_list, metadata: dict = None) -> CrossTermReport:
    """|<a^w f_n^A, f_n^B>| for transported states on two distinct orbits."""
    if orbits_equal(orbit_a, orbit_b):
        raise ValueError("cross terms need two distinct orbits")
    ga, gb = transporter(orbit_a), transporter(orbit_b)
    rows = []
    for n in n_list:
        fa = transport_reference(n, ga)
        fb = transport_reference(n, gb)
        for a, label in zip(family.symbols, family.labels):
            rows.append((n, label, abs(expectation(a, fa, fb))))
    meta = dict(metadata or {})
    meta.setdefault("osclab-version", __version__)
    return CrossTermReport(rows, meta)


# ---------------------------------------------------------------------------
# property suites
# ---------------------------------------------------------------------------

DEFAULT_TOLERANCES = {
    "group_closure": 1e-10,
    "eigen_residual": 1e-12,
    "unitarity": 1e-12,
    "covariance": 1e-9,
    "dual_path": 1e-6,
    "trapezoid": 1e-12,
    "weights_margin": 3.0,        # units of 1/sqrt(m)
    "final_error": 5e-2,
    "cross_final": 1e-2,
    "microlocal_final": 1e-3,
    "microlocal_floor": 1e-6,
    "error_floor": 1e-12,
}

DEFAULT_SAMPLES = {
    "closure": 1000,
    "orbits": 20,
    "mixes": 5,
    "annihilator": 5,
    "covariance_maps": 5,
    "quadrature_pairs": 4,
    "invariant_points": 1024,
}


@dataclass(frozen=True)
class SuitesConfig:
    dim: int = 2
    seed: int = 0
    n_list: tuple = (8, 16, 32, 64, 128)
    hbar_slack: float = 0.0
    max_overlap: float = 0.9
    covariance_level: int = 12
    microlocal_levels: tuple = (8, 16, 32, 64)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    samples: dict = field(default_factory=lambda: dict(DEFAULT_SAMPLES))
    measure: ConvexMeasure = None

    def tol(self, name: str) -> float:
        return self.tolerances[name]

    def n_samples(self, name: str) -> int:
        return self.samples[name]


def parse_config(text: str) -> SuitesConfig:
    """Structured-text config: measure directives plus suite overrides."""
    cfg = {}
    tolerances = dict(DEFAULT_TOLERANCES)
    samples = dict(DEFAULT_SAMPLES)
    measure_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        key = fields[0]
        if key == "dim":
            cfg["dim"] = int(fields[1])
            measure_lines.append(line)
        elif key == "component":
            measure_lines.append(line)
        elif key == "seed":
            cfg["seed"] = int(fields[1])
        elif key == "n-list":
            cfg["n_list"] = tuple(int(x) for x in fields[1].split(","))
        elif key == "hbar-slack":
            cfg["hbar_slack"] = float(fields[1])
        elif key == "max-overlap":
            cfg["max_overlap"] = float(fields[1])
        elif key == "covariance-level":
            cfg["covariance_level"] = int(fields[1])
        elif key == "microlocal-levels":
            cfg["microlocal_levels"] = tuple(int(x) for x in fields[1].split(","))
        elif key == "tol":
            if fields[1] == "all":
                tolerances = {k: float(fields[2]) for k in tolerances}
            elif fields[1] in tolerances:
                tolerances[fields[1]] = float(fields[2])
            else:
                raise ValueError(f"line {lineno}: unknown tolerance {fields[1]!r}")
        elif key == "samples":
            if fields[1] not in samples:
                raise ValueError(f"line {lineno}: unknown sample size {fields[1]!r}")
            samples[fields[1]] = int(fields[2])
        else:
            raise ValueError(f"line {lineno}: unknown directive {key!r}")
    measure = None
    if any(l.startswith("component") for l in measure_lines):
        measure = parse_measure("\n".join(measure_lines))
    return SuitesConfig(tolerances=tolerances, samples=samples, measure=measure,
                        **cfg)


def format_config(cfg: SuitesConfig) -> str:
    lines = [
        f"dim {cfg.dim}",
        f"seed {cfg.seed}",
        "n-list " + ",".join(str(n) for n in cfg.n_list),
        f"hbar-slack {_fmt(cfg.hbar_slack)}",
        f"max-overlap {_fmt(cfg.max_overlap)}",
        f"covariance-level {cfg.covariance_level}",
        "microlocal-levels " + ",".join(str(n) for n in cfg.microlocal_levels),
    ]
    for k in sorted(cfg.tolerances):
        lines.append(f"tol {k} {_fmt(cfg.tolerances[k])}")
    for k in sorted(cfg.samples):
        lines.append(f"samples {k} {cfg.samples[k]}")
    if cfg.measure is not None:
        for ln in format_measure(cfg.measure).splitlines():
            if ln.startswith("component"):
                lines.append(ln)
    return "\n".join(lines) + "\n"


def config_hash(cfg: SuitesConfig) -> str:
    return hashlib.sha256(format_config(cfg).encode()).hexdigest()[:12]


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    check: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


def _result(suite, check, value, threshold, detail=""):
    return SuiteResult(suite, check, bool(value <= threshold), float(value),
                       float(threshold), detail)


def _group_deviation(M) -> float:
    d = M.shape[0] // 2
    A, B = M[:d, :d], M[:d, d:]
    dev = max(
        float(np.max(np.abs(M[d:, :d] + B))),
        float(np.max(np.abs(M[d:, d:] - A))),
        float(np.max(np.abs(A @ A.T + B @ B.T - np.eye(d)))),
        float(np.max(np.abs(A @ B.T - B @ A.T))),
    )
    return dev


def _suite_group(cfg, rng):
    d = cfg.dim
    rows = []
    worst = 0.0
    for _ in range(cfg.n_samples("closure")):
        g1 = random_ortho_symplectic(d, rng)
        g2 = random_ortho_symplectic(d, rng)
        worst = max(worst, _group_deviation((g1 @ g2).matrix))
        worst = max(worst, _group_deviation(g1.inverse().matrix))
    rows.append(_result("group", "closure-deviation", worst, cfg.tol("group_closure"),
                        f"{cfg.n_samples('closure')} random products and inverses"))
    from .symplectic import tangent_dimension_check, hermitian_annihilator_dim
    for dd in (1, 2, 3):
        g = random_ortho_symplectic(dd, rng)
        got = tangent_dimension_check(g)
        rows.append(_result("group", f"tangent-dimension-d{dd}", abs(got - dd * dd), 0,
                            f"computed {got}, expected {dd * dd}"))
    for q in (2, 3, 4):
        for k in range(cfg.n_samples("annihilator")):
            u = rng.standard_normal(q) + 1j * rng.standard_normal(q)
            got = hermitian_annihilator_dim(u)
            rows.append(_result("group", f"annihilator-dimension-q{q}-{k}",
                                abs(got - (q - 1) ** 2), 0,
                                f"computed {got}, expected {(q - 1) ** 2}"))
    return rows


def _suite_transport(cfg, rng):
    d = cfg.dim
    rows = []
    worst_orbit = 0.0
    worst_group = 0.0
    ref = reference_orbit(d)
    for _ in range(cfg.n_samples("orbits")):
        target = random_orbit(d, rng)
        g = transporter(target)
        worst_group = max(worst_group, _group_deviation(g.matrix))
        image = orbit_through(g.apply(ref.generator))
        overlap = abs(np.vdot(target.w0, image.w0))
        worst_orbit = max(worst_orbit, abs(overlap - 1.0))
    rows.append(_result("transport", "carries-reference-orbit", worst_orbit, 1e-10,
                        "orbit overlap deviation over random targets"))
    rows.append(_result("transport", "stays-in-group", worst_group,
                        cfg.tol("group_closure")))
    return rows


def _suite_eigen(cfg, rng):
    d = cfg.dim
    slack = cfg.hbar_slack
    worst = 0.0
    for n in cfg.n_list:
        for _ in range(max(1, cfg.n_samples("orbits") // len(cfg.n_list))):
            g = random_ortho_symplectic(d, rng)
            h = hbar_schedule(n, d) + slack
            state = transport_reference(n, g, hbar=h)
            resid = verify_eigen(state)
            expected = abs((2 * n + d) * slack)
            worst = max(worst, abs(resid - expected))
    for _ in range(cfg.n_samples("mixes")):
        k = int(rng.integers(2, 4))
        orbits = [random_orbit(d, rng)]
        while len(orbits) < k:
            cand = random_orbit(d, rng)
            if all(not orbits_equal(cand, o) for o in orbits):
                orbits.append(cand)
        w = rng.dirichlet(np.ones(k))
        w = w / w.sum()
        mu = ConvexMeasure.mixture(w, orbits)
        n = int(cfg.n_list[-1])
        state = build_state(mu, n)
        if slack:
            state = state.with_hbar(state.hbar + slack)
        resid = verify_eigen(state)
        expected = abs((2 * n + d) * slack)
        worst = max(worst, abs(resid - expected))
    name = "residual" if slack == 0.0 else "residual-vs-predicted-slack"
    rows = [_result("eigen", name, worst, cfg.tol("eigen_residual"),
                    f"hbar slack {slack}")]
    return rows


def _suite_metaplectic(cfg, rng):
    d = cfg.dim
    rows = []
    worst_norm = 0.0
    for n in (50, 171, 200):
        g = random_ortho_symplectic(d, rng)
        st = transport_reference(n, g)
        worst_norm = max(worst_norm, abs(st.norm_squared() - 1.0))
    rows.append(_result("metaplectic", "unitarity", worst_norm, cfg.tol("unitarity"),
                        "norm^2 deviation at n in {50, 171, 200}"))
    family = TestFamily.graded(d, max_half=2)
    n = cfg.covariance_level
    worst_cov = 0.0
    for _ in range(cfg.n_samples("covariance_maps")):
        g = random_ortho_symplectic(d, rng)
        u = transport_reference(n, random_ortho_symplectic(d, rng))
        v = transport_reference(n, random_ortho_symplectic(d, rng))
        for a in family.symbols:
            lhs, rhs = covariance_check(a, g, u, v)
            worst_cov = max(worst_cov, abs(lhs - rhs))
    rows.append(_result("metaplectic", "covariance", worst_cov, cfg.tol("covariance"),
                        f"graded family, level {n}"))
    return rows


def _random_sparse_state(d, h, max_level, rng, entries=5):
    coeffs = {}
    for _ in range(entries):
        n = int(rng.integers(0, max_level + 1))
        alpha = []
        left = n
        for j in range(d - 1):
            a = int(rng.integers(0, left + 1))
            alpha.append(a)
            left -= a
        alpha.append(left)
        coeffs[tuple(alpha)] = complex(rng.standard_normal(), rng.standard_normal())
    return FockState(d, h, coeffs).normalized()


def _suite_quantization(cfg, rng):
    d = min(cfg.dim, 2)
    rows = []
    # recursion vs permutation averaging, low degree
    worst = 0.0
    h = hbar_schedule(6, d)
    for _ in range(3):
        u = _random_sparse_state(d, h, 6, rng)
        for _ in range(4):
            beta = tuple(int(rng.integers(0, 2)) for _ in range(d))
            gamma = tuple(int(rng.integers(0, 2)) for _ in range(d))
            a = PolySymbol.monomial(beta, gamma, 1.0)
            r1 = weyl_apply(a, u)
            r2 = weyl_apply_average(a, u)
            worst = max(worst, r1.add(r2.scaled(-1.0)).norm())
    rows.append(_result("quantization", "recursion-vs-permutation", worst, 1e-12))
    worst = 0.0
    for _ in range(cfg.n_samples("quadrature_pairs")):
        n = int(rng.integers(2, 11))
        h = hbar_schedule(n, d)
        u = _random_sparse_state(d, h, n, rng, entries=4)
        v = _random_sparse_state(d, h, n, rng, entries=4)
        beta = tuple(int(rng.integers(0, 3)) for _ in range(d))
        gamma = tuple(int(rng.integers(0, 3)) for _ in range(d))
        a = PolySymbol.monomial(beta, gamma, 1.0)
        e1 = expectation(a, u, v)
        e2 = quadrature_expectation(a, u, v)
        worst = max(worst, abs(e1 - e2))
    rows.append(_result("quantization", "dual-path", worst, cfg.tol("dual_path"),
                        "ladder ordering vs cross-Wigner quadrature"))
    return rows


def _suite_microlocal(cfg, rng):
    rows = []
    floor = cfg.tol("microlocal_floor")
    for label, center_norm in (("origin", 0.0), ("outside", 2.0)):
        values = []
        for n in cfg.microlocal_levels:
            u = reference_state(n, 1)
            center = PhasePoint(np.array([center_norm]), np.array([0.0]))
            bump = BumpSymbol(center, 0.2)
            values.append(microlocal_norm(bump, u))
        ok_trend = all(nxt <= max(prev, floor) for prev, nxt in zip(values, values[1:]))
        detail = " ".join(f"{v:.3e}" for v in values)
        rows.append(SuiteResult("microlocal", f"decay-{label}", ok_trend,
                                values[-1], floor, detail))
        rows.append(_result("microlocal", f"final-{label}", max(values[-1], floor),
                            cfg.tol("microlocal_final"), detail))
    return rows


def _suite_measures(cfg, rng):
    d = cfg.dim
    rows = []
    worst = 0.0
    for _ in range(10):
        orbit = random_orbit(d, rng)
        m = OrbitMeasure(orbit)
        beta = tuple(int(rng.integers(0, 3)) for _ in range(d))
        gamma = tuple(int(rng.integers(0, 3)) for _ in range(d))
        a = PolySymbol.monomial(beta, gamma, complex(rng.standard_normal(),
                                                     rng.standard_normal()))
        worst = max(worst, abs(orbit_integral(a, m) - orbit_integral_trapezoid(a, m)))
        t = float(rng.uniform(0, np.pi))
        worst = max(worst, abs(orbit_integral(compose_flow(a, t), m)
                               - orbit_integral(a, m)))
    rows.append(_result("measures", "trapezoid-and-flow-invariance", worst,
                        cfg.tol("trapezoid")))
    # metric axioms on random tables
    family = TestFamily.graded(d, max_half=1)
    t1 = rng.standard_normal(len(family))
    t2 = rng.standard_normal(len(family))
    t3 = rng.standard_normal(len(family))
    d12 = weak_star_distance(t1, t2, family)
    d21 = weak_star_distance(t2, t1, family)
    d13 = weak_star_distance(t1, t3, family)
    d32 = weak_star_distance(t3, t2, family)
    axioms = max(abs(d12 - d21),
                 weak_star_distance(t1, t1, family),
                 max(0.0, d12 - (d13 + d32)))
    rows.append(_result("measures", "weak-star-metric-axioms", axioms, 0.0))
    # two-orbit weight recovery
    m_pts = cfg.n_samples("invariant_points")
    oa, ob = random_orbit_pair(d, rng, cfg.max_overlap)
    sampler = mixture_point_sampler([0.3, 0.7], [oa.generator, ob.generator])
    emp = approximate_invariant(sampler, m_pts, rng)
    margin = cfg.tol("weights_margin") / math.sqrt(m_pts)
    err = 1.0
    if len(emp.components) == 2:
        wa = next((w for w, mm in emp.components if orbits_equal(mm.orbit, oa)), None)
        if wa is not None:
            err = abs(wa - 0.3)
    rows.append(_result("measures", "two-orbit-weights", err, margin,
                        f"{m_pts} samples"))
    return rows


def _suite_convergence(cfg, rng):
    d = cfg.dim
    rows = []
    if cfg.measure is not None:
        mu = cfg.measure
    else:
        oa, ob = random_orbit_pair(d, rng, cfg.max_overlap)
        mu = ConvexMeasure.mixture([0.3, 0.7], [oa, ob])
    family = TestFamily.graded(d, max_half=2)
    report = converge_report(mu, family, cfg.n_list)
    failures = report.check(cfg.tol("final_error"), cfg.tol("error_floor"))
    rows.append(SuiteResult("convergence", "all-symbols", not failures,
                            float(len(failures)), 0.0, "; ".join(failures[:4])))
    oa, ob = random_orbit_pair(d, rng, cfg.max_overlap)
    xreport = cross_term_report(oa, ob, family, cfg.n_list)
    xfail = xreport.check(cfg.tol("cross_final"), cfg.tol("error_floor"))
    rows.append(SuiteResult("convergence", "cross-terms", not xfail,
                            float(len(xfail)), 0.0, "; ".join(xfail[:4])))
    return rows


_SUITES = (
    ("group", _suite_group),
    ("transport", _suite_transport),
    ("eigen", _suite_eigen),
    ("metaplectic", _suite_metaplectic),
    ("quantization", _suite_quantization),
    ("microlocal", _suite_microlocal),
    ("measures", _suite_measures),
    ("convergence", _suite_convergence),
)


def run_suites(cfg: SuitesConfig):
    """Run every property suite; returns (exit_status, results)."""
    rng = np.random.default_rng(cfg.seed)
    results = []
    for _, fn in _SUITES:
        results.extend(fn(cfg, rng))
    status = 0 if all(r.passed for r in results) else 1
    return status, results


def suites_report_csv(cfg: SuitesConfig, results) -> str:
    buf = io.StringIO()
    buf.write(f"# osclab-version: {__version__}\n")
    buf.write(f"# config-hash: {config_hash(cfg)}\n")
    buf.write(f"# seed: {cfg.seed}\n")
    buf.write("suite,check,status,value,threshold,detail\n")
    for r in results:
        detail = r.detail.replace(",", ";")
        buf.write(f"{r.suite},{r.check},{'pass' if r.passed else 'FAIL'},"
                  f"{_fmt(r.value)},{_fmt(r.threshold)},{detail}\n")
    return buf.getvalue()
