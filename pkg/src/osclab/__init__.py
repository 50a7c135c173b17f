"""osclab: harmonic-oscillator eigenstates whose phase-space mass converges
to prescribed flow-invariant measures on the energy sphere, with exact
ladder-operator quantization, an independent cross-Wigner quadrature oracle,
and reproducible convergence reports.
"""

__version__ = "0.1.0"

from .fock import (  # noqa: F401
    FockState,
    PlanckSchedule,
    annihilate,
    basis_state,
    create,
    eigenvalue,
    hbar_schedule,
    hermite_eval,
    inner_product,
    ladder_apply,
    level,
    reference_state,
    zero_state,
)
from .symplectic import (  # noqa: F401
    Orbit,
    OrthoSymplectic,
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
from .metaplectic import (  # noqa: F401
    TransportedState,
    covariance_check,
    metaplectic_apply,
    transport_reference,
    verify_eigen,
)
from .weyl import (  # noqa: F401
    BumpSymbol,
    PolySymbol,
    QuadratureConvergenceError,
    QuadratureSpec,
    compose_flow,
    compose_linear,
    energy_symbol,
    expectation,
    microlocal_norm,
    quadrature_expectation,
    w_symbol,
    wbar_symbol,
    weyl_apply,
    weyl_apply_average,
)
from .measures import (  # noqa: F401
    ConvexMeasure,
    OrbitMeasure,
    TestFamily,
    approximate_invariant,
    convex_integral,
    fixed_point_sampler,
    format_measure,
    load_measure,
    measure_table,
    mixture_point_sampler,
    orbit_integral,
    orbit_integral_trapezoid,
    parse_measure,
    state_table,
    uniform_sphere_sampler,
    weak_star_distance,
)
from .harness import (  # noqa: F401
    ConvergenceReport,
    CrossTermReport,
    SuitesConfig,
    build_state,
    build_state_diagnostics,
    config_hash,
    converge_report,
    cross_term_report,
    load_convergence_report,
    median_successive_ratio,
    parse_config,
    run_suites,
    suites_report_csv,
)
