"""Certify generalized quasi-contractions on finite metric spaces and run Picard iteration."""

from qcfix.metric import (
    FiniteMetricSpace,
    MetricError,
    MetricVerdict,
    MultiMap,
    Orbit,
    SelfMap,
    diameter,
    generate_space,
    metric_closure,
    orbit,
    set_dist_inf,
    set_dist_sup,
    validate_metric,
)
from qcfix.classify import (
    BANACH,
    GENERALIZED,
    KANNAN,
    QUASI,
    ContractionReport,
    Term,
    classify_all,
    comparison_max,
    feasibility_check,
    minimal_q,
    parse_terms,
)
from qcfix.picard import (
    BoundCertificate,
    CycleDetected,
    FixedPointFound,
    IterationTrace,
    MaxItersExceeded,
    a_priori_bound,
    cauchy_estimate_check,
    diameter_witness,
    find_fixed_points,
    iterate,
    orbit_diameter_bound_check,
    power_bound,
    rate_certificates,
)
from qcfix.multivalued import (
    MvContractionReport,
    SelectionMap,
    build_selection,
    compose_multimap,
    mv_bound,
    mv_fixed_points,
    mv_iterate,
    mv_minimal_q,
)

__version__ = "0.1.0"

__all__ = [
    "FiniteMetricSpace",
    "MetricError",
    "MetricVerdict",
    "MultiMap",
    "Orbit",
    "SelfMap",
    "diameter",
    "generate_space",
    "metric_closure",
    "orbit",
    "set_dist_inf",
    "set_dist_sup",
    "validate_metric",
    "BANACH",
    "GENERALIZED",
    "KANNAN",
    "QUASI",
    "ContractionReport",
    "Term",
    "classify_all",
    "comparison_max",
    "feasibility_check",
    "minimal_q",
    "parse_terms",
    "BoundCertificate",
    "CycleDetected",
    "FixedPointFound",
    "IterationTrace",
    "MaxItersExceeded",
    "a_priori_bound",
    "cauchy_estimate_check",
    "diameter_witness",
    "find_fixed_points",
    "iterate",
    "orbit_diameter_bound_check",
    "power_bound",
    "rate_certificates",
    "MvContractionReport",
    "SelectionMap",
    "build_selection",
    "compose_multimap",
    "mv_bound",
    "mv_fixed_points",
    "mv_iterate",
    "mv_minimal_q",
]
