"""commensura: exact commensurability certificates for metric graphs.

The package decides, with exact arithmetic and checkable certificates,
whether cycle, segment and bar lengths of a finite metric multigraph are
rational multiples of PI under the girth and point-diameter hypotheses, by
building square tilings of chord annuli and applying linear-functional
(Dehn-style) tests to them.
"""

from .chords import chords_of_loop, chords_of_subgraph, loop_from_cycle
from .dehn import (
    CommensurableVerdict,
    DehnCertificate,
    DehnPlusCertificate,
    MeasureTiling,
    QRCommensurable,
    dehn_plus_test,
    dehn_test,
    functional_identity,
    parse_measure_tiling,
    serialize_measure_tiling,
    verify_measure_tiling,
)
from .engine import (
    Analysis,
    HypothesisAudit,
    analyze,
    analyze_bar,
    analyze_cycle,
    analyze_cycle_pair,
    check_hypotheses,
    decompose_segment,
)
from .errors import (
    AuditFailure,
    CommensuraError,
    EnumerationCapExceeded,
    GraphFormatError,
    HypothesisViolation,
    InternalInconsistency,
    NonpositiveLength,
    PrecisionExhausted,
)
from .generators import build, generate
from .graph import (
    DEFAULT_CYCLE_CAP,
    MetricGraph,
    Subgraph,
    bars_of,
    cycles_of,
    girth,
    parse_graph,
    point_diameter_check,
    segments_of,
    serialize_graph,
    shortest_path,
)
from .scalars import (
    Area,
    Comparison,
    Scalar,
    SymbolTable,
    commensurable,
    compare_area,
    format_area,
    format_scalar,
    parse_scalar,
    pi_ratio,
)
from .tilings import (
    annulus_tiling,
    product_tiling,
    psi_transform,
    serialize_tiling,
    to_measure_tiling,
    verify_tiling,
)

__all__ = [
    "Analysis",
    "Area",
    "AuditFailure",
    "CommensuraError",
    "CommensurableVerdict",
    "Comparison",
    "DEFAULT_CYCLE_CAP",
    "DehnCertificate",
    "DehnPlusCertificate",
    "EnumerationCapExceeded",
    "GraphFormatError",
    "HypothesisAudit",
    "HypothesisViolation",
    "InternalInconsistency",
    "MeasureTiling",
    "MetricGraph",
    "NonpositiveLength",
    "PrecisionExhausted",
    "QRCommensurable",
    "Scalar",
    "Subgraph",
    "SymbolTable",
    "analyze",
    "analyze_bar",
    "analyze_cycle",
    "analyze_cycle_pair",
    "annulus_tiling",
    "bars_of",
    "build",
    "check_hypotheses",
    "chords_of_loop",
    "chords_of_subgraph",
    "commensurable",
    "compare_area",
    "cycles_of",
    "decompose_segment",
    "dehn_plus_test",
    "dehn_test",
    "format_area",
    "format_scalar",
    "functional_identity",
    "generate",
    "girth",
    "loop_from_cycle",
    "parse_graph",
    "parse_measure_tiling",
    "parse_scalar",
    "pi_ratio",
    "point_diameter_check",
    "product_tiling",
    "psi_transform",
    "segments_of",
    "serialize_graph",
    "serialize_measure_tiling",
    "serialize_tiling",
    "shortest_path",
    "to_measure_tiling",
    "verify_measure_tiling",
    "verify_tiling",
]

__version__ = "0.1.0"
