"""Arithmetic jet calculus over p-adic rings and Eisenstein extensions.

The package covers capped precision p-adic rings with Frobenius lifts,
jet polynomial rings with p- and pi-derivations, truncated series in q and
its jets, formal group laws with their jet-level characters, and Hecke
eigen-systems with the expansions attached to them.
"""

from .base_rings import (
    EisensteinConfig,
    PadicConfig,
    delta_p,
    delta_pi,
    make_base_ring,
    make_ramified_ring,
)
from .delta_calculus import JetRing, conversion_polynomial, p_to_pi, pi_to_p, prolong
from .errors import (
    ConfigError,
    DeltaJetError,
    DivisibilityFailure,
    HypothesisViolation,
    IntegralityFailure,
    MalformedFile,
    OrderOverflow,
    PrecisionExhausted,
    RelationViolation,
    TruncationError,
)
from .jet_series import QJetSeries, overconvergence_defect, radius_estimate, series_ring

__version__ = "0.1.0"
