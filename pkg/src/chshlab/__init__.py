"""Correlation models for CHSH Bell tests.

Quantum reference, factorizable local hidden-variable models, the
orthogonally additive (Gudder) measure on V4 and its tensor-product
correlations, hidden-variable extensions of the latter, and a CHSH engine
with setting optimization and Monte Carlo coincidence counting.
"""

from .algebra import (
    BellState,
    BipartiteVector,
    Direction,
    FourVector,
    bell_vector,
    inner4,
    inner16,
    observable_vector,
    state_vector,
    tensor,
)
from .chsh import (
    ChshOptimum,
    ChshResult,
    CoincidenceCounts,
    chsh_exact,
    chsh_from_counts,
    maximize_chsh,
    no_signaling_audit,
    simulate_events,
)
from .extensions import (
    ContinuousBasisModel,
    IndependentSourceModel,
    PeakedDensity,
    RegularizedDelta,
    WernerModel,
    WernerState,
    model1_correlation,
    model2_chsh_threshold,
    model2_correlation,
    model3_correlation,
)
from .gudder import GudderModel, ReferenceMeasure, gudder_correlation, gudder_joint_probability, measure
from .lhv import (
    DeterministicStrategy,
    FactorizedModel,
    FiniteStrategy,
    LambdaSpace,
    exact_chsh_finite,
    lhv_correlation,
    random_deterministic_strategy,
    random_factorized_strategy,
    sign_model,
)
from .models import CorrelationModel, SettingsQuad
from .quantum import QuantumModel, born_probability, qm_correlation, qm_joint_probability

__version__ = "0.1.0"

__all__ = [
    "BellState",
    "BipartiteVector",
    "ChshOptimum",
    "ChshResult",
    "CoincidenceCounts",
    "ContinuousBasisModel",
    "CorrelationModel",
    "DeterministicStrategy",
    "Direction",
    "FactorizedModel",
    "FiniteStrategy",
    "FourVector",
    "GudderModel",
    "IndependentSourceModel",
    "LambdaSpace",
    "PeakedDensity",
    "QuantumModel",
    "ReferenceMeasure",
    "RegularizedDelta",
    "SettingsQuad",
    "WernerModel",
    "WernerState",
    "bell_vector",
    "born_probability",
    "chsh_exact",
    "chsh_from_counts",
    "exact_chsh_finite",
    "gudder_correlation",
    "gudder_joint_probability",
    "inner16",
    "inner4",
    "lhv_correlation",
    "maximize_chsh",
    "measure",
    "model1_correlation",
    "model2_chsh_threshold",
    "model2_correlation",
    "model3_correlation",
    "no_signaling_audit",
    "observable_vector",
    "qm_correlation",
    "qm_joint_probability",
    "random_deterministic_strategy",
    "random_factorized_strategy",
    "sign_model",
    "simulate_events",
    "state_vector",
    "tensor",
]
