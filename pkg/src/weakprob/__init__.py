"""Complex joint probabilities of weak measurements.

Kirkwood-Dirac distributions, density-operator reconstruction, complex
conditional probabilities (weak values), the complex Bayes rule,
representation changes, action phases, and a qubit-meter weak-measurement
simulator.
"""

__version__ = "0.1.0"

from .config import DEFAULT as DEFAULT_TOLERANCES, Tolerances
from .errors import *  # noqa: F401,F403
from .kdq import (
    ActionPhase,
    ConditionalKernel,
    KDDistribution,
    action_phase,
    conditional_kernel,
    conditional_weak_value,
    invert_transform,
    kd_distribution,
    marginals,
    overlap_matrix,
    predict_probabilities,
    reconstruct_density,
    transform_representation,
)
from .linalg import (
    DensityOperator,
    OrthonormalBasis,
    SeededStream,
    StateVector,
    born_probabilities,
    computational_basis,
    density_from_pure,
    haar_random_basis,
    inner_product,
    random_density,
    random_state,
    validate_basis,
)
from .weaksim import (
    KDEstimate,
    MeterConfig,
    WeakValueEstimate,
    couple_and_postselect,
    estimate_kd,
    estimate_weak_value,
)
