"""Borel cocycles on complete flags, measurable cocycles of a 3-manifold group and their rigidity."""

from .borel import (
    StratClass,
    borel_bound,
    borel_value,
    borel_values,
    dimension_table,
    is_maximal,
    strat_classes,
    strat_value,
)
from .cocycle import (
    Cocycle,
    FiniteGammaSpace,
    GroupPresentation,
    TwistMap,
    VeroneseBoundary,
    cocycle_from_representation,
    figure_eight,
    sym_power_representation,
    twist,
    twisted_boundary,
)
from .dilog import NU3, DomainError, bloch_wigner, ideal_volume
from .documents import Experiment, load_document, load_flags
from .errors import NumericalFailure, RefusalError, ValidationError
from .invariant import (
    BlockBoundary,
    EstimatorReport,
    PullbackCochain,
    block_diagonal_cocycle,
    block_flag,
    empirical_borel_ratio,
    integrate_over_X,
    parabolic_bound,
    representation_borel_ratio,
)
from .projflag import (
    CompleteFlag,
    DegenerateConfigurationError,
    ProjPoint,
    mobius_normalize,
    sym_power,
    veronese,
)
from .rigidity import align_to_veronese, maximality_certificate, trivialize

__version__ = "0.1.0"
