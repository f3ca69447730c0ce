"""Dimension-free convex geometry with certified bounds in l_q spaces.

Balanced centroid splits, transversal (Tverberg-style) partitions, sparse
hull approximation by sampling, selection centers, and weak epsilon-nets,
all in finite-dimensional l_q norms, with every guarantee checked against
two-sided conditional-gradient distance certificates.
"""

__version__ = "0.1.0"

from .combinatorics import (
    BalancedSubset,
    JensenReport,
    balanced_subset_count,
    enumerate_balanced_subsets,
    gamma_coefficient,
    gamma_coefficient_exact,
    jensen_inequality_check,
    sample_balanced_subset,
)
from .errors import (
    BoundMissError,
    CapacityError,
    CertificationError,
    IndeterminateError,
    InputError,
    PreconditionError,
    TheoremViolationError,
)
from .geometry import (
    DistanceCertificate,
    ball_hull_intersects,
    dist_to_hull,
)
from .maurey import (
    SparseApprox,
    colored_caratheodory,
    convex_witness,
    maurey_sample,
    maurey_trial,
)
from .partition import (
    BalancedSplit,
    TverbergPartition,
    balanced_split,
    colored_balanced_split,
    colorful_tverberg,
    uncolored_tverberg,
)
from .selection import (
    NetResult,
    SelectionResult,
    selection,
    weak_epsnet,
)
from .space import (
    ColoredPointSet,
    NormSpec,
    PointSet,
    RademacherEstimate,
    TypeInequalityReport,
    bound_constant,
    centroid,
    diameter,
    euclidean,
    meets_bound,
    norm,
    norms,
    rademacher_average,
    theorem_bound,
    type_inequality_check,
)

__all__ = [
    "BalancedSplit",
    "BalancedSubset",
    "BoundMissError",
    "CapacityError",
    "CertificationError",
    "ColoredPointSet",
    "DistanceCertificate",
    "IndeterminateError",
    "InputError",
    "JensenReport",
    "NetResult",
    "NormSpec",
    "PointSet",
    "PreconditionError",
    "RademacherEstimate",
    "SelectionResult",
    "SparseApprox",
    "TheoremViolationError",
    "TverbergPartition",
    "TypeInequalityReport",
    "ball_hull_intersects",
    "balanced_split",
    "balanced_subset_count",
    "bound_constant",
    "centroid",
    "colored_balanced_split",
    "colored_caratheodory",
    "colorful_tverberg",
    "convex_witness",
    "diameter",
    "dist_to_hull",
    "enumerate_balanced_subsets",
    "euclidean",
    "gamma_coefficient",
    "gamma_coefficient_exact",
    "jensen_inequality_check",
    "maurey_sample",
    "maurey_trial",
    "meets_bound",
    "norm",
    "norms",
    "rademacher_average",
    "sample_balanced_subset",
    "selection",
    "theorem_bound",
    "type_inequality_check",
    "uncolored_tverberg",
    "weak_epsnet",
]
