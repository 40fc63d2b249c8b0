"""Twisted Reeb orbit and equivariant GF(2) homology toolkit."""

from .complexes import CyclicAction, GradedF2Complex, HomologyTable, homology, quotient_by_action, validate
from .czindex import UnitaryPath, cz_index_unitary, grading, relative_index
from .f2 import F2Matrix, matmul, nullspace_dim, rank
from .geometry import (
    RadialProfile,
    RotationTwist,
    RoundSphere,
    liouville_form_eval,
    load_model,
    normalize_to_sphere,
    reeb_field,
    reeb_flow,
)
from .lifting import DeckElement, QuotientLoop, classify_orbit_loop, lift_loop
from .orbits import (
    SolverSettings,
    SpectrumTable,
    TwistedOrbit,
    action,
    analytic_spectrum,
    gradient_residual,
    monodromy,
    shoot_orbit,
)
from .pearls import PearlComplexSpec, build_pearl_complex, compare_with_oracle, tate_homology

__version__ = "0.1.0"
