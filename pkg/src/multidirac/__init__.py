"""Multi-Dirac structures and implicit Lagrangian field theories.

The package is layered: :mod:`multivector` (pointwise exterior algebra),
:mod:`symbolic` (polynomial forms and multivector fields), :mod:`chart`
(Pontryagin-bundle coordinates and Lagrangians), :mod:`dirac` (pointwise
multi-Dirac structures) and :mod:`field` (field equations and solvers).
"""
from .errors import (AdmissibilityError, ChartError, ConstraintDataError, DegenerateConstraintError, DegreeError,
                     DimensionError, InitializationError, ModeError, MultiDiracError, NonPolynomialError,
                     ShapeError, StabilityError)
from .multivector import (KForm, KVector, Pair, left_interior, pairing_minus, pairing_plus, right_interior,
                          wedge)
from .poly import Coordinates, PolyScalar
from .symbolic import (SymForm, SymMultivectorField, SymPair, SymVectorField, courant_dorfman, exterior_derivative,
                       lie_derivative, multi_courant_bracket, multi_poisson_bracket, schouten_bracket)
from .chart import (Chart, LagrangianModel, canonical_omega, canonical_theta, generalized_energy, kg_chart,
                    kg_model, mechanics_chart)
from .dirac import (ConstraintModel, PointedSubspace, graph_structure, integrability_verdict,
                    nonholonomic_structure, orthogonal_complement, verify_isotropy)

__version__ = "0.1.0"
