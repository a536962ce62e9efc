"""geopol: polarization families on manifolds of geodesics.

Builds, for model real-analytic Riemannian manifolds, the one-parameter
family of polarizations on the manifold of geodesics indexed by an extended
complex parameter s: Kahler structures off the real axis (through analytic
continuation of Jacobi fields to complex time), real fiber polarizations on
it.  Ships a verification battery for the structural identities of the
family and a CLI for batch tables, suites, and domain sweeps.
"""

__version__ = "0.1.0"

from . import adapted, jacobi, models, semigroup, verify  # noqa: F401
from ._kernel import BACKEND as KERNEL_BACKEND  # noqa: F401
from .adapted import (ComplexStructureTensor, PhiMatrix,  # noqa: F401
                      TangentAtGeodesic, act, act_tangent, canonical_metric,
                      complex_structure, domain_check, omega, phi_at,
                      phi_real, real_polarization)
from .config import DEFAULT_CONFIG, SolverConfig  # noqa: F401
from .models import (ConstantCurvature, Euclidean, GeodesicPoint,  # noqa: F401
                     ModelMetric, SurfaceOfRevolution, cosh_profile,
                     poly_profile, torus_profile)
from .semigroup import (GroupElement, PolarizationParam, act_on_complex,  # noqa: F401
                        character, compose, invert, leaf_direction,
                        solve_transporter)
