"""Numerical configuration defaults.

All tolerances used by the solvers and the polarization assembly live here so
that acceptance thresholds can be expressed relative to one set of knobs.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the ODE kernels and the phi/J assembly.

    Attributes
    ----------
    rtol, atol : float
        Relative/absolute tolerance of the adaptive Runge-Kutta stepper.
    max_step : float
        Step cap in path-arclength units.  Also bounds the node spacing used
        by the pole monitor.
    overflow_guard : float
        Integration aborts when any state entry exceeds this magnitude;
        distinguishes blowup from legitimate exponential growth.
    pole_threshold : float
        Smallest-singular-value level of the Jacobi value matrix below which
        a node is classified as sitting on a pole.
    pole_clearance : float
        Interpolated zeros of det Y closer than this to the path are flagged
        as poles.  Kept below detour_radius so a rerouted path (whose chords
        dip slightly inside the detour circle) is not re-flagged.
    detour_radius : float
        Radius of the semicircular detour taken around a flagged pole when
        detours are enabled.
    detour_poles : bool
        When True, phi continuation reroutes around interior poles instead of
        failing; endpoint singularities still fail.
    max_detours : int
        Upper bound on reroute attempts per continuation.
    endpoint_rcond : float
        Reciprocal-condition threshold classifying Y(end) as singular.
    imphi_max_cond : float
        Condition-number bound on Im(phi) beyond which the complex structure
        is declared degenerate.
    """

    rtol: float = 1e-12
    atol: float = 1e-12
    max_step: float = 0.25
    overflow_guard: float = 1e12
    pole_threshold: float = 1e-8
    pole_clearance: float = 0.02
    detour_radius: float = 0.05
    detour_poles: bool = False
    max_detours: int = 4
    endpoint_rcond: float = 1e-8
    imphi_max_cond: float = 1e10

    def with_(self, **kwargs):
        """Return a copy with the given fields replaced."""
        return replace(self, **kwargs)


DEFAULT_CONFIG = SolverConfig()
