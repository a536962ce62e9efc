"""Exact algebra of the affine semigroup of maps t -> a + b*t.

Elements act on the real line (and by extension on the complex plane); the
dilation part b is a multiplicative character.  The semigroup indexes, through
its left-invariant polarizations, the one-parameter family of structures this
package constructs: a finite parameter s with Im s != 0 labels a complex
polarization, a real s or the point at infinity labels a real one.

Everything in this module is plain scalar arithmetic; comparisons are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import NoTransporterError, NotInvertibleError

__all__ = [
    "GroupElement",
    "PolarizationParam",
    "IDENTITY",
    "compose",
    "character",
    "invert",
    "act_on_complex",
    "solve_transporter",
    "leaf_direction",
]


@dataclass(frozen=True)
class GroupElement:
    """The affine map t -> a + b*t.

    b may vanish or be negative: the collection is a semigroup, not a group.
    Membership in the sub-semigroup of contraction rate rho is |b| <= rho.
    """

    a: float
    b: float

    def __call__(self, t):
        return self.a + self.b * t

    def in_subsemigroup(self, rho: float) -> bool:
        return abs(self.b) <= rho


IDENTITY = GroupElement(0.0, 1.0)


class PolarizationParam:
    """A point of the extended complex plane labelling a polarization.

    Finite values with nonzero imaginary part label complex polarizations;
    finite real values and the point at infinity label real ones.
    """

    __slots__ = ("_value",)

    def __init__(self, value: complex):
        self._value = complex(value)

    @classmethod
    def infinity(cls) -> "PolarizationParam":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_value", None)
        return obj

    @property
    def is_infinity(self) -> bool:
        return self._value is None

    @property
    def value(self) -> complex:
        if self._value is None:
            raise ValueError("the point at infinity has no finite value")
        return self._value

    @property
    def is_real(self) -> bool:
        """True for the real-polarization branch (real finite s, or infinity)."""
        return self._value is None or self._value.imag == 0.0

    def __eq__(self, other):
        if isinstance(other, PolarizationParam):
            return self._value == other._value
        if isinstance(other, (int, float, complex)):
            return self._value is not None and self._value == complex(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._value)

    def __repr__(self):
        if self._value is None:
            return "PolarizationParam(inf)"
        return f"PolarizationParam({self._value})"


ParamLike = Union[PolarizationParam, complex, float, int]


def as_param(s: ParamLike) -> PolarizationParam:
    """Coerce a plain scalar to a PolarizationParam."""
    if isinstance(s, PolarizationParam):
        return s
    return PolarizationParam(s)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Composition g o h, i.e. t -> g(h(t)).  Identity is (0, 1)."""
    return GroupElement(g.a + g.b * h.a, g.b * h.b)


def character(g: GroupElement) -> float:
    """The multiplicative character: the dilation part b."""
    return g.b


def invert(g: GroupElement) -> GroupElement:
    """Inverse map, defined only when the dilation part is nonzero."""
    if g.b == 0.0:
        raise NotInvertibleError("element with b = 0 has no inverse")
    return GroupElement(-g.a / g.b, 1.0 / g.b)


def act_on_complex(g: GroupElement, s: ParamLike) -> PolarizationParam:
    """Affine action on the extended plane: s -> a + b*s, infinity -> infinity.

    A degenerate element (b = 0) maps infinity to nothing sensible and is
    rejected; on finite s it returns the constant a.
    """
    s = as_param(s)
    if s.is_infinity:
        if g.b == 0.0:
            raise NoTransporterError(
                "constant map (b = 0) collapses the point at infinity")
        return PolarizationParam.infinity()
    return PolarizationParam(g.a + g.b * s.value)


def solve_transporter(s_from: ParamLike, s_to: ParamLike) -> GroupElement:
    """The affine map g with g(s_from) = s_to.

    Unique when Im s_from != 0; in particular the transporter from i to s is
    (Re s, Im s).  When both parameters are real the solution is not unique
    and the translation-only representative (s_to - s_from, 1) is returned.
    A real source cannot reach a non-real target.
    """
    sf = as_param(s_from)
    st = as_param(s_to)
    if sf.is_infinity or st.is_infinity:
        raise NoTransporterError("transporter solving requires finite parameters")
    zf, zt = sf.value, st.value
    if zf.imag != 0.0:
        b = zt.imag / zf.imag
        a = zt.real - b * zf.real
        return GroupElement(a, b)
    if zt.imag != 0.0:
        raise NoTransporterError(
            "no affine map with real coefficients carries a real parameter "
            "to a non-real one")
    # Both real: b is free; pick the translation.
    return GroupElement(zt.real - zf.real, 1.0)


def leaf_direction(s: ParamLike) -> tuple:
    """Tangent direction in the (a, b) plane of the stabilizer line through id.

    For finite real s the leaves of the associated real polarization have
    slope -1/s, direction (s, -1); the exceptional polarization at infinity
    has horizontal leaves, direction (1, 0).  Non-real s has no leaves.
    """
    s = as_param(s)
    if s.is_infinity:
        return (1.0, 0.0)
    if s.value.imag != 0.0:
        raise ValueError("complex parameter labels a complex polarization; "
                         "it has no leaf direction")
    return (s.value.real, -1.0)
