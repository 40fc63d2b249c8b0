"""
The equivariant Morse-Bott chain complex of the rotation-symmetric sphere.

The critical set is one sphere per integer branch of the twisted spectrum,
linked into a string of pearls.  Auxiliary Morse data on each sphere is
the coordinate-weighted moduli function f(z) = sum_j j |z^j|^2, whose
critical manifolds are the n coordinate circles (Morse-Bott index 2(j-1)),
together with the m-periodic cosine on each circle with m maxima and m
minima.  A generator is therefore a triple (branch, circle, cosine
critical point), graded by 2 k n plus its total Morse index.

Boundary matrices alternate between two m x m stencils: out of odd degrees
each maximum hits its two neighbouring minima on the circle (identity plus
one-step cyclic shift), and out of even degrees every generator hits every
generator one degree down through an odd number of connecting flow lines,
counted as one mod 2 (the all-ones matrix).  Both stencils have two ones
per column, so the composite boundary vanishes for every m.  The rotation
acts by cyclically shifting the cosine critical points; dividing by it
collapses each degree to a single class, with the all-ones stencil
descending to multiplication by m mod 2 and the circle stencil to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import CyclicAction, GradedF2Complex, HomologyTable, homology, quotient_by_action
from .czindex import grading
from .f2 import F2Matrix
from .geometry import RotationTwist

MORSE_ON_SPHERE = "coordinate-weighted moduli"
MORSE_ON_CIRCLE = "m-periodic cosine"


@dataclass(frozen=True)
class PearlComplexSpec:
    """Build parameters: ambient dimension, twist, inclusive branch window."""

    n: int
    twist: RotationTwist
    window: tuple[int, int]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one complex coordinate")
        if self.twist.n != self.n:
            raise ValueError("twist exponent count does not match n")
        if self.window[0] > self.window[1]:
            raise ValueError("empty branch window")


def circle_boundary(m: int) -> F2Matrix:
    """Each circle maximum flows down to its two neighbouring minima."""
    eye = F2Matrix.identity(m)
    shift = F2Matrix.cyclic_shift(m, 1)
    return F2Matrix(m, m, tuple(a ^ b for a, b in zip(eye.row_bits, shift.row_bits)))


def connecting_boundary(m: int) -> F2Matrix:
    """One connecting flow line mod 2 between every generator pair."""
    return F2Matrix.ones(m, m)


def build_pearl_complex(spec: PearlComplexSpec) -> GradedF2Complex:
    """String-of-pearls complex over the branch window, with the cyclic action.

    Requires all twist exponents congruent (the directly computable case)
    and a window of at least two pearls.
    """
    twist, n = spec.twist, spec.n
    m = twist.m
    classes = twist.congruence_classes()
    if len(classes) != 1:
        raise ValueError(
            "pearl complex requires all twist exponents congruent; "
            f"found classes {sorted(classes)}")
    k_lo, k_hi = spec.window
    if k_hi - k_lo + 1 < 2:
        raise ValueError("window holds fewer than two pearls")

    shift = twist.k[0] % m
    d_min = grading(k_lo, 0, n)
    d_max = grading(k_hi, 2 * n - 1, n)

    generators: dict[int, tuple[str, ...]] = {}
    perms: dict[int, tuple[int, ...]] = {}
    for d in range(d_min, d_max + 1):
        k, offset = divmod(d - d_min, 2 * n)
        k += k_lo
        circle, level = divmod(offset, 2)
        generators[d] = tuple(
            f"k{k}.c{circle + 1}.h{level}.s{p}" for p in range(m))
        perms[d] = tuple((p + shift) % m for p in range(m))

    boundaries = {
        d: (circle_boundary(m) if d % 2 else connecting_boundary(m))
        for d in range(d_min + 1, d_max + 1)}
    action = CyclicAction(order=m, perms=perms)
    return GradedF2Complex(d_min, d_max, generators, boundaries, action)


def tate_homology(m: int, degrees: tuple[int, int]) -> HomologyTable:
    """Cyclic-group homology oracle from the two-periodic resolution.

    Tensoring the resolution with the trivial two-element module sends the
    difference map to zero and the norm map to m mod 2, leaving dimension
    one per degree for even m and zero for odd m.
    """
    if m < 1:
        raise ValueError("group order must be positive")
    lo, hi = int(degrees[0]), int(degrees[1])
    gens = {d: ("t",) for d in range(lo, hi + 1)}
    norm = F2Matrix.from_rows([[m % 2]])
    zero = F2Matrix.zeros(1, 1)
    bnds = {d: (zero if d % 2 else norm) for d in range(lo + 1, hi + 1)}
    return homology(GradedF2Complex(lo, hi, gens, bnds))


@dataclass(frozen=True)
class DegreeComparison:
    degree: int
    dim_quotient: int
    dim_tate: int

    @property
    def match(self) -> bool:
        return self.dim_quotient == self.dim_tate


@dataclass(frozen=True)
class OracleComparison:
    m: int
    n: int
    window: tuple[int, int]
    degrees: tuple[DegreeComparison, ...]

    @property
    def all_match(self) -> bool:
        return all(e.match for e in self.degrees)

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "window": list(self.window),
            "degrees": [{"d": e.degree, "dim_quotient": e.dim_quotient,
                         "dim_tate": e.dim_tate, "match": e.match}
                        for e in self.degrees],
        }


def compare_with_oracle(spec: PearlComplexSpec) -> OracleComparison:
    """Quotient-complex homology against the cyclic-group oracle, degreewise."""
    complex_ = build_pearl_complex(spec)
    quotient = quotient_by_action(complex_)
    table = homology(quotient)
    oracle = tate_homology(spec.twist.m, (complex_.d_min, complex_.d_max))
    entries = tuple(
        DegreeComparison(degree=d, dim_quotient=table.dims[d],
                         dim_tate=oracle.dims[d])
        for d in quotient.interior_degrees())
    return OracleComparison(m=spec.twist.m, n=spec.n, window=spec.window,
                            degrees=entries)
