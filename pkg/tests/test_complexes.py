import numpy as np
import pytest

from reebtwist.complexes import (
    ComplexValidationError,
    CyclicAction,
    GradedF2Complex,
    HomologyTable,
    homology,
    quotient_by_action,
    validate,
)
from reebtwist.f2 import F2Matrix

from oracles import brute_homology_dim, random_valid_complex


def rung(m: int) -> F2Matrix:
    eye = F2Matrix.identity(m)
    shift = F2Matrix.cyclic_shift(m, 1)
    return F2Matrix(m, m, tuple(a ^ b for a, b in zip(eye.row_bits, shift.row_bits)))


def ladder(m: int, d_min: int, d_max: int, shift: int = 1,
           with_action: bool = True) -> GradedF2Complex:
    """Alternating ladder: all-ones map out of even degrees, I+shift out of odd."""
    gens = {d: tuple(f"g{d}.{p}" for p in range(m)) for d in range(d_min, d_max + 1)}
    bnds = {d: (rung(m) if d % 2 else F2Matrix.ones(m, m))
            for d in range(d_min + 1, d_max + 1)}
    action = None
    if with_action:
        perm = tuple((i + shift) % m for i in range(m))
        action = CyclicAction(order=m, perms={d: perm for d in gens})
    return GradedF2Complex(d_min, d_max, gens, bnds, action)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_ladder_valid_for_every_order(m):
    # both products of the two rung matrices have even entries, so d.d = 0
    report = validate(ladder(m, 0, 7))
    assert report.ok, report.failures


def test_zero_boundaries_valid():
    gens = {d: ("a", "b") for d in range(4)}
    bnds = {d: F2Matrix.zeros(2, 2) for d in range(1, 4)}
    assert validate(GradedF2Complex(0, 3, gens, bnds)).ok


def test_identity_boundaries_invalid():
    gens = {d: ("a",) for d in range(3)}
    bnds = {d: F2Matrix.identity(1) for d in range(1, 3)}
    report = validate(GradedF2Complex(0, 2, gens, bnds))
    assert not report.ok
    assert "degree 0" in report.failures[0]
    with pytest.raises(ComplexValidationError):
        homology(GradedF2Complex(0, 2, gens, bnds))


def test_homology_alternating_one_zero():
    # one generator per degree, maps alternating 1 and 0: vanishing homology
    gens = {d: ("e",) for d in range(6)}
    bnds = {d: (F2Matrix.identity(1) if d % 2 else F2Matrix.zeros(1, 1))
            for d in range(1, 6)}
    table = homology(GradedF2Complex(0, 5, gens, bnds))
    assert table.interior_dims() == {1: 0, 2: 0, 3: 0, 4: 0}


def test_homology_all_zero_boundaries():
    gens = {d: ("e",) for d in range(6)}
    bnds = {d: F2Matrix.zeros(1, 1) for d in range(1, 6)}
    table = homology(GradedF2Complex(0, 5, gens, bnds))
    assert all(v == 1 for v in table.interior_dims().values())
    # truncation-boundary degrees are present but flagged
    assert table.reliable[0] is False and table.reliable[5] is False


def test_homology_matches_exhaustive_enumeration():
    rng = np.random.default_rng(7)
    for _ in range(25):
        dims, bnds = random_valid_complex(rng, n_degrees=5, max_gens=4)
        gens = {d: tuple(f"x{d}.{i}" for i in range(dims[d])) for d in dims}
        mats = {d: F2Matrix.from_rows(bnds[d], cols=dims[d]) for d in bnds}
        c = GradedF2Complex(0, 4, gens, mats)
        table = homology(c)
        for d in c.interior_degrees():
            expected = brute_homology_dim(bnds[d], bnds[d + 1], dims[d])
            assert table.dims[d] == expected, (d, dims)


def test_quotient_even_order_kills_both_maps():
    q = quotient_by_action(ladder(2, 0, 5))
    assert all(q.dim(d) == 1 for d in q.degrees())
    assert all(q.boundaries[d].is_zero for d in range(1, 6))
    table = homology(q)
    assert all(v == 1 for v in table.interior_dims().values())


def test_quotient_odd_order_alternates():
    q = quotient_by_action(ladder(3, 0, 5))
    assert all(q.dim(d) == 1 for d in q.degrees())
    # the all-ones map descends to multiplication by 3 = 1, the rung to 2 = 0
    for d in range(1, 6):
        expected_zero = bool(d % 2)
        assert q.boundaries[d].is_zero == expected_zero, d
    table = homology(q)
    assert all(v == 0 for v in table.interior_dims().values())


def test_quotient_trivial_group_is_identity():
    c = ladder(1, 0, 5)
    q = quotient_by_action(c)
    assert q.action is None
    assert [q.dim(d) for d in q.degrees()] == [c.dim(d) for d in c.degrees()]
    assert all(q.boundaries[d] == c.boundaries[d] for d in range(1, 6))


def test_quotient_requires_an_action():
    gens = {0: ("a",), 1: ("b",)}
    bnds = {1: F2Matrix.zeros(1, 1)}
    with pytest.raises(ComplexValidationError, match="no action"):
        quotient_by_action(GradedF2Complex(0, 1, gens, bnds))


def test_quotient_rejects_fixed_generators():
    gens = {0: ("a", "b"), 1: ("c", "d")}
    bnds = {1: F2Matrix.zeros(2, 2)}
    action = CyclicAction(order=2, perms={0: (0, 1), 1: (1, 0)})
    c = GradedF2Complex(0, 1, gens, bnds, action)
    with pytest.raises(ComplexValidationError, match="not free"):
        quotient_by_action(c)


def test_quotient_rejects_non_equivariant_action():
    gens = {0: ("a", "b", "c"), 1: ("d", "e", "f")}
    bnds = {1: F2Matrix.from_rows([[1, 0, 0], [0, 0, 0], [0, 0, 0]])}
    cycle = (1, 2, 0)
    action = CyclicAction(order=3, perms={0: cycle, 1: cycle})
    c = GradedF2Complex(0, 1, gens, bnds, action)
    with pytest.raises(ComplexValidationError, match="commute"):
        quotient_by_action(c)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_truncation_stability(m):
    small = homology(ladder(m, 0, 7, with_action=False))
    large = homology(ladder(m, -2, 9, with_action=False))
    for d in range(1, 7):
        assert small.dims[d] == large.dims[d]
        assert small.reliable[d] and large.reliable[d]


@pytest.mark.parametrize("m", [2, 3, 5])
def test_euler_characteristic_of_quotient(m):
    c = ladder(m, 0, 5)
    q = quotient_by_action(c)
    chi = sum((-1) ** d * c.dim(d) for d in c.degrees())
    chi_q = sum((-1) ** d * q.dim(d) for d in q.degrees())
    assert chi == m * chi_q


def test_json_round_trip_bit_exact():
    c = ladder(3, -1, 4)
    text = c.to_json()
    back = GradedF2Complex.from_json(text)
    assert back == c
    assert back.to_json() == text

    plain = ladder(2, 0, 3, with_action=False)
    assert GradedF2Complex.from_json(plain.to_json()) == plain


def test_homology_table_rejects_negative_dims():
    with pytest.raises(ValueError):
        HomologyTable(dims={0: -1}, reliable={0: True})
