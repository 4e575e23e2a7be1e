from itertools import combinations

import pytest

from services.borel import borel_closure, fb
from services.exceptions import InvalidInputError, NotInIdealError
from services.homology import certify_resolution
from services.monomials import Monomial, RingSpec, nu
from services.polarize import GammaSequence, SpecializationMap, bpol_ideal, bpol_monomial, gamma_ideal, sq_ideal
from services.resolution import (
    AdmissiblePair,
    b_set,
    build_P,
    check_order_ideal_shape,
    ek_counts,
    enumerate_admissible,
    expected_order_ideal,
    forced_column,
    pair_from_diagram,
    poset_AI,
    rmv_blocks,
    specialize_complex,
    split_differential,
    stair_diagram,
    x_of,
)
from tests.conftest import mono

FULL_STAIRCASE = """\
BBW..
..BW.
...W.
...W.
...W.
...BB"""


@pytest.fixture
def staircase():
    # closure of x1^2*x2*x6^2, the generator of the staircase pictures
    return borel_closure([mono("x1^2*x2*x6^2", 6)], RingSpec.single(6))


def test_ranks_match_ek_counts(seven, six):
    assert build_P(seven).ranks() == [1, 7, 12, 8, 2]
    assert ek_counts(seven) == [7, 12, 8, 2]
    assert build_P(six).ranks()[1:] == ek_counts(six) == [6, 11, 8, 2]


def test_principal_ideal():
    ideal = borel_closure([mono("x1", 3)], RingSpec.single(3))
    assert build_P(ideal).ranks() == [1, 1]


def test_admissible_pairs():
    ideal = borel_closure([mono("x1^2*x3*x4", 4)], RingSpec.single(4))
    m = mono("x1^2*x3*x4", 4)
    pair = AdmissiblePair.from_rows(ideal, [1, 2, 3], m)
    assert pair.F == ((1, 3), (2, 3), (3, 4))
    assert pair.q == 3
    assert str(pair.x) == "x[1,1]*x[1,2]*x[1,3]*x[2,3]*x[3,3]*x[3,4]*x[4,4]"
    assert x_of(pair) == pair.x
    with pytest.raises(InvalidInputError):
        AdmissiblePair.build(ideal, [(1, 2)], m)
    with pytest.raises(InvalidInputError):
        AdmissiblePair.from_rows(ideal, [4], m)
    with pytest.raises(NotInIdealError):
        AdmissiblePair.from_rows(ideal, [], mono("x3^4", 4))


def test_b_sets():
    m = mono("x1^2*x3*x4", 4)
    ideal = borel_closure([m], RingSpec.single(4))
    pair = AdmissiblePair.from_rows(ideal, [1, 2, 3], m)
    assert b_set(ideal, pair) == {2, 3}

    bigger = borel_closure([m, mono("x1^2*x2", 4)], RingSpec.single(4), 4)
    pair = AdmissiblePair.from_rows(bigger, [1, 2, 3], m)
    assert b_set(bigger, pair) == {3}


def test_differential_support(seven):
    P = build_P(seven)
    pair = AdmissiblePair.from_rows(seven, [1, 2, 3], mono("x2*x4", 4))
    assert pair.F == ((1, 1), (2, 2), (3, 2))
    assert b_set(seven, pair) == {1, 3}
    col = P.index_of(4, pair.label)
    assert len(P.column(4, col)) == 5


def test_enumeration_is_grouped_by_q(seven):
    by_q = enumerate_admissible(seven)
    assert [len(level) for level in by_q] == [7, 12, 8, 2]
    assert all(pair.q == q for q, level in enumerate(by_q) for pair in level)


def test_P_resolves_bpol(seven, six, small_corpus):
    for ideal in [seven, six, *small_corpus]:
        P = build_P(ideal)
        report = certify_resolution(P, bpol_ideal(ideal))
        assert report.passed, report.summary()


def test_specializations_resolve(seven, small_corpus):
    for ideal in [seven, *small_corpus]:
        P = build_P(ideal)
        S = specialize_complex(P, SpecializationMap.theta(P.ring))
        assert certify_resolution(S, ideal.ideal).passed
        sq = specialize_complex(P, SpecializationMap.theta_prime(P.ring))
        assert certify_resolution(sq, sq_ideal(ideal)).passed
        a = GammaSequence(tuple((k + 1) // 2 for k in range(ideal.maxdeg)))
        gamma = specialize_complex(P, SpecializationMap.theta_a(P.ring, a))
        assert certify_resolution(gamma, gamma_ideal(ideal, a)).passed


def test_flipped_sign_is_caught(seven):
    P = build_P(seven)
    col, row, _, _ = next(P.entries(2))
    broken = P.with_flipped_sign(2, col, row)
    report = certify_resolution(broken, bpol_ideal(seven))
    assert not report.passed
    assert report.composite_witnesses


def test_split_differential(seven):
    P = build_P(seven)
    split = split_differential(P)
    assert split.recombined() == P.diffs
    for col, column in split.delta_prime[1].items():
        ((row, (coef, mono_)),) = column.items()
        assert row == 0
        assert coef == -1
        assert mono_ == P.levels[1][col].degree
    for q in range(2, len(P.levels)):
        for col, column in split.delta[q].items():
            source = P.levels[q][col].payload
            assert all(P.levels[q - 1][row].payload.m == source.m for row in column)


def test_stair_diagram(staircase):
    m = mono("x1^2*x2*x6^2", 6)
    pair = AdmissiblePair.from_rows(staircase, [1, 2, 3, 4, 5], m)
    assert pair.F == ((1, 3), (2, 4), (3, 4), (4, 4), (5, 4))
    assert stair_diagram(pair) == FULL_STAIRCASE
    assert pair_from_diagram(staircase, FULL_STAIRCASE) == pair


def test_second_staircase(staircase):
    m = mono("x1^2*x2*x6^2", 6)
    pair = AdmissiblePair.from_rows(staircase, [1, 3, 4], m)
    assert pair.F == ((1, 3), (3, 4), (4, 4))
    assert stair_diagram(pair).splitlines()[1] == "..B.."


def test_rmv_blocks(staircase):
    m = mono("x1^2*x2*x6^2", 6)
    pair = AdmissiblePair.from_rows(staircase, [1, 2, 3, 4, 5], m)
    assert rmv_blocks(pair) == [
        frozenset({(1, 3), (2, 3)}),
        frozenset({(2, 4), (3, 4), (4, 4), (5, 4), (6, 4)}),
    ]


def test_pair_poset(seven):
    poset = poset_AI(seven)
    assert poset.graph.number_of_nodes() == 29
    top = {
        "x1*x4": AdmissiblePair.from_rows(seven, [1, 2, 3], mono("x1*x4", 4)),
        "x2*x4": AdmissiblePair.from_rows(seven, [1, 2, 3], mono("x2*x4", 4)),
    }
    assert {p.label for p in poset.maximal()} == {p.label for p in top.values()}
    assert len(expected_order_ideal(top["x1*x4"])) == 15
    assert len(expected_order_ideal(top["x2*x4"])) == 21
    for pair in top.values():
        assert check_order_ideal_shape(seven, pair, poset)


def test_order_ideal_shape_needs_one_degree(six):
    pair = AdmissiblePair.from_rows(six, [], mono("x1^2", 4))
    with pytest.raises(InvalidInputError):
        check_order_ideal_shape(six, pair)


def test_move_shifts_one_polarized_variable(seven, quartic_seed, small_corpus):
    for ideal in [seven, quartic_seed, *small_corpus]:
        d = ideal.maxdeg
        for m in ideal.gens:
            for i in range(1, nu(m)):
                j = forced_column(m, i)
                k = next(v for v in m.support if v > i)
                ring = RingSpec.double(ideal.ring.n, d)
                left = Monomial.variable((k, j), ring) * bpol_monomial(fb(m, i), d)
                right = Monomial.variable((i, j), ring) * bpol_monomial(m, d)
                assert left == right


def test_moves_commute_or_collapse(seven, quartic_seed, small_corpus):
    for ideal in [seven, quartic_seed, *small_corpus]:
        for m in ideal.gens:
            for i, i2 in combinations(range(1, nu(m)), 2):
                if forced_column(m, i) < forced_column(m, i2):
                    assert fb(fb(m, i2), i) == fb(fb(m, i), i2)
                else:
                    assert fb(fb(m, i2), i) == fb(m, i)


def test_b_set_of_one_degree_ideals(seven, quartic_seed, staircase):
    for ideal in [seven, quartic_seed, staircase]:
        for level in enumerate_admissible(ideal)[1:]:
            for pair in level:
                columns = pair.columns
                expected = {
                    r for r in range(1, pair.q + 1) if r == pair.q or columns[r - 1] < columns[r]
                }
                assert b_set(ideal, pair) == expected


def test_x_of_is_injective(seven, six, small_corpus):
    for ideal in [seven, six, *small_corpus]:
        pairs = [pair for level in enumerate_admissible(ideal) for pair in level]
        assert len({x_of(pair) for pair in pairs}) == len(pairs)
