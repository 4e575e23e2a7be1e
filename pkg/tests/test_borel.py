import pytest

from services.borel import (
    BorelIdeal,
    MonomialIdeal,
    borel_closure,
    colon_ideal,
    ek_g,
    fb,
    has_linear_quotients,
    is_borel_fixed,
    is_shellable_order,
    is_sq_strongly_stable,
    is_stable,
    lex_filtration,
    m_bracket,
)
from services.exceptions import InvalidInputError, NotBorelError, NotInIdealError, RingMismatchError
from services.monomials import Monomial, RingSpec, mu, nu
from services.polarize import bpol_ideal, sq_ideal
from services.morse import sqsubset_order
from services.pipeline import colon_form_holds
from services.text_io import parse_ideal_text
from tests.conftest import mono


def test_sample_ideals_are_borel(seven, six):
    assert is_borel_fixed(seven.ideal)
    assert is_borel_fixed(six.ideal)
    assert len(seven.gens) == 7
    assert seven.maxdeg == 2
    assert six.maxdeg == 3


def test_stable_but_not_borel(stable_not_borel):
    assert is_stable(stable_not_borel)
    assert not is_borel_fixed(stable_not_borel)
    with pytest.raises(NotBorelError):
        BorelIdeal.of(stable_not_borel)


def test_generators_are_lex_descending(seven):
    assert [str(g) for g in seven.gens] == ["x1^2", "x1*x2", "x1*x3", "x1*x4", "x2^2", "x2*x3", "x2*x4"]


def test_closure(quartic_seed):
    gens = set(quartic_seed.gens)
    assert mono("x1^2*x3*x4", 4) in gens
    assert mono("x1^3*x4", 4) in gens
    assert mono("x1^2*x2*x4", 4) in gens
    assert mono("x1^4", 4) in gens
    assert all(g.degree == 4 for g in gens)
    assert mono("x2*x3*x4^2", 4) not in gens
    assert is_borel_fixed(quartic_seed.ideal)


def test_closure_of_stable_ideal_adds_the_missing_move(stable_not_borel):
    closed = borel_closure(stable_not_borel.gens)
    assert closed.contains(mono("x1*x3", 3))


def test_closure_rejects_double_ring():
    ring = RingSpec.double(2, 2)
    with pytest.raises(RingMismatchError):
        borel_closure([Monomial.variable((1, 1), ring)])


def test_ek_decomposition(seven):
    assert ek_g(seven, mono("x1*x3*x4", 4)) == mono("x1*x3", 4)
    assert ek_g(seven, mono("x2^3", 4)) == mono("x2^2", 4)
    with pytest.raises(NotInIdealError):
        ek_g(seven, mono("x3*x4", 4))


def test_forward_move_and_bracket(quartic_seed):
    m = mono("x1^2*x3*x4", 4)
    assert fb(m, 2) == mono("x1^2*x2*x4", 4)
    assert fb(m, 1) == mono("x1^3*x4", 4)
    assert m_bracket(quartic_seed, m, 1) == mono("x1^3*x4", 4)
    assert m_bracket(quartic_seed, m, 4) == m
    with pytest.raises(InvalidInputError):
        fb(m, 4)


def test_bracket_drops_to_a_shorter_generator(quartic_seed):
    bigger = borel_closure(quartic_seed.gens + (mono("x1^2*x2", 4),), RingSpec.single(4), 4)
    m = mono("x1^2*x3*x4", 4)
    assert m_bracket(bigger, m, 1) == mono("x1^3", 4)
    assert m_bracket(bigger, m, 2) == mono("x1^2*x2", 4)


def test_lex_prefixes_stay_borel(seven, small_corpus):
    for ideal in [seven, *small_corpus]:
        filtration = lex_filtration(ideal)
        assert len(filtration) == len(ideal.gens)
        assert filtration[-1].ideal == ideal.ideal


def test_colon_ideal():
    ideal = MonomialIdeal.from_generators([mono("x1^2", 3), mono("x1*x2", 3)])
    colon = colon_ideal(ideal, mono("x2^2", 3))
    assert [str(g) for g in colon.gens] == ["x1"]


def test_colons_of_the_polarized_cubic():
    polarized = bpol_ideal(parse_ideal_text("x1^3, x1^2*x2, x1*x2^2, x2^3"))
    a, b, c, top = polarized.gens
    assert str(c) == "x[1,1]*x[2,2]*x[2,3]"

    def colon(before, m):
        return [str(g) for g in colon_ideal(MonomialIdeal.from_generators(before, polarized.ring), m).gens]

    assert colon([a, b], c) == ["x[1,2]"]
    assert colon([b, a, c], top) == ["x[1,1]"]
    assert colon([a], b) == ["x[1,3]"]
    assert colon([b, a], c) == ["x[1,2]"]
    assert has_linear_quotients(polarized, [a, b, c, top])
    assert has_linear_quotients(polarized, [b, a, c, top])


def test_lex_colons_have_the_closed_form(seven, six, small_corpus):
    for ideal in [seven, six, *small_corpus]:
        assert colon_form_holds(ideal)


def test_bpol_has_linear_quotients(seven, six, small_corpus):
    for ideal in [seven, six, *small_corpus]:
        polarized = bpol_ideal(ideal)
        order = sqsubset_order(ideal)
        assert has_linear_quotients(polarized, order)
        assert is_shellable_order(polarized, order)


def test_order_must_be_a_permutation(seven):
    polarized = bpol_ideal(seven)
    with pytest.raises(InvalidInputError):
        has_linear_quotients(polarized, list(polarized.gens[:-1]))


def test_sq_is_squarefree_strongly_stable(seven, small_corpus):
    for ideal in [seven, *small_corpus]:
        assert is_sq_strongly_stable(sq_ideal(ideal))


def test_closure_is_idempotent(seven, quartic_seed, small_corpus):
    for ideal in [seven, quartic_seed, *small_corpus]:
        assert borel_closure(ideal.gens, ideal.ring).ideal == ideal.ideal


def test_ek_split_over_multiples(seven, quartic_seed, small_corpus):
    for ideal in [seven, quartic_seed, *small_corpus]:
        variables = [Monomial.variable(k, ideal.ring) for k in range(1, ideal.ring.n + 1)]
        for m in ideal.gens:
            assert ek_g(ideal, m) == m
            for x in variables:
                for y in variables:
                    multiple = m * x * y
                    g = ek_g(ideal, multiple)
                    assert g in ideal.ideal.gen_set
                    rest = multiple / g
                    assert rest.degree == 2 + m.degree - g.degree
                    assert nu(g) <= mu(rest)


def test_bracket_agrees_with_the_move_up_to_i(seven, quartic_seed, small_corpus):
    for ideal in [seven, quartic_seed, *small_corpus]:
        for m in ideal.gens:
            for i in range(1, nu(m)):
                moved = fb(m, i)
                bracket = m_bracket(ideal, m, i)
                assert nu(bracket) >= i
                assert all(bracket.exponent(k) == moved.exponent(k) for k in range(1, i + 1))


def test_squarefree_stability_can_fail():
    assert not is_sq_strongly_stable(parse_ideal_text("x2*x3"))
    assert is_sq_strongly_stable(parse_ideal_text("x1*x2, x1*x3, x2*x3"))
    with pytest.raises(InvalidInputError):
        is_sq_strongly_stable(parse_ideal_text("x1^2, x1*x2"))
