import networkx as nx
import pytest

from services import morse
from services.exceptions import InvalidInputError, SizeLimitError
from services.pipeline import run_morse_suite
from services.polarize import bpol_monomial
from services.resolution import AdmissiblePair, b_set, build_P
from services.borel import m_bracket
from tests.conftest import mono


def test_cell_ids():
    assert morse.cell_id(0b11001) == "[0,3,4]"
    assert morse.parse_cell_id("[0,3,4]") == 0b11001
    assert morse.parse_cell_id("{4, 0}") == 0b10001
    with pytest.raises(InvalidInputError):
        morse.parse_cell_id("[a]")
    with pytest.raises(InvalidInputError):
        morse.parse_cell_id("[]")


def test_incidence_signs():
    sigma = 0b1011  # {0, 1, 3}
    assert morse.MorseMatching.incidence(sigma, 0b1010) == -1
    assert morse.MorseMatching.incidence(sigma, 0b1001) == 1
    assert morse.MorseMatching.incidence(sigma, 0b0011) == -1


def test_size_limit(seven):
    with pytest.raises(SizeLimitError):
        morse.build_matching(seven, max_gens=5)


def test_prec_order_and_matched_partner(seven):
    matching = morse.build_matching(seven)
    # {x1*x4, x2^2, x2*x3} polarized
    sigma = (1 << 3) | (1 << 4) | (1 << 5)
    assert matching.tilde[5] == bpol_monomial(mono("x2*x3", 4), 2)
    assert matching.n_set(sigma) == (1 << 2) | (1 << 4)
    assert morse.prec_sigma(matching, sigma)[:2] == [matching.tilde[2], matching.tilde[4]]
    u, n = morse.u_and_n(matching, sigma)
    assert u == 2
    assert n == bpol_monomial(mono("x1*x3", 4), 2)
    assert matching.up[sigma] == sigma | (1 << 2)
    assert not matching.is_critical(sigma)


def test_singletons_are_critical(seven):
    matching = morse.build_matching(seven)
    assert all(matching.is_critical(1 << k) for k in range(len(seven.gens)))


def test_f_vectors(seven, six):
    assert morse.f_vector(morse.build_matching(seven)) == [7, 12, 8, 2]
    assert morse.f_vector(morse.build_matching(six)) == [6, 11, 8, 2]


def test_matching_is_acyclic(seven, six, small_corpus):
    for ideal in [seven, six, *small_corpus]:
        matching = morse.build_matching(ideal)
        report = morse.verify_matching(matching)
        assert report.passed, report.matching_violations + report.lcm_failures
        assert nx.is_directed_acyclic_graph(matching.graph())


def test_critical_cells_are_admissible_pairs(seven):
    matching = morse.build_matching(seven)
    cells = morse.critical_cells(matching)
    assert len(cells) == 29
    for cell in cells:
        assert matching.mask_of(cell.pair) == cell.mask
        assert matching.pair_of(cell.mask) == cell.pair


def test_gradient_paths_follow_the_b_terms(seven):
    matching = morse.build_matching(seven)
    pair = AdmissiblePair.from_rows(seven, [1, 2, 3], mono("x2*x4", 4))
    sigma = matching.mask_of(pair)
    for r in b_set(seven, pair):
        moved = AdmissiblePair(pair.drop(r), m_bracket(seven, pair.m, pair.rows[r - 1]), pair.d)
        paths = morse.gradient_paths(matching, sigma, matching.mask_of(moved))
        assert len(paths) == 1
        assert (-1) ** pair.q * paths[0].sign == (-1) ** r


def test_gradient_paths_need_critical_ends(seven):
    matching = morse.build_matching(seven)
    sigma = (1 << 3) | (1 << 4) | (1 << 5)
    with pytest.raises(InvalidInputError):
        morse.gradient_paths(matching, sigma, 1 << 3)


def test_path_checks(seven, six, small_corpus):
    for ideal in [seven, six, *small_corpus]:
        assert morse.check_paths(morse.build_matching(ideal)) == []


def test_morse_complex_is_P(seven, six, small_corpus):
    for ideal in [seven, six, *small_corpus]:
        matching = morse.build_matching(ideal)
        Q = morse.build_Q(matching)
        P = build_P(ideal)
        assert Q.ranks() == P.ranks()
        assert morse.q_p_mismatches(Q, P) == []
        assert morse.compare_Q_P(Q, P)


def test_face_poset(seven):
    matching = morse.build_matching(seven)
    poset = morse.face_poset(matching)
    assert poset.number_of_nodes() == 29
    dims = sorted(data["dim"] for _, data in poset.nodes(data=True))
    assert dims.count(0) == 7 and dims.count(3) == 2
    report = morse.check_diamond_and_incidence(matching)
    assert report.passed, report.diamond_violations + report.incidence_violations


def test_full_suite(seven):
    model = run_morse_suite(seven)
    assert model.passed
    assert model.f_vector == [7, 12, 8, 2]
    assert model.compare_q_p


def test_corrupted_morse_complex_is_reported(seven):
    matching = morse.build_matching(seven)
    Q = morse.build_Q(matching)
    P = build_P(seven)
    col, row, coef, degree = next(Q.entries(2))

    flipped = Q.with_flipped_sign(2, col, row)
    assert not morse.compare_Q_P(flipped, P)
    mismatches = morse.q_p_mismatches(flipped, P)
    assert len(mismatches) == 1
    assert mismatches[0].startswith("level 2:")

    doubled = Q.with_flipped_sign(2, col, row)
    doubled.diffs[2][col][row] = (2 * coef, degree)
    report = morse.check_diamond_and_incidence(matching, doubled)
    assert len(report.incidence_violations) == 1
    assert not report.diamond_violations


def test_broken_diamond_is_reported(seven):
    matching = morse.build_matching(seven)
    poset = morse.face_poset(matching).copy()
    top = next(node for node, data in poset.nodes(data=True) if data["dim"] == 3)
    poset.remove_edge(top, next(iter(poset.successors(top))))
    report = morse.check_diamond_and_incidence(matching, poset=poset)
    assert report.diamond_violations
    assert not report.incidence_violations
