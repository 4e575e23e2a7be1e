"""End-to-end certification of one Borel fixed ideal, shared by the CLI and the API."""
import logging
from dataclasses import dataclass, field

from schemas.complex_schema import CertificationModel, MorseModel, VerificationModel
from services import morse
from services.borel import BorelIdeal, MonomialIdeal, colon_ideal, has_linear_quotients, is_shellable_order
from services.homology import (
    CertificationReport,
    FieldSpec,
    betti_of_complex,
    betti_oracle,
    certify_resolution,
    compare_betti,
)
from services.polarize import (
    GammaSequence,
    SpecializationMap,
    bpol_ideal,
    gamma_ideal,
    lex_colon_variables,
    sq_ideal,
)
from services.resolution import build_P, ek_counts, specialize_complex
from services.text_io import ideal_response

logger = logging.getLogger(__name__)

DEFAULT_MORSE_LIMIT = 12


def default_gammas(d: int) -> list[GammaSequence]:
    """a = (0,1,2,...) plus two sequences that repeat values."""
    return [
        GammaSequence.squarefree(d),
        GammaSequence(tuple(k // 2 for k in range(d))),
        GammaSequence(tuple((k + 1) // 2 for k in range(d))),
    ]


def colon_form_holds(ideal: BorelIdeal) -> bool:
    """(b-pol(I_{r-1}) : b-pol(m_r)) is the closed-form list of variables for every r."""
    polarized = bpol_ideal(ideal)
    for r in range(1, len(ideal.gens)):
        prefix = MonomialIdeal(polarized.gens[:r], polarized.ring)
        computed = set(colon_ideal(prefix, polarized.gens[r]).gens)
        if computed != set(lex_colon_variables(ideal.gens[r], ideal.maxdeg)):
            logger.warning("colon form fails at r=%d for %s", r + 1, ideal)
            return False
    return True


def shellable_under_sqsubset(ideal: BorelIdeal) -> bool:
    polarized = bpol_ideal(ideal)
    order = morse.sqsubset_order(ideal)
    return has_linear_quotients(polarized, order) and is_shellable_order(polarized, order)


def certification_model(report: CertificationReport) -> CertificationModel:
    return CertificationModel(
        name=report.name,
        field=report.field_kind,
        passed=report.passed,
        ranks=report.ranks,
        checked_degrees=report.checked_degrees,
        composite_witnesses=[list(w) for w in report.composite_witnesses],
        unit_entries=[list(u) for u in report.unit_entries],
        degree_problems=report.degree_problems,
        strand_failures=[list(f) for f in report.strand_failures],
    )


def run_morse_suite(ideal: BorelIdeal, P=None, max_gens: int = morse.DEFAULT_MAX_GENS) -> MorseModel:
    matching = morse.build_matching(ideal, max_gens)
    report = morse.verify_matching(matching)
    path_failures = morse.check_paths(matching)
    Q = morse.build_Q(matching)
    P = P or build_P(ideal)
    mismatches = morse.q_p_mismatches(Q, P)
    diamond = morse.check_diamond_and_incidence(matching, Q)
    same = Q.ranks() == P.ranks() and not mismatches
    return MorseModel(
        passed=report.passed and not path_failures and same and diamond.passed,
        edges=report.edges,
        critical=report.critical,
        f_vector=morse.f_vector(matching),
        compare_q_p=same,
        matching_violations=report.matching_violations,
        cycle=[[morse.cell_id(a), morse.cell_id(b)] for a, b in report.cycle],
        lcm_failures=report.lcm_failures,
        path_failures=path_failures,
        q_p_mismatches=mismatches,
        incidence_violations=diamond.incidence_violations,
        diamond_violations=diamond.diamond_violations,
    )


@dataclass
class VerificationSummary:
    ideal: BorelIdeal
    field_spec: FieldSpec
    ranks: list[int]
    ek_counts: list[int]
    resolution: CertificationReport
    specializations: list[CertificationReport] = field(default_factory=list)
    betti_equal_bpol: bool = False
    betti_equal_sq: bool = False
    betti_matches_complex: bool = False
    colon_form: bool = False
    linear_quotients: bool = False
    morse: MorseModel | None = None
    betti_differences: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (
            self.ranks[1:] == self.ek_counts
            and self.resolution.passed
            and all(r.passed for r in self.specializations)
            and self.betti_equal_bpol
            and self.betti_equal_sq
            and self.betti_matches_complex
            and self.colon_form
            and self.linear_quotients
            and (self.morse is None or self.morse.passed)
        )

    def to_model(self) -> VerificationModel:
        return VerificationModel(
            ideal=ideal_response(self.ideal.ideal, borel_fixed=True),
            field=self.field_spec.describe(),
            passed=self.passed,
            ranks=self.ranks,
            ek_counts=self.ek_counts,
            resolution=certification_model(self.resolution),
            specializations=[certification_model(r) for r in self.specializations],
            betti_equal_bpol=self.betti_equal_bpol,
            betti_equal_sq=self.betti_equal_sq,
            betti_matches_complex=self.betti_matches_complex,
            colon_form=self.colon_form,
            linear_quotients=self.linear_quotients,
            morse=self.morse,
            betti_differences=[[i, j, a, b] for (i, j), (a, b) in self.betti_differences.items()],
        )

    def summary_row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        morse_part = "-" if self.morse is None else ("ok" if self.morse.passed else "FAIL")
        return f"{status}  gens={len(self.ideal.gens):>2}  ranks={self.ranks[1:]}  morse={morse_part}  {self.ideal}"


def verify_ideal(
    ideal: BorelIdeal,
    field_spec: FieldSpec | None = None,
    gammas: list[GammaSequence] | None = None,
    morse_limit: int = DEFAULT_MORSE_LIMIT,
) -> VerificationSummary:
    field_spec = field_spec or FieldSpec()
    logger.info("--- Verifying %s ---", ideal)
    P = build_P(ideal)
    polarized = bpol_ideal(ideal)
    summary = VerificationSummary(
        ideal=ideal,
        field_spec=field_spec,
        ranks=P.ranks(),
        ek_counts=ek_counts(ideal),
        resolution=certify_resolution(P, polarized, field_spec),
    )

    theta = SpecializationMap.theta(P.ring)
    summary.specializations.append(certify_resolution(specialize_complex(P, theta), ideal.ideal, field_spec))
    for a in gammas or default_gammas(ideal.maxdeg):
        phi = SpecializationMap.theta_a(P.ring, a)
        summary.specializations.append(
            certify_resolution(specialize_complex(P, phi), gamma_ideal(ideal, a), field_spec)
        )

    comparison = compare_betti(ideal, field_spec)
    summary.betti_equal_bpol = comparison.equal
    summary.betti_differences = comparison.differences()
    summary.betti_equal_sq = comparison.ideal.graded() == betti_oracle(sq_ideal(ideal), field_spec).graded()
    summary.betti_matches_complex = (
        betti_of_complex(P).multigraded() == comparison.polarized.multigraded()
    )
    summary.colon_form = colon_form_holds(ideal)
    summary.linear_quotients = shellable_under_sqsubset(ideal)
    if len(ideal.gens) <= morse_limit:
        summary.morse = run_morse_suite(ideal, P)
    logger.info(summary.summary_row())
    return summary
