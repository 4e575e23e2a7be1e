"""Command-line front end.

    python cli.py <verb> [ideal-file | -] [--ideal "x1^2, x1*x2"] [options]

Exit status: 0 when everything passed, 1 when a certification failed,
2 for usage, parse and input errors.
"""
import argparse
import logging
import sys
from pathlib import Path

from dependencies import settings, setup_logging
from schemas.complex_schema import PosetResponse
from schemas.ideal_schema import LcmLatticeResponse, RunConfig, RunDocument
from services import morse
from services.borel import BorelIdeal, MonomialIdeal, borel_closure, is_borel_fixed
from services.exceptions import AlgebraError, ConsistencyError, InvalidInputError
from services.homology import (
    betti_of_complex,
    betti_oracle,
    certify_resolution,
    compare_betti,
    joins_distinct,
    lcm_lattice,
)
from services.linalg import FieldSpec
from services.monomials import parse_monomial
from services.pipeline import certification_model, run_morse_suite, verify_ideal
from services.polarize import GammaSequence, SpecializationMap, bpol_ideal, gamma_ideal, sq_ideal
from services.corpus import borel_corpus
from services.resolution import AdmissiblePair, build_P, pair_from_diagram, poset_AI, specialize_complex
from services.text_io import (
    betti_response,
    complex_from_document,
    complex_to_document,
    diagram_response,
    dump_json,
    format_ideal,
    ideal_response,
    ideal_to_document,
    load_complex_document,
    load_ideal,
    parse_ideal_text,
    poset_to_dot,
)

logger = logging.getLogger("cli")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


# --- argument handling ---

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="ideal file (text or JSON); '-' reads stdin")
    common.add_argument("--ideal", help="inline generators, separated by commas")
    common.add_argument("--field", default=settings.field, help="gf<p> or q")
    common.add_argument("--a", help="gamma sequence, e.g. 0,1,1,2")
    common.add_argument("--closure", action="store_true", help="replace the input by its Borel closure")
    common.add_argument("--max-gens", type=int, default=settings.max_gens)
    common.add_argument(
        "--format",
        choices=("text", "json", "dot"),
        default="text",
        help="text, json (the structured document, readable back as input) or dot",
    )
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n", type=int, help="number of variables")
    common.add_argument("--d", type=int, help="column count of the polarized ring")
    common.add_argument("--log-level", default=settings.log_level)

    parser = argparse.ArgumentParser(prog="bpol", description="Borel polarization and its minimal free resolution")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("polarize", parents=[common], help="print b-pol(I)")
    sub.add_parser("sq", parents=[common], help="print the squarefree operator image of I")
    sub.add_parser("gamma", parents=[common], help="print I^gamma(a) for --a")

    p = sub.add_parser("resolve", parents=[common], help="build the resolution of b-pol(I) or a specialization")
    p.add_argument("--target", choices=("bpol", "S", "sq", "gamma"), default="bpol")

    p = sub.add_parser("betti", parents=[common], help="Betti numbers from the lcm-lattice")
    p.add_argument("--method", choices=("koszul", "taylor"), default="koszul")
    p.add_argument("--bpol", action="store_true", help="use b-pol(I) instead of I")

    p = sub.add_parser("verify", parents=[common], help="certify the resolution and the Betti equality")
    p.add_argument("--complex", help="certify a stored complex document instead of building one")
    p.add_argument("--bpol", action="store_true", help="only compare the Betti tables of I and b-pol(I)")
    p.add_argument("--no-morse", action="store_true")

    p = sub.add_parser("morse", parents=[common], help="the acyclic matching on the Taylor simplex")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--paths", nargs=2, metavar=("SIGMA", "TAU"), help="cell ids such as [0,2,3]")
    p.add_argument("--cell", help="show N, u and n for one cell id")
    p.add_argument("--poset", action="store_true", help="face poset of the Morse complex")

    p = sub.add_parser("diagram", parents=[common], help="stair diagram of an admissible pair")
    p.add_argument("--generator", help="minimal generator m of the pair")
    p.add_argument("--rows", default="", help="rows i_1 < ... < i_q, comma separated")
    p.add_argument("--grid", help="read the pair back from a stair diagram file")

    p = sub.add_parser("poset", parents=[common], help="cover graph of the admissible pairs")
    p.add_argument("--cells", action="store_true", help="use the Morse face poset instead")

    p = sub.add_parser("corpus", parents=[common], help="run the verification battery on a seeded corpus")
    p.add_argument("--size", type=int, default=20)
    p.add_argument("--max-n", type=int, default=5)
    p.add_argument("--max-degree", type=int, default=5)
    p.add_argument("--max-seeds", type=int, default=3)
    p.add_argument("--morse-limit", type=int, default=settings.morse_limit)

    p = sub.add_parser("lcm-lattice", parents=[common], help="elements of the lcm-lattice")
    p.add_argument("--bpol", action="store_true")
    p.add_argument("--join", nargs=2, action="append", metavar=("A", "B"), help="compare lcm joins of generators")
    return parser


def run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input=args.input or args.ideal,
        field=args.field,
        a=list(GammaSequence.parse(args.a).a) if args.a else None,
        closure=args.closure,
        max_gens=args.max_gens,
        format=args.format,
        seed=args.seed,
        n=args.n,
        d=args.d,
    )


def load_input(args: argparse.Namespace) -> MonomialIdeal:
    if args.ideal:
        return parse_ideal_text(args.ideal, args.n, args.d)
    if args.input is None:
        raise InvalidInputError("no ideal given: pass a file, '-' or --ideal")
    if args.input == "-":
        return parse_ideal_text(sys.stdin.read(), args.n, args.d)
    return load_ideal(args.input, args.n, args.d)


def load_borel(args: argparse.Namespace) -> BorelIdeal:
    ideal = load_input(args)
    if args.closure:
        return borel_closure(ideal.gens, ideal.ring, args.d)
    return BorelIdeal.of(ideal, args.d)


def load_any(args: argparse.Namespace) -> BorelIdeal | MonomialIdeal:
    """A Borel ideal when the input is one, else the plain ideal with a warning."""
    ideal = load_input(args)
    if args.closure:
        return borel_closure(ideal.gens, ideal.ring, args.d)
    if not ideal.ring.is_double and is_borel_fixed(ideal):
        return BorelIdeal.of(ideal, args.d)
    logger.warning("%s is not Borel fixed; Betti numbers need not be preserved", ideal)
    return ideal


def gamma_of(args: argparse.Namespace) -> GammaSequence:
    if not args.a:
        raise InvalidInputError("--a is required, e.g. --a=0,1,1,2")
    return GammaSequence.parse(args.a)


def emit(args: argparse.Namespace, text: str, result=None) -> None:
    if args.format == "json" and result is not None:
        print(dump_json(RunDocument(config=run_config(args), result=result)))
    else:
        print(text)


def _plain(ideal: BorelIdeal | MonomialIdeal) -> MonomialIdeal:
    return ideal.ideal if isinstance(ideal, BorelIdeal) else ideal


# --- verbs ---

def cmd_polarize(args) -> int:
    ideal = load_any(args)
    polarized = bpol_ideal(ideal, args.d)
    emit(args, format_ideal(polarized), ideal_to_document(polarized).model_dump())
    return EXIT_OK


def cmd_sq(args) -> int:
    ideal = load_any(args)
    image = sq_ideal(ideal, args.d)
    emit(args, format_ideal(image), ideal_to_document(image).model_dump())
    return EXIT_OK


def cmd_gamma(args) -> int:
    ideal = load_any(args)
    image = gamma_ideal(ideal, gamma_of(args), args.d)
    emit(args, format_ideal(image), ideal_to_document(image).model_dump())
    return EXIT_OK


def _specialize(P, target: str, a: GammaSequence | None):
    if target == "S":
        return specialize_complex(P, SpecializationMap.theta(P.ring))
    if target == "sq":
        return specialize_complex(P, SpecializationMap.theta_prime(P.ring))
    if target == "gamma":
        return specialize_complex(P, SpecializationMap.theta_a(P.ring, a))
    return P


def _target_ideal(ideal: BorelIdeal | MonomialIdeal, target: str, a: list[int] | None) -> MonomialIdeal:
    if target == "S":
        return _plain(ideal)
    if target == "sq":
        return sq_ideal(ideal)
    if target == "gamma":
        if not a:
            raise InvalidInputError("the complex document has no gamma sequence")
        return gamma_ideal(ideal, GammaSequence(tuple(a)))
    return bpol_ideal(ideal)


def cmd_resolve(args) -> int:
    ideal = load_borel(args)
    a = gamma_of(args) if args.target == "gamma" else None
    P = _specialize(build_P(ideal), args.target, a)
    if args.format == "json":
        config = run_config(args).model_dump()
        config["target"] = args.target
        print(dump_json(complex_to_document(P, config)))
        return EXIT_OK
    print(P.name)
    print(f"ranks {P.ranks()}")
    print(betti_of_complex(P).as_text())
    return EXIT_OK


def cmd_betti(args) -> int:
    field_spec = FieldSpec.parse(args.field)
    ideal = load_any(args) if args.closure else load_input(args)
    if args.bpol:
        ideal = bpol_ideal(ideal, args.d)
    base = _plain(ideal)
    table = betti_oracle(base, field_spec, args.method, args.max_gens)
    emit(args, table.as_text(), betti_response(base, table, args.method, field_spec).model_dump())
    return EXIT_OK


def _verify_stored_complex(args, field_spec: FieldSpec) -> int:
    doc = load_complex_document(args.complex)
    P = complex_from_document(doc)
    target = doc.config.get("target", "bpol" if P.ring.is_double else "S")
    ideal = load_any(args)
    report = certify_resolution(P, _target_ideal(ideal, target, doc.config.get("a")), field_spec)
    emit(args, report.summary(), certification_model(report).model_dump())
    return EXIT_OK if report.passed else EXIT_FAILED


def _verify_betti_only(args, field_spec: FieldSpec) -> int:
    ideal = load_any(args)
    comparison = compare_betti(ideal, field_spec)
    lines = ["I:", comparison.ideal.as_text(), "b-pol(I):", comparison.polarized.as_text()]
    for (i, j), (a, b) in comparison.differences().items():
        lines.append(f"beta[{i},{j}]: {a} for I, {b} for b-pol(I)")
    lines.append("Betti tables agree" if comparison.equal else "Betti tables DIFFER")
    result = {
        "equal": comparison.equal,
        "differences": [[i, j, a, b] for (i, j), (a, b) in comparison.differences().items()],
    }
    emit(args, "\n".join(lines), result)
    return EXIT_OK if comparison.equal else EXIT_FAILED


def cmd_verify(args) -> int:
    field_spec = FieldSpec.parse(args.field)
    if args.complex:
        return _verify_stored_complex(args, field_spec)
    if args.bpol:
        return _verify_betti_only(args, field_spec)

    ideal = load_borel(args)
    gammas = [gamma_of(args)] if args.a else None
    limit = -1 if args.no_morse else settings.morse_limit
    summary = verify_ideal(ideal, field_spec, gammas, limit)
    lines = [summary.resolution.summary()]
    lines += [report.summary() for report in summary.specializations]
    lines += [
        f"EK counts {summary.ek_counts}, ranks {summary.ranks[1:]}",
        f"Betti(I) = Betti(b-pol(I)): {summary.betti_equal_bpol}",
        f"Betti(I) = Betti(sq(I)): {summary.betti_equal_sq}",
        f"complex degrees match the oracle: {summary.betti_matches_complex}",
        f"colon ideals are the expected variables: {summary.colon_form}",
        f"linear quotients in the shelling order: {summary.linear_quotients}",
    ]
    if summary.morse is not None:
        lines.append(f"Morse suite: {'PASS' if summary.morse.passed else 'FAIL'} f-vector {summary.morse.f_vector}")
    lines.append(summary.summary_row())
    emit(args, "\n".join(lines), summary.to_model().model_dump())
    return EXIT_OK if summary.passed else EXIT_FAILED


def cmd_morse(args) -> int:
    ideal = load_borel(args)
    matching = morse.build_matching(ideal, args.max_gens)
    status = EXIT_OK

    if args.poset:
        graph = morse.face_poset(matching)
        if args.format == "dot":
            print(poset_to_dot(graph))
        else:
            print(f"{graph.number_of_nodes()} cells, {graph.number_of_edges()} covers")
            for upper, lower in sorted(graph.edges):
                print(f"{upper} > {lower}")
        return status

    if args.cell:
        mask = morse.parse_cell_id(args.cell)
        if mask >> len(matching.gens):
            raise InvalidInputError(f"{args.cell} names a generator index out of range")
        u, n = morse.u_and_n(matching, mask)
        N = [matching.tilde[k] for k in morse.bits(matching.n_set(mask))]
        print(f"cell {morse.cell_id(mask)}: lcm {matching.lcm_monomial(mask)}")
        print(f"N = {{{', '.join(str(m) for m in N)}}}")
        print(f"prec order: {' < '.join(str(m) for m in reversed(morse.prec_sigma(matching, mask)))}")
        print(f"u = {'-inf' if u is None else u}, n = {n}")
        partner = matching.up.get(mask) or matching.down.get(mask)
        print("critical" if partner is None else f"matched with {morse.cell_id(partner)}")

    if args.paths:
        sigma, tau = (morse.parse_cell_id(text) for text in args.paths)
        paths = morse.gradient_paths(matching, sigma, tau)
        for path in paths:
            print(f"{path.describe()}  sign {path.sign:+d}")
        print(f"{len(paths)} gradient path(s)")

    if args.verify:
        model = run_morse_suite(ideal, max_gens=args.max_gens)
        lines = [
            f"{'PASS' if model.passed else 'FAIL'}: {model.edges} matched edges, {model.critical} critical cells",
            f"f-vector {model.f_vector}, Morse complex equals the resolution: {model.compare_q_p}",
        ]
        for lower, upper in sorted(matching.up.items()):
            lines.append(f"  {morse.cell_id(upper)} -> {morse.cell_id(lower)}")
        for problem in (
            model.matching_violations + model.lcm_failures + model.path_failures
            + model.q_p_mismatches + model.incidence_violations + model.diamond_violations
        ):
            lines.append(f"  ! {problem}")
        emit(args, "\n".join(lines), model.model_dump())
        status = EXIT_OK if model.passed else EXIT_FAILED
    elif not (args.cell or args.paths):
        print(f"{len(matching.up)} matched edges, f-vector {morse.f_vector(matching)}")
        for cell in matching.critical:
            print(f"{morse.cell_id(cell.mask)}  {cell.pair}")
    return status


def cmd_diagram(args) -> int:
    ideal = load_borel(args)
    if args.grid:
        pair = pair_from_diagram(ideal, Path(args.grid).read_text())
    elif args.generator:
        rows = [int(r) for r in args.rows.split(",") if r.strip()]
        pair = AdmissiblePair.from_rows(ideal, rows, parse_monomial(args.generator, ideal.ring))
    else:
        raise InvalidInputError("diagram needs --generator (and --rows) or --grid")
    response = diagram_response(pair)
    lines = [response.pair, response.diagram]
    for block in response.rmv_blocks:
        lines.append("rmv block " + " ".join(f"({i},{j})" for i, j in block))
    emit(args, "\n".join(lines), response.model_dump())
    return EXIT_OK


def cmd_poset(args) -> int:
    ideal = load_borel(args)
    if args.cells:
        graph = morse.face_poset(morse.build_matching(ideal, args.max_gens))
    else:
        graph = poset_AI(ideal).graph
    if args.format == "dot":
        print(poset_to_dot(graph))
        return EXIT_OK
    response = PosetResponse(nodes=graph.number_of_nodes(), edges=graph.number_of_edges(), dot=poset_to_dot(graph))
    lines = [f"{response.nodes} elements, {response.edges} covers"]
    lines += [f"{upper} > {lower}" for upper, lower in sorted(graph.edges)]
    emit(args, "\n".join(lines), response.model_dump())
    return EXIT_OK


def cmd_corpus(args) -> int:
    field_spec = FieldSpec.parse(args.field)
    summaries = []
    for ideal in borel_corpus(args.seed, args.size, args.max_n, args.max_degree, args.max_seeds, args.max_gens):
        summary = verify_ideal(ideal, field_spec, morse_limit=args.morse_limit)
        summaries.append(summary)
        if args.format != "json":
            print(summary.summary_row())
    failed = sum(not s.passed for s in summaries)
    if args.format == "json":
        emit(args, "", [s.to_model().model_dump() for s in summaries])
    else:
        print(f"{len(summaries) - failed}/{len(summaries)} ideals passed")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_lcm_lattice(args) -> int:
    ideal = load_any(args) if args.closure else load_input(args)
    if args.bpol:
        ideal = bpol_ideal(ideal, args.d)
    base = _plain(ideal)
    lattice = lcm_lattice(base)
    lines = [f"{len(lattice)} elements"] + [str(m) for m in lattice.sorted()]
    status = EXIT_OK
    if args.join:
        pairs = [(parse_monomial(a, base.ring), parse_monomial(b, base.ring)) for a, b in args.join]
        report = joins_distinct(base, pairs)
        lines.append("joins: " + ", ".join(str(m) for m in report.joins))
        lines.append(f"distinct: {report.distinct}, coincide: {report.coincide}")
    response = LcmLatticeResponse(
        ideal=ideal_response(base), size=len(lattice), elements=[str(m) for m in lattice.sorted()]
    )
    emit(args, "\n".join(lines), response.model_dump())
    return status


COMMANDS = {
    "polarize": cmd_polarize,
    "sq": cmd_sq,
    "gamma": cmd_gamma,
    "resolve": cmd_resolve,
    "betti": cmd_betti,
    "verify": cmd_verify,
    "morse": cmd_morse,
    "diagram": cmd_diagram,
    "poset": cmd_poset,
    "corpus": cmd_corpus,
    "lcm-lattice": cmd_lcm_lattice,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except ConsistencyError as e:
        logger.error("consistency check failed: %s", e)
        return EXIT_FAILED
    except AlgebraError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
