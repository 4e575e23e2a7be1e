"""Reading and writing ideals and complexes.

Ideal text format: one monomial per line, ``#`` starts a comment. Inline
input may also separate monomials by commas. The structured formats are the
pydantic documents in ``schemas``.
"""
import json
import logging
from pathlib import Path
from typing import Any, Iterable

import networkx as nx
from pydantic import ValidationError

from schemas.complex_schema import CellModel, ComplexDocument, DiagramResponse, EntryModel, LevelModel
from schemas.ideal_schema import BettiEntry, BettiResponse, GradedEntry, IdealDocument, IdealResponse, RingModel, RunDocument
from services.borel import MonomialIdeal
from services.complexes import Cell, Column, FreeComplex
from services.exceptions import InvalidInputError, ParseError
from services.homology import BettiTable
from services.linalg import FieldSpec
from services.monomials import DOUBLE, Monomial, RingSpec, Var, parse_factors, parse_monomial
from services.resolution import AdmissiblePair, rmv_blocks, stair_diagram

logger = logging.getLogger(__name__)


def _segments(text: str) -> Iterable[tuple[int, int, str]]:
    """(line, column, piece) for every monomial piece in the text."""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        offset = 0
        for piece in line.split(","):
            if piece.strip():
                yield line_no, offset + 1, piece
            offset += len(piece) + 1


def infer_ring(kind: str, factors: list[dict[Var, int]], n: int | None = None, d: int | None = None) -> RingSpec:
    needed_n, needed_d = 1, 1
    for exps in factors:
        for var in exps:
            if kind == DOUBLE:
                needed_n, needed_d = max(needed_n, var[0]), max(needed_d, var[1])
            else:
                needed_n = max(needed_n, var)
    if n is not None and n < needed_n:
        raise InvalidInputError(f"n={n} is smaller than the largest variable index {needed_n}")
    if kind == DOUBLE:
        if d is not None and d < needed_d:
            raise InvalidInputError(f"d={d} is smaller than the largest column index {needed_d}")
        return RingSpec.double(n or needed_n, d or needed_d)
    return RingSpec.single(n or needed_n)


def parse_ideal_text(text: str, n: int | None = None, d: int | None = None) -> MonomialIdeal:
    parsed = []
    kind = None
    for line, column, piece in _segments(text):
        try:
            piece_kind, exps = parse_factors(piece, line)
        except ParseError as e:
            raise ParseError(e.message, line, column + e.column - 1) from e
        if piece_kind is None:
            raise ParseError("the unit monomial generates the whole ring", line, column)
        if kind is not None and piece_kind != kind:
            raise ParseError("generators mix single and double indices", line, column)
        kind = piece_kind
        parsed.append(exps)
    if not parsed:
        raise ParseError("no generators found", 1, 1)
    ring = infer_ring(kind, parsed, n, d)
    return MonomialIdeal.from_generators([Monomial.from_dict(exps, ring) for exps in parsed], ring)


def format_ideal(ideal: MonomialIdeal) -> str:
    return "\n".join(str(g) for g in ideal.gens)


def ring_model(ring: RingSpec) -> RingModel:
    return RingModel(kind=ring.kind, n=ring.n, d=ring.d if ring.is_double else None)


def ring_from_model(model: RingModel) -> RingSpec:
    if model.kind == DOUBLE:
        return RingSpec.double(model.n, model.d or 1)
    return RingSpec.single(model.n)


def ideal_response(ideal: MonomialIdeal, borel_fixed: bool | None = None) -> IdealResponse:
    return IdealResponse(ring=ring_model(ideal.ring), generators=[str(g) for g in ideal.gens], borel_fixed=borel_fixed)


def ideal_to_document(ideal: MonomialIdeal, name: str | None = None) -> IdealDocument:
    return IdealDocument(ring=ring_model(ideal.ring), generators=[str(g) for g in ideal.gens], name=name)


def ideal_from_document(doc: IdealDocument) -> MonomialIdeal:
    ring = ring_from_model(doc.ring)
    gens = [parse_monomial(text, ring, line=k) for k, text in enumerate(doc.generators, start=1)]
    return MonomialIdeal.from_generators(gens, ring)


def read_ideal_document(text: str) -> IdealDocument:
    """An ideal document, bare or as the result of a CLI run document."""
    try:
        payload = json.loads(text)
        if isinstance(payload, dict) and "config" in payload and "result" in payload:
            payload = RunDocument.model_validate(payload).result
        return IdealDocument.model_validate(payload)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from e
    except ValidationError as e:
        raise ParseError(f"invalid ideal document: {e.errors()[0]['msg']}", 1, 1) from e


def load_ideal(source: str | Path, n: int | None = None, d: int | None = None) -> MonomialIdeal:
    """Read an ideal from a text or JSON file (JSON is recognised by its leading brace)."""
    text = Path(source).read_text()
    if text.lstrip().startswith("{"):
        doc = read_ideal_document(text)
        ideal = ideal_from_document(doc)
        if n or d:
            ideal = parse_ideal_text(format_ideal(ideal), n, d)
        return ideal
    return parse_ideal_text(text, n, d)


def _describe_payload(payload: Any) -> str | None:
    if payload is None:
        return None
    # Morse cells carry their admissible pair
    return str(getattr(payload, "pair", payload))


def complex_to_document(complex_: FreeComplex, config: dict[str, Any] | None = None) -> ComplexDocument:
    levels = []
    for q, level in enumerate(complex_.levels):
        cells = [
            CellModel(
                id=cell.label,
                degree=str(cell.degree),
                pair=_describe_payload(cell.payload),
            )
            for cell in level
        ]
        entries = []
        if q > 0:
            for col, row, coef, mono in complex_.entries(q):
                entries.append(
                    EntryModel(
                        col=level[col].label,
                        row=complex_.levels[q - 1][row].label,
                        sign=coef,
                        monomial=str(mono),
                    )
                )
        levels.append(LevelModel(level=q, cells=cells, entries=entries))
    return ComplexDocument(
        name=complex_.name,
        ring=ring_model(complex_.ring),
        ranks=complex_.ranks(),
        levels=levels,
        config=config or {},
    )


def complex_from_document(doc: ComplexDocument) -> FreeComplex:
    ring = ring_from_model(doc.ring)
    complex_ = FreeComplex(ring, [], [], doc.name)
    previous: dict[str, int] = {}
    for level in sorted(doc.levels, key=lambda lv: lv.level):
        cells = [Cell(c.id, parse_monomial(c.degree, ring), c.pair) for c in level.cells]
        index = {cell.label: k for k, cell in enumerate(cells)}
        columns: dict[int, Column] = {}
        for entry in level.entries:
            if entry.col not in index or entry.row not in previous:
                raise ParseError(f"entry {entry.col} -> {entry.row} names an unknown cell", level.level + 1, 1)
            columns.setdefault(index[entry.col], {})[previous[entry.row]] = (
                entry.sign,
                parse_monomial(entry.monomial, ring),
            )
        complex_.add_level(cells, columns)
        previous = index
    return complex_


def dump_json(model) -> str:
    return model.model_dump_json(indent=2)


def load_complex_document(source: str | Path) -> ComplexDocument:
    try:
        return ComplexDocument.model_validate(json.loads(Path(source).read_text()))
    except (ValidationError, json.JSONDecodeError) as e:
        raise ParseError(f"invalid complex document {source}: {e}", 1, 1) from e


def poset_to_dot(graph) -> str:
    """DOT text of a poset graph; nodes are renamed n0, n1, ... and keep their id as label."""
    mapping = {node: f"n{k}" for k, node in enumerate(sorted(graph.nodes, key=str))}
    renamed = nx.relabel_nodes(graph, mapping)
    for node, new in mapping.items():
        attrs = renamed.nodes[new]
        attrs["label"] = f'"{node}"'
        for key in list(attrs):
            if key != "label":
                attrs[key] = f'"{attrs[key]}"'
    return nx.nx_pydot.to_pydot(renamed).to_string()


def betti_response(ideal: MonomialIdeal, table: BettiTable, method: str, field_spec: FieldSpec) -> BettiResponse:
    multigraded = sorted(table.multigraded().items(), key=lambda kv: (kv[0][0], kv[0][1].degree, str(kv[0][1])))
    return BettiResponse(
        ideal=ideal_response(ideal),
        method=method,
        field=field_spec.describe(),
        totals=table.totals(),
        graded=[GradedEntry(i=i, j=j, value=v) for (i, j), v in sorted(table.graded().items())],
        multigraded=[BettiEntry(i=i, degree=str(b), value=v) for (i, b), v in multigraded],
    )


def diagram_response(pair: AdmissiblePair) -> DiagramResponse:
    blocks = rmv_blocks(pair) if pair.q else []
    return DiagramResponse(
        pair=str(pair),
        diagram=stair_diagram(pair),
        rmv_blocks=[sorted(list(pos) for pos in block) for block in blocks],
    )
