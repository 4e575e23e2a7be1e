import logging
from typing import List

from fastapi import APIRouter, Depends, HTTPException, Request, status
from sqlalchemy.orm import Session

from db.database import get_db
from db.models import CertificationRun, IdealRecord
from dependencies import (
    Settings,
    algebra_errors,
    borel_from_request,
    get_settings,
    limiter,
    settings as app_settings,
    validate_admin,
)
from schemas.complex_schema import DiagramResponse, MorseModel, PosetResponse, RunDetail, RunSummary, VerificationModel
from schemas.ideal_schema import IdealRequest, PairRequest, VerifyRequest
from services import morse
from services.homology import FieldSpec
from services.monomials import parse_monomial
from services.pipeline import run_morse_suite, verify_ideal
from services.polarize import GammaSequence
from services.resolution import AdmissiblePair, poset_AI
from services.text_io import diagram_response, format_ideal, poset_to_dot

logger = logging.getLogger(__name__)

router = APIRouter(tags=["verification"])


@router.post("/verify", response_model=VerificationModel)
@limiter.limit(app_settings.verify_rate)
def verify(
    payload: VerifyRequest,
    request: Request,
    db: Session = Depends(get_db),
    settings: Settings = Depends(get_settings),
):
    with algebra_errors():
        ideal = borel_from_request(payload)
        field_spec = FieldSpec.parse(payload.field)
        gammas = [GammaSequence(tuple(a)) for a in payload.gammas] if payload.gammas else None
        limit = settings.morse_limit if payload.morse else -1
        report = verify_ideal(ideal, field_spec, gammas, limit).to_model()

    # Store the ideal once and append the run to its history
    generators = format_ideal(ideal.ideal)
    record = (
        db.query(IdealRecord)
        .filter(IdealRecord.ring == ideal.ring.describe(), IdealRecord.generators == generators)
        .first()
    )
    if not record:
        record = IdealRecord(name=payload.name, ring=ideal.ring.describe(), generators=generators)
        db.add(record)
        db.flush()

    run = CertificationRun(
        ideal_id=record.id,
        command="verify",
        field=report.field,
        passed=report.passed,
        report=report.model_dump(),
    )
    db.add(run)
    db.commit()
    logger.info("Stored run %s for ideal %s (passed=%s)", run.id, record.id, report.passed)
    return report


@router.post("/morse", response_model=MorseModel)
def morse_suite(payload: IdealRequest, settings: Settings = Depends(get_settings)):
    with algebra_errors():
        ideal = borel_from_request(payload)
        return run_morse_suite(ideal, max_gens=settings.max_gens)


@router.post("/diagram", response_model=DiagramResponse)
def diagram(payload: PairRequest):
    with algebra_errors():
        ideal = borel_from_request(payload)
        m = parse_monomial(payload.generator, ideal.ring)
        pair = AdmissiblePair.from_rows(ideal, payload.rows, m)
        return diagram_response(pair)


@router.post("/poset", response_model=PosetResponse)
def poset(payload: IdealRequest, cells: bool = False, settings: Settings = Depends(get_settings)):
    """Cover graph of the admissible pairs, or of the cells of the Morse complex with ``cells=true``."""
    with algebra_errors():
        ideal = borel_from_request(payload)
        if cells:
            graph = morse.face_poset(morse.build_matching(ideal, settings.max_gens))
        else:
            graph = poset_AI(ideal).graph
        return PosetResponse(
            nodes=graph.number_of_nodes(),
            edges=graph.number_of_edges(),
            dot=poset_to_dot(graph),
        )


@router.get("/runs", response_model=List[RunSummary])
def list_runs(db: Session = Depends(get_db)):
    return db.query(CertificationRun).order_by(CertificationRun.id.desc()).all()


@router.get("/runs/{run_id}", response_model=RunDetail)
def get_run(run_id: int, db: Session = Depends(get_db)):
    run = db.query(CertificationRun).filter(CertificationRun.id == run_id).first()
    if not run:
        raise HTTPException(status_code=404, detail="Run not found")
    return run


@router.delete("/runs/{run_id}", dependencies=[Depends(validate_admin)])
def delete_run(run_id: int, db: Session = Depends(get_db)):
    run = db.query(CertificationRun).filter(CertificationRun.id == run_id).first()
    if not run:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail="Run not found")
    db.delete(run)
    db.commit()
    return {"message": f"Run {run_id} deleted"}
