from fastapi import APIRouter, Depends, Query

from dependencies import Settings, algebra_errors, borel_from_request, get_settings, ideal_from_request
from schemas.complex_schema import ResolveResponse
from schemas.ideal_schema import (
    BettiRequest,
    BettiResponse,
    GammaRequest,
    IdealRequest,
    IdealResponse,
    LcmLatticeResponse,
    ResolveRequest,
)
from services.borel import is_borel_fixed
from services.exceptions import InvalidInputError
from services.homology import FieldSpec, betti_of_complex, betti_oracle, lcm_lattice
from services.polarize import GammaSequence, SpecializationMap, bpol_ideal, gamma_ideal, sq_ideal
from services.resolution import build_P, specialize_complex
from services.text_io import betti_response, complex_to_document, ideal_response

router = APIRouter(prefix="/ideals", tags=["ideals"])


@router.post("/polarize", response_model=IdealResponse)
def polarize(payload: IdealRequest):
    with algebra_errors():
        ideal = borel_from_request(payload) if payload.closure else ideal_from_request(payload)
        polarized = bpol_ideal(ideal, payload.d)
        # Non-Borel input is still polarized; the flag tells the client its
        # Betti numbers need not survive.
        base = getattr(ideal, "ideal", ideal)
        return ideal_response(polarized, borel_fixed=is_borel_fixed(base))


@router.post("/sq", response_model=IdealResponse)
def squarefree_operator(payload: IdealRequest):
    with algebra_errors():
        ideal = borel_from_request(payload)
        return ideal_response(sq_ideal(ideal))


@router.post("/gamma", response_model=IdealResponse)
def gamma(payload: GammaRequest):
    with algebra_errors():
        ideal = borel_from_request(payload)
        return ideal_response(gamma_ideal(ideal, GammaSequence(tuple(payload.a))))


@router.post("/resolve", response_model=ResolveResponse)
def resolve(
    payload: ResolveRequest,
    target: str = Query("bpol", pattern="^(bpol|S|sq|gamma)$"),
):
    with algebra_errors():
        ideal = borel_from_request(payload)
        P = build_P(ideal)
        if target == "S":
            P = specialize_complex(P, SpecializationMap.theta(P.ring))
        elif target == "sq":
            P = specialize_complex(P, SpecializationMap.theta_prime(P.ring))
        elif target == "gamma":
            if not payload.a:
                raise InvalidInputError("target=gamma needs the sequence a")
            P = specialize_complex(P, SpecializationMap.theta_a(P.ring, GammaSequence(tuple(payload.a))))
        config = {"target": target, "closure": payload.closure, "d": ideal.maxdeg, "a": payload.a}
        return ResolveResponse(
            complex=complex_to_document(P, config),
            betti=betti_of_complex(P).as_text(),
        )


@router.post("/betti", response_model=BettiResponse)
def betti(payload: BettiRequest, settings: Settings = Depends(get_settings)):
    with algebra_errors():
        field_spec = FieldSpec.parse(payload.field or settings.field)
        ideal = borel_from_request(payload) if payload.closure else ideal_from_request(payload)
        if payload.polarize:
            ideal = bpol_ideal(ideal, payload.d)
        base = getattr(ideal, "ideal", ideal)
        table = betti_oracle(base, field_spec, payload.method, settings.max_gens)
        return betti_response(base, table, payload.method, field_spec)


@router.post("/lcm-lattice", response_model=LcmLatticeResponse)
def lcm_lattice_of(payload: IdealRequest, polarize: bool = False):
    with algebra_errors():
        ideal = borel_from_request(payload) if payload.closure else ideal_from_request(payload)
        if polarize:
            ideal = bpol_ideal(ideal, payload.d)
        base = getattr(ideal, "ideal", ideal)
        lattice = lcm_lattice(base)
        return LcmLatticeResponse(
            ideal=ideal_response(base),
            size=len(lattice),
            elements=[str(m) for m in lattice.sorted()],
        )

