from typing import Any, List, Optional
from pydantic import BaseModel, Field

# --- Shared ---
class RingModel(BaseModel):
    kind: str = Field("single", pattern="^(single|double)$")
    n: int = Field(..., ge=1)
    d: Optional[int] = Field(None, ge=1)

class IdealDocument(BaseModel):
    # Structured ideal format: ring descriptor + generators in text syntax
    ring: RingModel
    generators: List[str]
    name: Optional[str] = None

# --- Input Schemas ---
class IdealRequest(BaseModel):
    generators: List[str] = Field(..., min_length=1, description="Monomials such as x1^2*x3")
    n: Optional[int] = Field(None, ge=1, description="Number of variables, inferred if missing")
    d: Optional[int] = Field(None, ge=1, description="Column count of the polarized ring")
    closure: bool = Field(False, description="Replace the input by its Borel closure")
    field: str = "gf32003"

class GammaRequest(IdealRequest):
    a: List[int] = Field(..., min_length=1, description="Non-decreasing, starting with 0")

class ResolveRequest(IdealRequest):
    a: Optional[List[int]] = Field(None, description="Gamma sequence for target=gamma")

class BettiRequest(IdealRequest):
    method: str = Field("koszul", pattern="^(koszul|taylor)$")
    polarize: bool = False

class PairRequest(IdealRequest):
    # Admissible pair given by its generator and the rows i_1 < ... < i_q
    generator: str
    rows: List[int] = []

class VerifyRequest(IdealRequest):
    name: Optional[str] = None
    morse: bool = True
    gammas: Optional[List[List[int]]] = None

# --- Output Schemas (Response) ---
class IdealResponse(BaseModel):
    ring: RingModel
    generators: List[str]
    borel_fixed: Optional[bool] = None

class BettiEntry(BaseModel):
    i: int
    degree: str
    value: int

class GradedEntry(BaseModel):
    i: int
    j: int
    value: int

class BettiResponse(BaseModel):
    ideal: IdealResponse
    method: str
    field: str
    totals: List[int]
    graded: List[GradedEntry]
    multigraded: List[BettiEntry]

class LcmLatticeResponse(BaseModel):
    ideal: IdealResponse
    size: int
    elements: List[str]

# --- Run configuration (echoed into every structured CLI document) ---
class RunConfig(BaseModel):
    command: str
    input: Optional[str] = None
    field: str = "gf32003"
    a: Optional[List[int]] = None
    closure: bool = False
    max_gens: int = 16
    format: str = Field("text", pattern="^(text|json|dot)$")
    seed: Optional[int] = None
    n: Optional[int] = None
    d: Optional[int] = None

class RunDocument(BaseModel):
    # One self-describing document per CLI run
    config: RunConfig
    result: Any
