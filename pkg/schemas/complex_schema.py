from datetime import datetime
from typing import Any, Dict, List, Optional
from pydantic import BaseModel, ConfigDict

from schemas.ideal_schema import IdealResponse, RingModel

# ====== Complex documents ======
class CellModel(BaseModel):
    id: str
    degree: str
    pair: Optional[str] = None

class EntryModel(BaseModel):
    col: str  # source basis element (level q)
    row: str  # target basis element (level q - 1)
    sign: int
    monomial: str

class LevelModel(BaseModel):
    level: int
    cells: List[CellModel]
    entries: List[EntryModel] = []

class ComplexDocument(BaseModel):
    name: str
    ring: RingModel
    ranks: List[int]
    levels: List[LevelModel]
    config: Dict[str, Any] = {}

# ====== Reports ======
class CertificationModel(BaseModel):
    name: str
    field: str
    passed: bool
    ranks: List[int]
    checked_degrees: int
    composite_witnesses: List[List[Any]] = []
    unit_entries: List[List[Any]] = []
    degree_problems: List[str] = []
    strand_failures: List[List[Any]] = []

class MorseModel(BaseModel):
    passed: bool
    edges: int
    critical: int
    f_vector: List[int]
    compare_q_p: bool
    matching_violations: List[str] = []
    cycle: List[List[str]] = []
    lcm_failures: List[str] = []
    path_failures: List[str] = []
    q_p_mismatches: List[str] = []
    incidence_violations: List[str] = []
    diamond_violations: List[str] = []

class VerificationModel(BaseModel):
    ideal: IdealResponse
    field: str
    passed: bool
    ranks: List[int]
    ek_counts: List[int]
    resolution: CertificationModel
    specializations: List[CertificationModel]
    betti_equal_bpol: bool
    betti_equal_sq: bool
    betti_matches_complex: bool
    colon_form: bool
    linear_quotients: bool
    morse: Optional[MorseModel] = None
    betti_differences: List[List[int]] = []

class ResolveResponse(BaseModel):
    complex: ComplexDocument
    betti: str

class DiagramResponse(BaseModel):
    pair: str
    diagram: str
    rmv_blocks: List[List[List[int]]]

class PosetResponse(BaseModel):
    nodes: int
    edges: int
    dot: str

# ====== Stored runs ======
class RunSummary(BaseModel):
    id: int
    command: str
    field: str
    passed: bool
    created_at: datetime

    model_config = ConfigDict(from_attributes=True)

class RunDetail(RunSummary):
    report: Dict[str, Any]
    ideal_id: int

    model_config = ConfigDict(from_attributes=True)
