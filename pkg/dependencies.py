import logging
import os
from contextlib import contextmanager
from typing import Optional

from fastapi import HTTPException, status, Security
from fastapi.security import HTTPAuthorizationCredentials, HTTPBearer
from dotenv import load_dotenv
from pydantic import BaseModel
from slowapi import Limiter
from slowapi.util import get_remote_address

from schemas.ideal_schema import IdealRequest
from services.borel import BorelIdeal, MonomialIdeal, borel_closure
from services.exceptions import AlgebraError, ConsistencyError, NotBorelError, SizeLimitError
from services.text_io import parse_ideal_text

load_dotenv()
logger = logging.getLogger(__name__)


class Settings(BaseModel):
    field: str = "gf32003"
    max_gens: int = 16          # Morse subset enumeration bound
    morse_limit: int = 12       # largest ideal that gets the Morse suite during verify
    verify_rate: str = "5/minute"
    log_level: str = "INFO"
    frontend_url: Optional[str] = None


def load_settings() -> Settings:
    return Settings(
        field=os.getenv("BPOL_FIELD", "gf32003"),
        max_gens=int(os.getenv("BPOL_MAX_GENS", "16")),
        morse_limit=int(os.getenv("BPOL_MORSE_LIMIT", "12")),
        verify_rate=os.getenv("BPOL_VERIFY_RATE", "5/minute"),
        log_level=os.getenv("BPOL_LOG_LEVEL", "INFO"),
        frontend_url=os.getenv("FRONTEND_URL"),
    )


settings = load_settings()


def get_settings() -> Settings:
    return settings


def setup_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


limiter = Limiter(key_func=get_remote_address)
security = HTTPBearer()

def validate_admin(auth: HTTPAuthorizationCredentials = Security(security)):
    secret = os.getenv("ADMIN_SECRET_TOKEN")
    if not secret or auth.credentials != secret:
        raise HTTPException(
            status_code=status.HTTP_401_UNAUTHORIZED,
            detail="You are not authorized to perform this action",
        )
    return True


@contextmanager
def algebra_errors():
    """Turn library errors into HTTP errors inside a route body."""
    try:
        yield
    except SizeLimitError as e:
        raise HTTPException(status.HTTP_413_REQUEST_ENTITY_TOO_LARGE, str(e))
    except NotBorelError as e:
        raise HTTPException(status.HTTP_422_UNPROCESSABLE_ENTITY, str(e))
    except ConsistencyError as e:
        logger.error("Consistency failure: %s", e)
        raise HTTPException(status.HTTP_500_INTERNAL_SERVER_ERROR, str(e))
    except AlgebraError as e:
        raise HTTPException(status.HTTP_400_BAD_REQUEST, str(e))


def ideal_from_request(payload: IdealRequest) -> MonomialIdeal:
    return parse_ideal_text("\n".join(payload.generators), payload.n, payload.d)


def borel_from_request(payload: IdealRequest) -> BorelIdeal:
    ideal = ideal_from_request(payload)
    if payload.closure:
        return borel_closure(ideal.gens, ideal.ring, payload.d)
    return BorelIdeal.of(ideal, payload.d)
