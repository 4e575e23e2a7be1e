import asyncio
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from slowapi import _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded
from sqlalchemy.exc import OperationalError

# Internal imports
from db import models  # noqa: F401  (registers the tables on Base)
from db.database import Base, engine
from dependencies import limiter, settings, setup_logging
from routes import ideal_route, verify_route

setup_logging()
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info("--- Server Starting Up ---")

    max_retries = 3
    retry_delay = 5  # seconds

    for attempt in range(1, max_retries + 1):
        try:
            logger.info("Database connection attempt %d/%d...", attempt, max_retries)
            Base.metadata.create_all(bind=engine)
            break
        except OperationalError as e:
            logger.warning("Connection failed: %s", e)
            if attempt < max_retries:
                logger.info("Retrying in %d seconds...", retry_delay)
                await asyncio.sleep(retry_delay)
            else:
                logger.error("--- Critical Error: Max retries reached. ---")
                raise

    yield
    logger.info("--- Server Shutting Down ---")


app = FastAPI(lifespan=lifespan, title="Borel polarization certifier")
app.state.limiter = limiter
app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)


# CORS Configuration
origins = [
    "http://localhost:5173",
    "http://127.0.0.1:5173",
]

if settings.frontend_url:
    origins.append(settings.frontend_url.rstrip("/"))

app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=True,
    allow_methods=["*"],
    # "Authorization" carries the admin token for deletions
    allow_headers=["Content-Type", "Authorization"],
)


@app.get("/")
def health_check():
    return {"status": "online", "field": settings.field, "max_gens": settings.max_gens}


app.include_router(ideal_route.router)
app.include_router(verify_route.router)
