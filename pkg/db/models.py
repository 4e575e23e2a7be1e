from datetime import datetime, timezone

from sqlalchemy import JSON, Boolean, Column, DateTime, ForeignKey, Integer, String, Text
from sqlalchemy.orm import relationship
from db.database import Base


def _now():
    return datetime.now(timezone.utc)


class IdealRecord(Base):
    __tablename__ = "ideals"

    id = Column(Integer, primary_key=True, index=True)
    name = Column(String, nullable=True)
    ring = Column(String, nullable=False)        # e.g. "k[x1..x4]"
    generators = Column(Text, nullable=False)    # canonical text, one monomial per line

    # One ideal can be certified many times (different fields, options)
    runs = relationship(
        "CertificationRun",
        back_populates="ideal",
        cascade="all, delete-orphan",
        order_by="CertificationRun.created_at",
    )


class CertificationRun(Base):
    __tablename__ = "certification_runs"

    id = Column(Integer, primary_key=True, index=True)
    ideal_id = Column(Integer, ForeignKey("ideals.id", ondelete="CASCADE"))
    command = Column(String, nullable=False)
    field = Column(String, nullable=False)
    passed = Column(Boolean, nullable=False)
    report = Column(JSON, nullable=False)
    created_at = Column(DateTime(timezone=True), default=_now, nullable=False)

    ideal = relationship("IdealRecord", back_populates="runs")
