"""Verdict records shared by the scalar test and the matrix criteria."""
from dataclasses import dataclass, field
import enum


class VerdictStatus(enum.Enum):
    OSCILLATORY = "OscillatoryTrendCertified"
    INCONCLUSIVE = "Inconclusive"
    NOT_APPLICABLE = "NotApplicable"


@dataclass
class Hypothesis:
    name: str
    passed: bool
    evidence: str = ""
    witness_t: float = None

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "evidence": self.evidence, "witness_t": self.witness_t}


@dataclass
class CriterionVerdict:
    """Outcome of one criterion.

    The status is derived, never set by hand: a failed hypothesis makes the
    criterion not applicable; otherwise it is oscillatory exactly when every
    trace is certified divergent.
    """

    criterion_id: str
    hypotheses: list = field(default_factory=list)
    traces: list = field(default_factory=list)
    auxiliary: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def require(self, name, passed, evidence="", witness_t=None):
        self.hypotheses.append(Hypothesis(name, bool(passed), evidence, witness_t))
        return bool(passed)

    @property
    def status(self):
        if any(not h.passed for h in self.hypotheses):
            return VerdictStatus.NOT_APPLICABLE
        if self.traces and all(tr.diverges for tr in self.traces):
            return VerdictStatus.OSCILLATORY
        return VerdictStatus.INCONCLUSIVE

    @property
    def oscillatory(self):
        return self.status is VerdictStatus.OSCILLATORY

    @property
    def failed_hypothesis(self):
        return next((h for h in self.hypotheses if not h.passed), None)

    def trace(self, name):
        return next(tr for tr in self.traces if tr.name == name)

    def to_json(self):
        return {
            "id": self.criterion_id,
            "status": self.status.value,
            "hypotheses": [h.to_json() for h in self.hypotheses],
            "traces": [tr.to_json() for tr in self.traces],
            "notes": list(self.notes),
        }

    def summary(self):
        bad = self.failed_hypothesis
        if bad is not None:
            where = f" at t={bad.witness_t:g}" if bad.witness_t is not None else ""
            return f"{self.status.value}: {bad.name}{where}"
        parts = [f"{tr.name}={tr.classification.value}" for tr in self.traces]
        return f"{self.status.value} ({', '.join(parts)})"
