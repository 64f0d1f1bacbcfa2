from enum import Enum
from typing import Any

import pandas as pd
from pydantic import Field

from models.basemodel import BaseModel, ExactRational


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"

    @classmethod
    def comma_separated(cls):
        return ", ".join(x.value for x in cls)

    @property
    def exit_code(self) -> int:
        return 1 if self is Verdict.FAIL else 0


class ConditionStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    # asymptotic condition, horizon exhausted without violation
    INCONCLUSIVE = "inconclusive"


class CriterionId(str, Enum):
    SHIFT_UPPER = "shift-upper"
    SHIFT_UPPER_PER_J = "shift-upper-per-j"
    SHIFT_GENERAL = "shift-general"
    SERIES_TAIL = "series-tail"
    AHC = "ahc"
    AHC_SPLIT = "ahc-split"
    AHC2 = "ahc2"
    BIRKHOFF_B = "birkhoff-b"
    ORBIT = "orbit"
    SCHEDULE = "schedule"

    @classmethod
    def comma_separated(cls):
        return ", ".join(x.value for x in cls)


class Witness(BaseModel):
    condition: str
    indices: list[int] = []
    value: ExactRational | None = None
    note: str = ""


class ConditionResult(BaseModel):
    name: str
    status: ConditionStatus
    checked: str = Field("", description="Human readable checked range, e.g. '12 pairs in [0, 10000]'")
    checks: int = 0
    witness: Witness | None = None
    details: dict[str, Any] = {}


class CriterionReport(BaseModel):
    criterion_id: CriterionId
    parameters: dict[str, Any] = {}
    verdict: Verdict
    conditions: list[ConditionResult] = []
    witnesses: list[Witness] = []
    horizon: int

    @classmethod
    def from_conditions(
        cls,
        criterion_id: CriterionId,
        conditions: list[ConditionResult],
        horizon: int,
        parameters: dict[str, Any] | None = None,
    ) -> "CriterionReport":
        """
        Combine per-condition results: any failure fails the report, a passing finite
        condition passes it, and a report made only of asymptotic conditions is inconclusive.
        Failing witnesses come first, then witnesses of passing searches.
        """
        statuses = [c.status for c in conditions]
        if ConditionStatus.FAIL in statuses:
            verdict = Verdict.FAIL
        elif ConditionStatus.PASS in statuses:
            verdict = Verdict.PASS
        else:
            verdict = Verdict.INCONCLUSIVE
        return cls(
            criterion_id=criterion_id,
            parameters=parameters or {},
            verdict=verdict,
            conditions=conditions,
            witnesses=[c.witness for c in conditions if c.witness is not None and c.status == ConditionStatus.FAIL]
            + [c.witness for c in conditions if c.witness is not None and c.status == ConditionStatus.PASS],
            horizon=horizon,
        )

    @property
    def passed(self) -> bool:
        return self.verdict != Verdict.FAIL

    def condition(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_rows(self) -> list[dict[str, Any]]:
        return [
            {
                "condition": c.name,
                "status": c.status.value,
                "checked": c.checked,
                "witness": "" if c.witness is None else f"{c.witness.indices} {c.witness.note}".strip(),
            }
            for c in self.conditions
        ]


class BoundCheck(BaseModel):
    """One exact inequality `lhs <relation> rhs` certified for a construction instance."""

    name: str
    lhs: ExactRational
    rhs: ExactRational
    relation: str = "<="
    holds: bool
    # informational checks are reported but never fail a verification
    required: bool = True
    parameters: dict[str, Any] = {}
    note: str = ""

    @classmethod
    def compare(
        cls, name: str, lhs, rhs, relation: str = "<=", note: str = "", required: bool = True, **parameters
    ) -> "BoundCheck":
        ops = {
            "<=": lambda a, b: a <= b,
            "<": lambda a, b: a < b,
            ">=": lambda a, b: a >= b,
            ">": lambda a, b: a > b,
            "==": lambda a, b: a == b,
        }
        if relation not in ops:
            raise ValueError(f"Unknown relation {relation!r}")
        return cls(
            name=name,
            lhs=lhs,
            rhs=rhs,
            relation=relation,
            holds=ops[relation](lhs, rhs),
            required=required,
            parameters=parameters,
            note=note,
        )


class VerificationReport(BaseModel):
    construction: str
    parameters: dict[str, Any] = {}
    horizon: int
    checks: list[BoundCheck] = []
    reports: list[CriterionReport] = []

    @property
    def verdict(self) -> Verdict:
        if self.failed() or any(r.verdict == Verdict.FAIL for r in self.reports):
            return Verdict.FAIL
        return Verdict.PASS

    def failed(self) -> list[BoundCheck]:
        return [c for c in self.checks if c.required and not c.holds]

    def informational(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.required]

    def check(self, name: str) -> list[BoundCheck]:
        return [c for c in self.checks if c.name == name]

    def to_df(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "name": c.name,
                    "lhs": float(c.lhs),
                    "relation": c.relation,
                    "rhs": float(c.rhs),
                    "holds": c.holds,
                    "required": c.required,
                    "parameters": ",".join(f"{k}={v}" for k, v in c.parameters.items()),
                }
                for c in self.checks
            ]
        )
