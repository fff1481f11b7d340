"""The five-step cycle a risk case moves through, plus iteration bookkeeping.

Steps run strictly in order within an iteration (Profile, Assessment,
Evaluation, Treatment, Monitoring). Every recorded step carries mandatory
documentation. A case carried over from the previous iteration resumes at the
step after its last completed one; everything else restarts the cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime
from enum import Enum
from typing import Union

from .domain import (
    OrderedLevel,
    RiskAssessment,
    RiskEvaluation,
    RiskProfile,
    UnknownLevel,
    Violation,
    _normalize,
)
from .errors import RiskError


class DocumentationRequired(RiskError):
    code = "DocumentationRequired"

    def __init__(self, step: str):
        super().__init__(f"{step} needs non-empty documentation", step=step)


class StepOrderViolation(RiskError):
    code = "StepOrderViolation"

    def __init__(self, expected: "Step", got: "Step"):
        super().__init__(
            f"expected {expected.code} next, got {got.code}",
            expected=expected.code,
            got=got.code,
        )
        self.expected = expected
        self.got = got


class NoOpenIteration(RiskError):
    code = "NoOpenIteration"

    def __init__(self) -> None:
        super().__init__("no iteration is open; open one first")


class IterationAlreadyOpen(RiskError):
    code = "IterationAlreadyOpen"

    def __init__(self, index: int):
        super().__init__(f"iteration {index} is still open", index=index)


class IncompleteCases(RiskError):
    code = "IncompleteCases"

    def __init__(self, case_ids: tuple[int, ...]):
        super().__init__(
            "cases did not reach Monitoring and carry no override justification: "
            + ", ".join(str(c) for c in case_ids),
            case_ids=list(case_ids),
        )
        self.case_ids = case_ids


class UnknownCase(RiskError):
    code = "UnknownCase"

    def __init__(self, case_id: int):
        super().__init__(f"no case with id {case_id}", case_id=case_id)


class UnknownIteration(RiskError):
    code = "UnknownIteration"

    def __init__(self, index: int):
        super().__init__(f"no iteration with index {index}", index=index)


class Step(OrderedLevel):
    """The five framework steps, totally ordered."""

    PROFILE = "Profile"
    ASSESSMENT = "Assessment"
    EVALUATION = "Evaluation"
    TREATMENT = "Treatment"
    MONITORING = "Monitoring"


STEP_SEQUENCE: tuple[Step, ...] = tuple(Step)

# Cadence guideline: one cycle every 2-4 weeks.
CADENCE_RANGE_DAYS = (14, 28)


def parse_step(text: str) -> Step:
    for step in Step:
        if _normalize(text) == step.value.lower():
            return step
    raise UnknownLevel(text, "step")


class Effectiveness(Enum):
    """Monitoring verdict on the implemented treatment."""

    EFFECTIVE = "Effective"
    INEFFECTIVE = "Ineffective"
    INCONCLUSIVE = "Inconclusive"

    @property
    def code(self) -> str:
        return self.value


def parse_effectiveness(text: str) -> Effectiveness:
    for member in Effectiveness:
        if _normalize(text) == member.value.lower():
            return member
    raise UnknownLevel(text, "effectiveness verdict")


@dataclass(frozen=True)
class ActionItem:
    text: str
    owner: str
    due: date


@dataclass(frozen=True)
class TreatmentPlan:
    """Mitigation actions plus the controls put in place and how they were validated."""

    actions: tuple[ActionItem, ...]
    controls: tuple[str, ...]
    validation_note: str


@dataclass(frozen=True)
class MonitoringRecord:
    observation: str
    effective: Effectiveness
    reviewed_by: str


StepPayload = Union[RiskProfile, RiskAssessment, RiskEvaluation, TreatmentPlan, MonitoringRecord]

PAYLOAD_TYPES: dict[Step, type] = {
    Step.PROFILE: RiskProfile,
    Step.ASSESSMENT: RiskAssessment,
    Step.EVALUATION: RiskEvaluation,
    Step.TREATMENT: TreatmentPlan,
    Step.MONITORING: MonitoringRecord,
}


@dataclass(frozen=True)
class StepRecord:
    """One documented action on a case. History keeps every record; re-recording
    a step within an iteration supersedes its payload but deletes nothing."""

    step: Step
    iteration: int
    documentation: str
    actor: str
    timestamp: datetime
    payload: StepPayload


@dataclass(frozen=True)
class Carryover:
    """A case that did not finish the cycle, with the override justification
    that let the iteration close anyway."""

    case_id: int
    resume_after: Step | None
    justification: str


@dataclass(frozen=True)
class Iteration:
    index: int
    cadence_days: int
    opened_at: datetime
    closed_at: datetime | None = None
    carryover: tuple[Carryover, ...] = ()

    @property
    def is_open(self) -> bool:
        return self.closed_at is None


def cadence_warning(cadence_days: int) -> str | None:
    """Non-fatal warning when the cadence leaves the 2-4 week guideline."""
    low, high = CADENCE_RANGE_DAYS
    if low <= cadence_days <= high:
        return None
    return (
        f"CadenceWarning: {cadence_days} days is outside the {low}-{high} day "
        "(2-4 week) guideline"
    )


def completed_steps(
    history: tuple[StepRecord, ...], iteration_index: int, credit: Step | None
) -> set[Step]:
    """Steps completed in an iteration: recorded there, or credited by carryover."""
    done = {record.step for record in history if record.iteration == iteration_index}
    if credit is not None:
        done.update(step for step in STEP_SEQUENCE if step <= credit)
    return done


def first_missing_step(completed: set[Step]) -> Step | None:
    for step in STEP_SEQUENCE:
        if step not in completed:
            return step
    return None


def check_step_allowed(step: Step, completed: set[Step]) -> None:
    """A step is recordable only when every earlier step is already completed."""
    expected = first_missing_step(completed)
    if expected is not None and step > expected:
        raise StepOrderViolation(expected, step)


def last_completed_step(completed: set[Step]) -> Step | None:
    done = None
    for step in STEP_SEQUENCE:
        if step not in completed:
            break
        done = step
    return done


def validate_treatment(plan: TreatmentPlan) -> tuple[Violation, ...]:
    violations: list[Violation] = []
    if not plan.actions:
        violations.append(Violation("NoActions", "actions", "treatment needs at least one mitigation action"))
    for i, action in enumerate(plan.actions):
        if not action.text.strip():
            violations.append(Violation("EmptyField", f"actions[{i}].text", "action text must be non-empty"))
        if not action.owner.strip():
            violations.append(Violation("EmptyField", f"actions[{i}].owner", "action owner must be non-empty"))
        if not isinstance(action.due, date):
            violations.append(Violation("BadDate", f"actions[{i}].due", "action due date is required"))
    return tuple(violations)


def validate_monitoring(record: MonitoringRecord) -> tuple[Violation, ...]:
    violations: list[Violation] = []
    if not record.observation.strip():
        violations.append(Violation("EmptyField", "observation", "observation must be non-empty"))
    return tuple(violations)
