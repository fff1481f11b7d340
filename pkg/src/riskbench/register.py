"""The register: every case, the active matrix, iterations, AHP sessions, and
a hash-chained audit log, all in one immutable snapshot.

Mutations are functions applied through :func:`commit`, which is all-or-nothing:
it bumps the revision by exactly one, appends exactly one audit entry, and a
failing mutation leaves the caller's snapshot untouched. Optimistic concurrency
works by handing ``commit`` the revision the client last saw.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence, Union

from . import ahp as ahp_mod
from . import lifecycle as lc
from . import rating as rating_mod
from .domain import (
    Decision,
    ImpactSet,
    InvalidPayload,
    InvalidProfile,
    Likelihood,
    Locus,
    RiskAssessment,
    RiskEvaluation,
    RiskProfile,
    RiskType,
    Severity,
    Violation,
    validate_assessment,
    validate_evaluation,
    validate_profile,
)
from .errors import RiskError
from .rating import RatingMatrix, default_matrix

SCHEMA_VERSION = 1
GENESIS_HASH = "0" * 64


class StaleRevision(RiskError):
    code = "StaleRevision"

    def __init__(self, current: int, supplied: int):
        super().__init__(
            f"register is at revision {current} but the request was based on {supplied}; "
            "refresh and retry",
            current=current,
            supplied=supplied,
        )
        self.current = current
        self.supplied = supplied


class DuplicateCaseId(RiskError):
    code = "DuplicateCaseId"

    def __init__(self, case_id: int):
        super().__init__(f"case id {case_id} already exists", case_id=case_id)


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class RiskCase:
    """One risk through its whole life. The ``profile`` .. ``monitoring`` fields
    hold the current effective payloads; ``history`` keeps every submission."""

    case_id: int
    profile: RiskProfile
    assessment: RiskAssessment | None = None
    evaluation: RiskEvaluation | None = None
    treatment: lc.TreatmentPlan | None = None
    monitoring: lc.MonitoringRecord | None = None
    history: tuple[lc.StepRecord, ...] = ()


@dataclass(frozen=True)
class AuditEntry:
    """One link of the tamper-evident chain. ``entry_hash`` is a SHA-256 digest
    over (seq, timestamp, actor, operation, summary, prev_hash)."""

    seq: int
    timestamp: datetime
    actor: str
    operation: str
    summary: str
    prev_hash: str
    entry_hash: str


def format_timestamp(value: datetime) -> str:
    """RFC 3339 UTC rendering, 'Z' suffix, fractional seconds only when present."""
    value = value.astimezone(timezone.utc)
    if value.microsecond:
        return value.strftime("%Y-%m-%dT%H:%M:%S.%f") + "Z"
    return value.strftime("%Y-%m-%dT%H:%M:%SZ")


def entry_digest(
    seq: int, timestamp: datetime, actor: str, operation: str, summary: str, prev_hash: str
) -> str:
    payload = json.dumps(
        [seq, format_timestamp(timestamp), actor, operation, summary, prev_hash],
        separators=(",", ":"),
        ensure_ascii=False,
    ).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


@dataclass(frozen=True)
class Register:
    schema_version: int = SCHEMA_VERSION
    matrix: RatingMatrix = field(default_factory=default_matrix)
    cases: tuple[RiskCase, ...] = ()
    iterations: tuple[lc.Iteration, ...] = ()
    ahp_sessions: tuple[ahp_mod.AhpSession, ...] = ()
    audit_log: tuple[AuditEntry, ...] = ()
    revision: int = 0

    def case(self, case_id: int) -> RiskCase:
        for case in self.cases:
            if case.case_id == case_id:
                return case
        raise lc.UnknownCase(case_id)

    def has_case(self, case_id: int) -> bool:
        return any(case.case_id == case_id for case in self.cases)

    def open_iteration(self) -> lc.Iteration | None:
        if self.iterations and self.iterations[-1].is_open:
            return self.iterations[-1]
        return None

    def current_iteration(self) -> lc.Iteration | None:
        """The open iteration, or the last closed one when none is open."""
        return self.iterations[-1] if self.iterations else None

    def iteration(self, index: int) -> lc.Iteration:
        for iteration in self.iterations:
            if iteration.index == index:
                return iteration
        raise lc.UnknownIteration(index)

    def session(self, session_id: int) -> ahp_mod.AhpSession:
        for session in self.ahp_sessions:
            if session.session_id == session_id:
                return session
        raise ahp_mod.UnknownSession(session_id)

    def carryover_credit(self, case_id: int, iteration_index: int) -> lc.Step | None:
        """The step this case may resume after in ``iteration_index``, granted
        when the previous iteration closed with the case carried over."""
        if iteration_index <= 1:
            return None
        previous = self.iteration(iteration_index - 1)
        for entry in previous.carryover:
            if entry.case_id == case_id:
                return entry.resume_after
        return None

    def completed_steps(self, case: RiskCase, iteration_index: int) -> set[lc.Step]:
        credit = self.carryover_credit(case.case_id, iteration_index)
        return lc.completed_steps(case.history, iteration_index, credit)


def new_register(matrix: RatingMatrix | None = None) -> Register:
    return Register(matrix=matrix or default_matrix())


# --------------------------------------------------------------------------
# Commit machinery

# A mutation maps (register, timestamp) -> (next register, output, operation, summary).
# It must not touch revision or audit_log; commit owns those.
Mutation = Callable[[Register, datetime], tuple[Register, Any, str, str]]


def commit(
    register: Register,
    mutation: Mutation,
    *,
    actor: str,
    expected_revision: int | None = None,
    timestamp: datetime | None = None,
) -> tuple[Register, Any]:
    """Apply one mutation atomically: revision +1, exactly one audit entry."""
    if expected_revision is not None and expected_revision != register.revision:
        raise StaleRevision(current=register.revision, supplied=expected_revision)
    ts = timestamp or utcnow()
    next_register, output, operation, summary = mutation(register, ts)
    seq = len(register.audit_log) + 1
    prev_hash = register.audit_log[-1].entry_hash if register.audit_log else GENESIS_HASH
    entry = AuditEntry(
        seq=seq,
        timestamp=ts,
        actor=actor,
        operation=operation,
        summary=summary,
        prev_hash=prev_hash,
        entry_hash=entry_digest(seq, ts, actor, operation, summary, prev_hash),
    )
    committed = replace(
        next_register,
        revision=register.revision + 1,
        audit_log=register.audit_log + (entry,),
    )
    return committed, output


def verify_audit_chain(register: Register) -> int:
    """Recompute the whole hash chain; returns the entry count or raises
    AuditChainBroken at the first bad link."""
    from .store import AuditChainBroken

    prev_hash = GENESIS_HASH
    for position, entry in enumerate(register.audit_log, start=1):
        if entry.seq != position:
            raise AuditChainBroken(position, f"entry {position} has seq {entry.seq}")
        if entry.prev_hash != prev_hash:
            raise AuditChainBroken(position, f"entry {position} does not link to entry {position - 1}")
        digest = entry_digest(
            entry.seq, entry.timestamp, entry.actor, entry.operation, entry.summary, entry.prev_hash
        )
        if digest != entry.entry_hash:
            raise AuditChainBroken(position, f"entry {position} digest mismatch")
        prev_hash = entry.entry_hash
    return len(register.audit_log)


# --------------------------------------------------------------------------
# Helpers shared by the step mutations


_CASE_FIELD = {
    lc.Step.PROFILE: "profile",
    lc.Step.ASSESSMENT: "assessment",
    lc.Step.EVALUATION: "evaluation",
    lc.Step.TREATMENT: "treatment",
    lc.Step.MONITORING: "monitoring",
}


def _require_open_iteration(register: Register) -> lc.Iteration:
    iteration = register.open_iteration()
    if iteration is None:
        raise lc.NoOpenIteration()
    return iteration


def _clean_record_fields(step: lc.Step, documentation: str, actor: str) -> tuple[str, str]:
    doc = documentation.strip()
    if not doc:
        raise lc.DocumentationRequired(step.code)
    act = actor.strip()
    if not act:
        raise InvalidPayload(step.code, (Violation("EmptyField", "actor", "actor must be non-empty"),))
    return doc, act


def _apply_step(
    register: Register,
    ts: datetime,
    case_id: int,
    step: lc.Step,
    payload: lc.StepPayload,
    documentation: str,
    actor: str,
) -> tuple[Register, lc.StepRecord]:
    iteration = _require_open_iteration(register)
    case = register.case(case_id)
    doc, act = _clean_record_fields(step, documentation, actor)
    completed = register.completed_steps(case, iteration.index)
    lc.check_step_allowed(step, completed)
    record = lc.StepRecord(
        step=step,
        iteration=iteration.index,
        documentation=doc,
        actor=act,
        timestamp=ts,
        payload=payload,
    )
    updated_case = replace(
        case,
        history=case.history + (record,),
        **{_CASE_FIELD[step]: payload},
    )
    cases = tuple(updated_case if c.case_id == case_id else c for c in register.cases)
    return replace(register, cases=cases), record


# --------------------------------------------------------------------------
# Mutations


def add_case(
    *,
    locus: Locus,
    asset: str,
    risk_type: RiskType,
    description: str,
    consequence: str,
    documentation: str,
    actor: str,
    case_id: int | None = None,
) -> Mutation:
    """Create a case and record its Profile step in one commit."""

    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        iteration = _require_open_iteration(register)
        cid = case_id
        if cid is None:
            cid = max((c.case_id for c in register.cases), default=0) + 1
        if register.has_case(cid):
            raise DuplicateCaseId(cid)
        profile = RiskProfile(
            case_id=cid,
            locus=locus,
            asset=asset.strip(),
            risk_type=risk_type,
            description=description.strip(),
            consequence=consequence.strip(),
        )
        violations = validate_profile(profile)
        if violations:
            raise InvalidProfile(violations)
        doc, act = _clean_record_fields(lc.Step.PROFILE, documentation, actor)
        record = lc.StepRecord(
            step=lc.Step.PROFILE,
            iteration=iteration.index,
            documentation=doc,
            actor=act,
            timestamp=ts,
            payload=profile,
        )
        case = RiskCase(case_id=cid, profile=profile, history=(record,))
        next_register = replace(register, cases=register.cases + (case,))
        summary = f"case {cid}: profiled {profile.asset!r} ({profile.risk_type.render()}, {profile.locus.render()})"
        return next_register, case, "add_case", summary

    return apply


def record_profile(
    case_id: int,
    *,
    locus: Locus,
    asset: str,
    risk_type: RiskType,
    description: str,
    consequence: str,
    documentation: str,
    actor: str,
) -> Mutation:
    """Re-record (supersede) an existing case's Profile step."""

    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        profile = RiskProfile(
            case_id=case_id,
            locus=locus,
            asset=asset.strip(),
            risk_type=risk_type,
            description=description.strip(),
            consequence=consequence.strip(),
        )
        violations = validate_profile(profile)
        if violations:
            raise InvalidProfile(violations)
        next_register, record = _apply_step(
            register, ts, case_id, lc.Step.PROFILE, profile, documentation, actor
        )
        return next_register, record, "record_step", f"case {case_id}: Profile re-recorded"

    return apply


def record_assessment(
    case_id: int,
    *,
    vulnerability: str,
    threat: str,
    threat_agent: str,
    impact: ImpactSet,
    likelihood: Likelihood,
    severity: Severity,
    documentation: str,
    actor: str,
) -> Mutation:
    """Record the Assessment step; the rating is derived from the active matrix."""

    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        rating = rating_mod.rate(register.matrix, likelihood, severity)
        assessment = RiskAssessment(
            vulnerability=vulnerability.strip(),
            threat=threat.strip(),
            threat_agent=threat_agent.strip(),
            impact=impact,
            likelihood=likelihood,
            severity=severity,
            rating=rating,
        )
        violations = validate_assessment(assessment)
        if violations:
            raise InvalidPayload(lc.Step.ASSESSMENT.code, violations)
        next_register, record = _apply_step(
            register, ts, case_id, lc.Step.ASSESSMENT, assessment, documentation, actor
        )
        summary = (
            f"case {case_id}: assessed {likelihood.code}/{severity.code} -> rating {rating.code}"
        )
        return next_register, record, "record_step", summary

    return apply


def record_evaluation(
    case_id: int, *, decision: Decision, solution: str, documentation: str, actor: str
) -> Mutation:
    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        evaluation = RiskEvaluation(decision=decision, solution=solution.strip())
        violations = validate_evaluation(evaluation)
        if violations:
            raise InvalidPayload(lc.Step.EVALUATION.code, violations)
        next_register, record = _apply_step(
            register, ts, case_id, lc.Step.EVALUATION, evaluation, documentation, actor
        )
        summary = f"case {case_id}: evaluated -> {decision.code}"
        return next_register, record, "record_step", summary

    return apply


def record_treatment(
    case_id: int, *, plan: lc.TreatmentPlan, documentation: str, actor: str
) -> Mutation:
    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        trimmed = lc.TreatmentPlan(
            actions=tuple(
                lc.ActionItem(text=a.text.strip(), owner=a.owner.strip(), due=a.due)
                for a in plan.actions
            ),
            controls=tuple(c.strip() for c in plan.controls if c.strip()),
            validation_note=plan.validation_note.strip(),
        )
        violations = lc.validate_treatment(trimmed)
        if violations:
            raise InvalidPayload(lc.Step.TREATMENT.code, violations)
        next_register, record = _apply_step(
            register, ts, case_id, lc.Step.TREATMENT, trimmed, documentation, actor
        )
        summary = f"case {case_id}: treatment planned ({len(trimmed.actions)} action(s))"
        return next_register, record, "record_step", summary

    return apply


def record_monitoring(
    case_id: int, *, record: lc.MonitoringRecord, documentation: str, actor: str
) -> Mutation:
    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        trimmed = lc.MonitoringRecord(
            observation=record.observation.strip(),
            effective=record.effective,
            reviewed_by=record.reviewed_by.strip(),
        )
        violations = lc.validate_monitoring(trimmed)
        if violations:
            raise InvalidPayload(lc.Step.MONITORING.code, violations)
        next_register, step_record = _apply_step(
            register, ts, case_id, lc.Step.MONITORING, trimmed, documentation, actor
        )
        summary = f"case {case_id}: monitored ({trimmed.effective.code})"
        return next_register, step_record, "record_step", summary

    return apply


@dataclass(frozen=True)
class OpenIterationResult:
    iteration: lc.Iteration
    warning: str | None


def open_iteration(cadence_days: int) -> Mutation:
    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        current = register.open_iteration()
        if current is not None:
            raise lc.IterationAlreadyOpen(current.index)
        if not isinstance(cadence_days, int) or cadence_days < 1:
            raise InvalidPayload(
                "Iteration",
                (Violation("NonPositiveCadence", "cadence_days", "cadence_days must be a positive integer"),),
            )
        index = register.iterations[-1].index + 1 if register.iterations else 1
        iteration = lc.Iteration(index=index, cadence_days=cadence_days, opened_at=ts)
        warning = lc.cadence_warning(cadence_days)
        summary = f"iteration {index} opened (cadence {cadence_days} days)"
        if warning:
            summary += f"; {warning}"
        next_register = replace(register, iterations=register.iterations + (iteration,))
        return next_register, OpenIterationResult(iteration, warning), "open_iteration", summary

    return apply


@dataclass(frozen=True)
class CaseCloseStatus:
    case_id: int
    complete: bool
    last_completed: lc.Step | None
    justification: str | None


@dataclass(frozen=True)
class CloseReport:
    iteration: lc.Iteration
    statuses: tuple[CaseCloseStatus, ...]

    @property
    def carryover(self) -> tuple[lc.Carryover, ...]:
        return self.iteration.carryover


def close_iteration(overrides: Mapping[int, str] | None = None) -> Mutation:
    """Close the open iteration. Every case must have reached Monitoring this
    iteration or appear in ``overrides`` with a non-empty justification; the
    justified ones carry over and resume after their last completed step."""

    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        iteration = _require_open_iteration(register)
        cleaned = {cid: just.strip() for cid, just in (overrides or {}).items()}
        for cid in cleaned:
            if not register.has_case(cid):
                raise lc.UnknownCase(cid)

        statuses: list[CaseCloseStatus] = []
        carryover: list[lc.Carryover] = []
        unjustified: list[int] = []
        for case in sorted(register.cases, key=lambda c: c.case_id):
            recorded = {r.step for r in case.history if r.iteration == iteration.index}
            complete = lc.Step.MONITORING in recorded
            completed = register.completed_steps(case, iteration.index)
            last = lc.last_completed_step(completed)
            justification = cleaned.get(case.case_id) or None
            if complete:
                statuses.append(CaseCloseStatus(case.case_id, True, last, None))
                continue
            if not justification:
                unjustified.append(case.case_id)
                continue
            statuses.append(CaseCloseStatus(case.case_id, False, last, justification))
            carryover.append(lc.Carryover(case.case_id, last, justification))
        if unjustified:
            raise lc.IncompleteCases(tuple(unjustified))

        closed = replace(iteration, closed_at=ts, carryover=tuple(carryover))
        iterations = register.iterations[:-1] + (closed,)
        report = CloseReport(closed, tuple(statuses))
        summary = f"iteration {iteration.index} closed; {len(carryover)} case(s) carried over"
        return replace(register, iterations=iterations), report, "close_iteration", summary

    return apply


def set_matrix(candidate: RatingMatrix) -> Mutation:
    """Validate a candidate matrix, install it, and recompute every rating."""

    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        updated, changes = rating_mod.recompute_ratings(register, candidate)
        if changes:
            detail = ", ".join(f"case {c.case_id} {c.old.code}->{c.new.code}" for c in changes)
        else:
            detail = "no rating changes"
        summary = (
            f"matrix {candidate.name!r} installed as version {updated.matrix.version}; {detail}"
        )
        return updated, changes, "set_matrix", summary

    return apply


def create_ahp_session(case_ids: Sequence[int], criteria: Sequence[str]) -> Mutation:
    """Open a Draft tie-breaking session over equally rated cases."""

    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        group = tuple(case_ids)
        ratings = set()
        for cid in group:
            case = register.case(cid)
            if case.assessment is None:
                raise ahp_mod.NotATieGroup(f"case {cid} has no assessment yet")
            ratings.add(case.assessment.rating)
        if len(ratings) != 1:
            raise ahp_mod.NotATieGroup(
                "cases do not share one rating: "
                + ", ".join(f"{cid}" for cid in group)
                + f" have {sorted(r.code for r in ratings)}"
            )
        session_id = max((s.session_id for s in register.ahp_sessions), default=0) + 1
        session = ahp_mod.AhpSession.draft(session_id, group, ratings.pop(), criteria)
        next_register = replace(register, ahp_sessions=register.ahp_sessions + (session,))
        summary = (
            f"AHP session {session_id} opened for cases {list(group)} "
            f"at {session.rating.code} with criteria {list(session.criteria)}"
        )
        return next_register, session, "create_ahp_session", summary

    return apply


def judge_ahp(
    session_id: int, matrix_name: str, i: int, j: int, value: Union[str, int, float, Fraction]
) -> Mutation:
    """Set one pairwise judgment (0-based indices) in a session matrix."""

    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        session = register.session(session_id)
        updated = session.with_judgment(matrix_name, i, j, value)
        sessions = tuple(updated if s.session_id == session_id else s for s in register.ahp_sessions)
        matrix = dict(updated.matrices())[matrix_name]
        judgment = matrix.entry(min(i, j), max(i, j))
        summary = (
            f"AHP session {session_id}: {matrix_name}[{matrix.labels[min(i, j)]} vs "
            f"{matrix.labels[max(i, j)]}] = {judgment}"
        )
        return replace(register, ahp_sessions=sessions), updated, "judge_ahp", summary

    return apply


def complete_ahp_session(session_id: int, overrides: Mapping[str, str] | None = None) -> Mutation:
    """Run the ranking; the audit entry records judgments, weights, and CRs."""

    def apply(register: Register, ts: datetime) -> tuple[Register, Any, str, str]:
        session = register.session(session_id)
        if session.status is ahp_mod.SessionStatus.COMPLETE:
            raise ahp_mod.InvalidJudgment(f"session {session_id} is already complete")
        completed = ahp_mod.rank_session(session, overrides)
        sessions = tuple(completed if s.session_id == session_id else s for s in register.ahp_sessions)
        assert completed.result is not None
        detail = {
            "ranking": [[r.case_id, r.score] for r in completed.result.ranking],
            "criteria_weights": list(completed.result.criteria_weights),
            "cr": dict(completed.result.consistency),
            "judgments": {
                name: {f"{i},{j}": str(v) for (i, j), v in sorted(m.judgments.items())}
                for name, m in completed.matrices()
            },
            "overrides": dict(completed.cr_overrides),
        }
        summary = f"AHP session {session_id} completed: " + json.dumps(
            detail, separators=(",", ":"), ensure_ascii=False
        )
        return replace(register, ahp_sessions=sessions), completed, "complete_ahp_session", summary

    return apply


# --------------------------------------------------------------------------
# Read-side helpers


@dataclass(frozen=True)
class CaseStatus:
    case_id: int
    iteration_index: int
    last_completed: lc.Step | None
    next_step: lc.Step | None
    complete: bool

    def describe(self) -> str:
        if self.complete:
            return f"complete for iteration {self.iteration_index} (Monitoring recorded)"
        if self.last_completed is None:
            return f"awaiting {lc.Step.PROFILE.code}"
        return f"at {self.last_completed.code}, next {self.next_step.code}"


def case_status(register: Register, case_id: int) -> CaseStatus:
    """Where a case stands in the open (or most recent) iteration."""
    case = register.case(case_id)
    iteration = register.current_iteration()
    if iteration is None:
        return CaseStatus(case_id, 0, None, lc.Step.PROFILE, False)
    completed = register.completed_steps(case, iteration.index)
    recorded = {r.step for r in case.history if r.iteration == iteration.index}
    return CaseStatus(
        case_id=case_id,
        iteration_index=iteration.index,
        last_completed=lc.last_completed_step(completed),
        next_step=lc.first_missing_step(completed),
        complete=lc.Step.MONITORING in recorded,
    )
