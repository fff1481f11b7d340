"""Register persistence: one self-contained UTF-8 JSON document per register.

Serialization is deterministic (fixed field order, stable number and
timestamp formatting), so equal registers produce byte-identical files and
the documents diff cleanly. Pairwise judgments are stored as exact rationals
("1/3") to keep reciprocity exact through round-trips. Loading verifies the
audit hash chain end to end.
"""

from __future__ import annotations

import json
import os
import tempfile
from datetime import date, datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

from . import ahp as ahp_mod
from . import lifecycle as lc
from .domain import (
    Decision,
    ImpactSet,
    Likelihood,
    RiskAssessment,
    RiskEvaluation,
    RiskProfile,
    Severity,
    parse_decision,
    parse_impact,
    parse_likelihood,
    parse_locus,
    parse_rating,
    parse_risk_type,
    parse_severity,
)
from .errors import RiskError
from .rating import RatingMatrix
from .register import (
    SCHEMA_VERSION,
    AuditEntry,
    Register,
    RiskCase,
    format_timestamp,
    verify_audit_chain,
)

DEFAULT_REGISTER_PATH = "./risk-register.json"
REGISTER_PATH_ENV = "RISK_REGISTER"


class ParseError(RiskError):
    code = "ParseError"

    def __init__(self, message: str, location: str):
        super().__init__(f"{location}: {message}", location=location)
        self.location = location


class UnsupportedVersion(RiskError):
    code = "UnsupportedVersion"

    def __init__(self, found: int, supported: int):
        super().__init__(
            f"register schema_version {found} is newer than supported {supported}",
            found=found,
            supported=supported,
        )


class AuditChainBroken(RiskError):
    code = "AuditChainBroken"

    def __init__(self, seq: int, message: str):
        super().__init__(message, seq=seq)
        self.seq = seq


class RegisterExists(RiskError):
    code = "RegisterExists"

    def __init__(self, path: str):
        super().__init__(f"register file already exists: {path}", path=path)


class RegisterNotFound(RiskError):
    code = "RegisterNotFound"

    def __init__(self, path: str):
        super().__init__(f"no register file at {path}; run `risk init` first", path=path)


def resolve_register_path(explicit: str | None = None) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(REGISTER_PATH_ENV) or DEFAULT_REGISTER_PATH)


# --------------------------------------------------------------------------
# Timestamps and fractions


def parse_timestamp(text: str, where: str) -> datetime:
    try:
        value = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ParseError(f"bad timestamp {text!r}: {exc}", where) from exc
    if value.tzinfo is None:
        raise ParseError(f"timestamp {text!r} must carry a UTC offset", where)
    value = value.astimezone(timezone.utc)
    # Only the canonical rendering is accepted: textual variants of the same
    # instant would re-render differently and defeat audit-digest checks.
    if format_timestamp(value) != text:
        raise ParseError(f"timestamp {text!r} is not in canonical RFC 3339 UTC form", where)
    return value


def _format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _parse_fraction(text: str, where: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}: {exc}", where) from exc
    if value <= 0:
        raise ParseError(f"rational {text!r} must be positive", where)
    return value


# --------------------------------------------------------------------------
# Typed document access


def _get(doc: dict, key: str, kind: type | tuple[type, ...], where: str, optional: bool = False) -> Any:
    if key not in doc:
        if optional:
            return None
        raise ParseError(f"missing field {key!r}", where)
    value = doc[key]
    if value is None and optional:
        return None
    if kind is int and isinstance(value, bool):
        raise ParseError(f"field {key!r} must be an integer", where)
    if not isinstance(value, kind):
        expected = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ParseError(f"field {key!r} must be {expected}, got {type(value).__name__}", where)
    return value


# --------------------------------------------------------------------------
# Matrix documents (also the `risk matrix set <file>` format)


def matrix_to_document(matrix: RatingMatrix) -> dict:
    # Cells are row-major with likelihood rows descending and severity columns
    # descending, mirroring the grid's usual presentation.
    cells = [
        matrix.cells[(lik, sev)].code
        for lik in reversed(matrix.likelihood_axis)
        for sev in reversed(matrix.severity_axis)
    ]
    return {
        "name": matrix.name,
        "version": matrix.version,
        "likelihood_axis": list(matrix.likelihood_axis),
        "severity_axis": list(matrix.severity_axis),
        "cells": cells,
    }


def matrix_from_document(doc: Any, where: str = "matrix") -> RatingMatrix:
    if not isinstance(doc, dict):
        raise ParseError("matrix must be an object", where)
    name = _get(doc, "name", str, where)
    version = _get(doc, "version", int, where, optional=True) or 1
    likelihood_axis = tuple(str(c) for c in _get(doc, "likelihood_axis", list, where))
    severity_axis = tuple(str(c) for c in _get(doc, "severity_axis", list, where))
    raw_cells = _get(doc, "cells", list, where)
    expected = len(likelihood_axis) * len(severity_axis)
    if len(raw_cells) != expected:
        raise ParseError(f"expected {expected} cells, got {len(raw_cells)}", f"{where}.cells")
    cells = {}
    position = 0
    for lik in reversed(likelihood_axis):
        for sev in reversed(severity_axis):
            code = raw_cells[position]
            position += 1
            try:
                cells[(lik, sev)] = parse_rating(str(code))
            except RiskError as exc:
                raise ParseError(str(exc), f"{where}.cells[{position - 1}]") from exc
    return RatingMatrix(
        name=name,
        version=version,
        likelihood_axis=likelihood_axis,
        severity_axis=severity_axis,
        cells=cells,
    )


# --------------------------------------------------------------------------
# Case documents


def profile_to_document(profile: RiskProfile) -> dict:
    return {
        "locus": profile.locus.render(),
        "asset": profile.asset,
        "risk_type": profile.risk_type.render(),
        "description": profile.description,
        "consequence": profile.consequence,
    }


def _profile_from_document(doc: dict, case_id: int, where: str) -> RiskProfile:
    try:
        locus = parse_locus(_get(doc, "locus", str, where))
        risk_type = parse_risk_type(_get(doc, "risk_type", str, where))
    except RiskError as exc:
        raise ParseError(str(exc), where) from exc
    return RiskProfile(
        case_id=case_id,
        locus=locus,
        asset=_get(doc, "asset", str, where),
        risk_type=risk_type,
        description=_get(doc, "description", str, where),
        consequence=_get(doc, "consequence", str, where),
    )


def assessment_to_document(assessment: RiskAssessment) -> dict:
    return {
        "vulnerability": assessment.vulnerability,
        "threat": assessment.threat,
        "threat_agent": assessment.threat_agent,
        "impact": assessment.impact.render(),
        "likelihood": assessment.likelihood.code,
        "severity": assessment.severity.code,
        "rating": assessment.rating.code,
    }


def _assessment_from_document(doc: dict, where: str) -> RiskAssessment:
    try:
        impact = parse_impact(_get(doc, "impact", str, where))
        likelihood = parse_likelihood(_get(doc, "likelihood", str, where))
        severity = parse_severity(_get(doc, "severity", str, where))
        rating = parse_rating(_get(doc, "rating", str, where))
    except RiskError as exc:
        raise ParseError(str(exc), where) from exc
    return RiskAssessment(
        vulnerability=_get(doc, "vulnerability", str, where),
        threat=_get(doc, "threat", str, where),
        threat_agent=_get(doc, "threat_agent", str, where),
        impact=impact,
        likelihood=likelihood,
        severity=severity,
        rating=rating,
    )


def evaluation_to_document(evaluation: RiskEvaluation) -> dict:
    return {"decision": evaluation.decision.code, "solution": evaluation.solution}


def _evaluation_from_document(doc: dict, where: str) -> RiskEvaluation:
    try:
        decision = parse_decision(_get(doc, "decision", str, where))
    except RiskError as exc:
        raise ParseError(str(exc), where) from exc
    return RiskEvaluation(decision=decision, solution=_get(doc, "solution", str, where))


def treatment_to_document(plan: lc.TreatmentPlan) -> dict:
    return {
        "actions": [
            {"text": a.text, "owner": a.owner, "due": a.due.isoformat()} for a in plan.actions
        ],
        "controls": list(plan.controls),
        "validation_note": plan.validation_note,
    }


def treatment_from_document(doc: dict, where: str) -> lc.TreatmentPlan:
    actions = []
    for i, raw in enumerate(_get(doc, "actions", list, where)):
        item_where = f"{where}.actions[{i}]"
        if not isinstance(raw, dict):
            raise ParseError("action must be an object", item_where)
        due_text = _get(raw, "due", str, item_where)
        try:
            due = date.fromisoformat(due_text)
        except ValueError as exc:
            raise ParseError(f"bad date {due_text!r}", item_where) from exc
        actions.append(
            lc.ActionItem(
                text=_get(raw, "text", str, item_where),
                owner=_get(raw, "owner", str, item_where),
                due=due,
            )
        )
    return lc.TreatmentPlan(
        actions=tuple(actions),
        controls=tuple(str(c) for c in _get(doc, "controls", list, where)),
        validation_note=_get(doc, "validation_note", str, where),
    )


def monitoring_to_document(record: lc.MonitoringRecord) -> dict:
    return {
        "observation": record.observation,
        "effective": record.effective.code,
        "reviewed_by": record.reviewed_by,
    }


def _monitoring_from_document(doc: dict, where: str) -> lc.MonitoringRecord:
    try:
        effective = lc.parse_effectiveness(_get(doc, "effective", str, where))
    except RiskError as exc:
        raise ParseError(str(exc), where) from exc
    return lc.MonitoringRecord(
        observation=_get(doc, "observation", str, where),
        effective=effective,
        reviewed_by=_get(doc, "reviewed_by", str, where),
    )


_PAYLOAD_TO_DOC = {
    lc.Step.PROFILE: profile_to_document,
    lc.Step.ASSESSMENT: assessment_to_document,
    lc.Step.EVALUATION: evaluation_to_document,
    lc.Step.TREATMENT: treatment_to_document,
    lc.Step.MONITORING: monitoring_to_document,
}


def record_to_document(record: lc.StepRecord) -> dict:
    return {
        "step": record.step.code,
        "iteration": record.iteration,
        "documentation": record.documentation,
        "actor": record.actor,
        "timestamp": format_timestamp(record.timestamp),
        "payload": _PAYLOAD_TO_DOC[record.step](record.payload),
    }


def _record_from_document(doc: dict, case_id: int, where: str) -> lc.StepRecord:
    try:
        step = lc.parse_step(_get(doc, "step", str, where))
    except RiskError as exc:
        raise ParseError(str(exc), where) from exc
    payload_doc = _get(doc, "payload", dict, where)
    payload_where = f"{where}.payload"
    if step is lc.Step.PROFILE:
        payload: lc.StepPayload = _profile_from_document(payload_doc, case_id, payload_where)
    elif step is lc.Step.ASSESSMENT:
        payload = _assessment_from_document(payload_doc, payload_where)
    elif step is lc.Step.EVALUATION:
        payload = _evaluation_from_document(payload_doc, payload_where)
    elif step is lc.Step.TREATMENT:
        payload = treatment_from_document(payload_doc, payload_where)
    else:
        payload = _monitoring_from_document(payload_doc, payload_where)
    return lc.StepRecord(
        step=step,
        iteration=_get(doc, "iteration", int, where),
        documentation=_get(doc, "documentation", str, where),
        actor=_get(doc, "actor", str, where),
        timestamp=parse_timestamp(_get(doc, "timestamp", str, where), where),
        payload=payload,
    )


def case_to_document(case: RiskCase) -> dict:
    return {
        "case_id": case.case_id,
        "profile": profile_to_document(case.profile),
        "assessment": assessment_to_document(case.assessment) if case.assessment else None,
        "evaluation": evaluation_to_document(case.evaluation) if case.evaluation else None,
        "treatment": treatment_to_document(case.treatment) if case.treatment else None,
        "monitoring": monitoring_to_document(case.monitoring) if case.monitoring else None,
        "history": [record_to_document(r) for r in case.history],
    }


def _case_from_document(doc: Any, where: str) -> RiskCase:
    if not isinstance(doc, dict):
        raise ParseError("case must be an object", where)
    case_id = _get(doc, "case_id", int, where)
    profile = _profile_from_document(_get(doc, "profile", dict, where), case_id, f"{where}.profile")
    assessment_doc = _get(doc, "assessment", dict, where, optional=True)
    evaluation_doc = _get(doc, "evaluation", dict, where, optional=True)
    treatment_doc = _get(doc, "treatment", dict, where, optional=True)
    monitoring_doc = _get(doc, "monitoring", dict, where, optional=True)
    history = tuple(
        _record_from_document(raw, case_id, f"{where}.history[{i}]")
        for i, raw in enumerate(_get(doc, "history", list, where))
    )
    return RiskCase(
        case_id=case_id,
        profile=profile,
        assessment=_assessment_from_document(assessment_doc, f"{where}.assessment") if assessment_doc else None,
        evaluation=_evaluation_from_document(evaluation_doc, f"{where}.evaluation") if evaluation_doc else None,
        treatment=treatment_from_document(treatment_doc, f"{where}.treatment") if treatment_doc else None,
        monitoring=_monitoring_from_document(monitoring_doc, f"{where}.monitoring") if monitoring_doc else None,
        history=history,
    )


# --------------------------------------------------------------------------
# Iterations, sessions, audit entries


def iteration_to_document(iteration: lc.Iteration) -> dict:
    return {
        "index": iteration.index,
        "cadence_days": iteration.cadence_days,
        "opened_at": format_timestamp(iteration.opened_at),
        "closed_at": format_timestamp(iteration.closed_at) if iteration.closed_at else None,
        "carryover": [
            {
                "case_id": c.case_id,
                "resume_after": c.resume_after.code if c.resume_after else None,
                "justification": c.justification,
            }
            for c in iteration.carryover
        ],
    }


def _iteration_from_document(doc: Any, where: str) -> lc.Iteration:
    if not isinstance(doc, dict):
        raise ParseError("iteration must be an object", where)
    closed_raw = _get(doc, "closed_at", str, where, optional=True)
    carryover = []
    for i, raw in enumerate(_get(doc, "carryover", list, where)):
        c_where = f"{where}.carryover[{i}]"
        if not isinstance(raw, dict):
            raise ParseError("carryover entry must be an object", c_where)
        resume_raw = _get(raw, "resume_after", str, c_where, optional=True)
        try:
            resume = lc.parse_step(resume_raw) if resume_raw else None
        except RiskError as exc:
            raise ParseError(str(exc), c_where) from exc
        carryover.append(
            lc.Carryover(
                case_id=_get(raw, "case_id", int, c_where),
                resume_after=resume,
                justification=_get(raw, "justification", str, c_where),
            )
        )
    return lc.Iteration(
        index=_get(doc, "index", int, where),
        cadence_days=_get(doc, "cadence_days", int, where),
        opened_at=parse_timestamp(_get(doc, "opened_at", str, where), where),
        closed_at=parse_timestamp(closed_raw, where) if closed_raw else None,
        carryover=tuple(carryover),
    )


def pairwise_to_document(matrix: ahp_mod.PairwiseMatrix) -> dict:
    return {
        "labels": list(matrix.labels),
        "judgments": [
            {"i": i + 1, "j": j + 1, "value": _format_fraction(value)}
            for (i, j), value in sorted(matrix.judgments.items())
        ],
    }


def _pairwise_from_document(doc: Any, where: str) -> ahp_mod.PairwiseMatrix:
    if not isinstance(doc, dict):
        raise ParseError("pairwise matrix must be an object", where)
    labels = tuple(str(l) for l in _get(doc, "labels", list, where))
    judgments = {}
    for k, raw in enumerate(_get(doc, "judgments", list, where)):
        j_where = f"{where}.judgments[{k}]"
        if not isinstance(raw, dict):
            raise ParseError("judgment must be an object", j_where)
        i = _get(raw, "i", int, j_where) - 1
        j = _get(raw, "j", int, j_where) - 1
        judgments[(i, j)] = _parse_fraction(_get(raw, "value", str, j_where), j_where)
    try:
        return ahp_mod.PairwiseMatrix(labels, judgments)
    except RiskError as exc:
        raise ParseError(str(exc), where) from exc


def session_to_document(session: ahp_mod.AhpSession) -> dict:
    result = None
    if session.result is not None:
        result = {
            "ranking": [{"case_id": r.case_id, "score": r.score} for r in session.result.ranking],
            "criteria_weights": list(session.result.criteria_weights),
            "consistency": {k: session.result.consistency[k] for k in sorted(session.result.consistency)},
        }
    return {
        "session_id": session.session_id,
        "tie_group": list(session.tie_group),
        "rating": session.rating.code,
        "criteria": list(session.criteria),
        "criteria_matrix": pairwise_to_document(session.criteria_matrix) if session.criteria_matrix else None,
        "alternative_matrices": [pairwise_to_document(m) for m in session.alternative_matrices],
        "cr_overrides": {k: session.cr_overrides[k] for k in sorted(session.cr_overrides)},
        "status": session.status.code,
        "result": result,
    }


def _session_from_document(doc: Any, where: str) -> ahp_mod.AhpSession:
    if not isinstance(doc, dict):
        raise ParseError("session must be an object", where)
    status_raw = _get(doc, "status", str, where)
    try:
        status = next(s for s in ahp_mod.SessionStatus if s.value == status_raw)
    except StopIteration:
        raise ParseError(f"bad status {status_raw!r}", where) from None
    try:
        rating = parse_rating(_get(doc, "rating", str, where))
    except RiskError as exc:
        raise ParseError(str(exc), where) from exc
    criteria_doc = _get(doc, "criteria_matrix", dict, where, optional=True)
    result_doc = _get(doc, "result", dict, where, optional=True)
    result = None
    if result_doc is not None:
        r_where = f"{where}.result"
        ranking = []
        for i, raw in enumerate(_get(result_doc, "ranking", list, r_where)):
            if not isinstance(raw, dict):
                raise ParseError("ranking entry must be an object", r_where)
            ranking.append(
                ahp_mod.RankedCase(
                    case_id=_get(raw, "case_id", int, r_where),
                    score=float(_get(raw, "score", (int, float), r_where)),
                )
            )
        result = ahp_mod.AhpResult(
            ranking=tuple(ranking),
            criteria_weights=tuple(
                float(w) for w in _get(result_doc, "criteria_weights", list, r_where)
            ),
            consistency={
                str(k): float(v) for k, v in _get(result_doc, "consistency", dict, r_where).items()
            },
        )
    overrides_doc = _get(doc, "cr_overrides", dict, where)
    try:
        return ahp_mod.AhpSession(
            session_id=_get(doc, "session_id", int, where),
            tie_group=tuple(int(c) for c in _get(doc, "tie_group", list, where)),
            rating=rating,
            criteria=tuple(str(c) for c in _get(doc, "criteria", list, where)),
            criteria_matrix=_pairwise_from_document(criteria_doc, f"{where}.criteria_matrix")
            if criteria_doc
            else None,
            alternative_matrices=tuple(
                _pairwise_from_document(raw, f"{where}.alternative_matrices[{i}]")
                for i, raw in enumerate(_get(doc, "alternative_matrices", list, where))
            ),
            cr_overrides={str(k): str(v) for k, v in overrides_doc.items()},
            status=status,
            result=result,
        )
    except RiskError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), where) from exc


def audit_entry_to_document(entry: AuditEntry) -> dict:
    return {
        "seq": entry.seq,
        "timestamp": format_timestamp(entry.timestamp),
        "actor": entry.actor,
        "operation": entry.operation,
        "summary": entry.summary,
        "prev_hash": entry.prev_hash,
        "entry_hash": entry.entry_hash,
    }


def _audit_entry_from_document(doc: Any, where: str) -> AuditEntry:
    if not isinstance(doc, dict):
        raise ParseError("audit entry must be an object", where)
    return AuditEntry(
        seq=_get(doc, "seq", int, where),
        timestamp=parse_timestamp(_get(doc, "timestamp", str, where), where),
        actor=_get(doc, "actor", str, where),
        operation=_get(doc, "operation", str, where),
        summary=_get(doc, "summary", str, where),
        prev_hash=_get(doc, "prev_hash", str, where),
        entry_hash=_get(doc, "entry_hash", str, where),
    )


# --------------------------------------------------------------------------
# Whole-register documents


def register_to_document(register: Register) -> dict:
    return {
        "schema_version": register.schema_version,
        "revision": register.revision,
        "matrix": matrix_to_document(register.matrix),
        "cases": [case_to_document(c) for c in register.cases],
        "iterations": [iteration_to_document(i) for i in register.iterations],
        "ahp_sessions": [session_to_document(s) for s in register.ahp_sessions],
        "audit_log": [audit_entry_to_document(e) for e in register.audit_log],
    }


def register_from_document(doc: Any) -> Register:
    if not isinstance(doc, dict):
        raise ParseError("register must be a JSON object", "$")
    schema_version = _get(doc, "schema_version", int, "$")
    if schema_version > SCHEMA_VERSION:
        raise UnsupportedVersion(schema_version, SCHEMA_VERSION)
    register = Register(
        schema_version=schema_version,
        revision=_get(doc, "revision", int, "$"),
        matrix=matrix_from_document(_get(doc, "matrix", dict, "$")),
        cases=tuple(
            _case_from_document(raw, f"cases[{i}]") for i, raw in enumerate(_get(doc, "cases", list, "$"))
        ),
        iterations=tuple(
            _iteration_from_document(raw, f"iterations[{i}]")
            for i, raw in enumerate(_get(doc, "iterations", list, "$"))
        ),
        ahp_sessions=tuple(
            _session_from_document(raw, f"ahp_sessions[{i}]")
            for i, raw in enumerate(_get(doc, "ahp_sessions", list, "$"))
        ),
        audit_log=tuple(
            _audit_entry_from_document(raw, f"audit_log[{i}]")
            for i, raw in enumerate(_get(doc, "audit_log", list, "$"))
        ),
    )
    seen: set[int] = set()
    for case in register.cases:
        if case.case_id in seen:
            raise ParseError(f"duplicate case_id {case.case_id}", "cases")
        seen.add(case.case_id)
    return register


def dumps(register: Register) -> str:
    return json.dumps(register_to_document(register), indent=2, ensure_ascii=False) + "\n"


def loads(text: Union[str, bytes]) -> Register:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    register = register_from_document(doc)
    verify_audit_chain(register)
    return register


def save(register: Register, destination: Union[str, Path]) -> None:
    """Atomic write: temp file in the same directory, then rename."""
    path = Path(destination)
    data = dumps(register).encode("utf-8")
    fd, tmp_name = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load(source: Union[str, Path]) -> Register:
    path = Path(source)
    if not path.exists():
        raise RegisterNotFound(str(path))
    return loads(path.read_bytes())
