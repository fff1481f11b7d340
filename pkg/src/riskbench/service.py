"""JSON-over-HTTP facade for the register, consumed by the web UI and scripts.

Every mutating endpoint is the corresponding register mutation plus a commit,
so nothing bypasses the audit log. Mutating requests may carry the client's
last-seen ``revision``; a mismatch answers 409 with the current revision so
the client can refresh and retry. The register file is rewritten atomically
after each successful commit.
"""

from __future__ import annotations

import logging
import threading
from pathlib import Path
from typing import Any, Mapping

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from . import ahp as ahp_mod
from . import register as reg
from . import reporting, store
from .domain import (
    parse_decision,
    parse_impact,
    parse_likelihood,
    parse_locus,
    parse_rating,
    parse_risk_type,
    parse_severity,
)
from .errors import RiskError
from .lifecycle import ActionItem, MonitoringRecord, Step, TreatmentPlan, parse_effectiveness
from .rating import rate
from .register import Register
from .seed import seed_case_study

logger = logging.getLogger(__name__)

API_PREFIX = "/api/v1"
DEFAULT_BIND = "127.0.0.1:8080"

_STATUS_BY_CODE = {
    "StaleRevision": 409,
    "UnknownCase": 404,
    "UnknownIteration": 404,
    "UnknownSession": 404,
    "UnknownMatrix": 404,
    "RegisterNotFound": 404,
    "ParseError": 400,
    "UnsupportedVersion": 400,
}


class RegisterStore:
    """Single-writer owner of one register file.

    Readers take immutable snapshots; ``apply`` serializes commits under a
    lock and persists with write-temp-then-rename.
    """

    def __init__(self, path: Path, register: Register):
        self.path = path
        self._register = register
        self._lock = threading.Lock()

    @classmethod
    def open(cls, path: str | Path, create: bool = False, seed: bool = False) -> "RegisterStore":
        path = Path(path)
        if path.exists():
            if create:
                raise store.RegisterExists(str(path))
            register = store.load(path)
        else:
            if not create:
                raise store.RegisterNotFound(str(path))
            register = seed_case_study() if seed else reg.new_register()
            store.save(register, path)
        return cls(path, register)

    def snapshot(self) -> Register:
        return self._register

    def apply(
        self, mutation: reg.Mutation, *, actor: str, expected_revision: int | None = None
    ) -> tuple[Register, Any]:
        with self._lock:
            committed, output = reg.commit(
                self._register, mutation, actor=actor, expected_revision=expected_revision
            )
            store.save(committed, self.path)
            self._register = committed
        return committed, output


def _body_str(body: Mapping[str, Any], key: str, default: str | None = None) -> str:
    value = body.get(key, default)
    if value is None:
        raise store.ParseError(f"missing field {key!r}", "body")
    if not isinstance(value, str):
        raise store.ParseError(f"field {key!r} must be a string", "body")
    return value


def _body_revision(body: Mapping[str, Any]) -> int | None:
    value = body.get("revision")
    if value is None:
        return None
    if not isinstance(value, int) or isinstance(value, bool):
        raise store.ParseError("field 'revision' must be an integer", "body")
    return value


def _body_actor(body: Mapping[str, Any]) -> str:
    value = body.get("actor", "api")
    if not isinstance(value, str) or not value.strip():
        raise store.ParseError("field 'actor' must be a non-empty string", "body")
    return value.strip()


def _case_view(register: Register, case: reg.RiskCase) -> dict:
    doc = store.case_to_document(case)
    status = reg.case_status(register, case.case_id)
    doc["status"] = {
        "text": status.describe(),
        "iteration": status.iteration_index,
        "last_completed": status.last_completed.code if status.last_completed else None,
        "next_step": status.next_step.code if status.next_step else None,
        "complete": status.complete,
    }
    return doc


def _session_view(session: ahp_mod.AhpSession) -> dict:
    doc = store.session_to_document(session)
    # Live CR per fully judged matrix, so the UI never does AHP math locally.
    preview = {}
    for name, matrix in session.matrices():
        if matrix.is_complete:
            report = ahp_mod.consistency(matrix)
            preview[name] = {"cr": report.cr, "acceptable": report.acceptable}
    doc["consistency_preview"] = preview
    return doc


def _report_response(kind: str, register: Register, fmt: str):
    if kind == "heatmap":
        grid = reporting.heatmap(register)
        if fmt == "json":
            return JSONResponse(grid.to_dict())
        table = reporting.heatmap_table(grid)
    elif kind == "profile":
        table = reporting.profile_table(register)
    elif kind == "assessment":
        table = reporting.assessment_table(register)
    elif kind == "evaluation":
        table = reporting.evaluation_table(register)
    else:
        raise store.ParseError(f"unknown report {kind!r}", "path")
    if fmt == "json":
        return JSONResponse(table.to_dict())
    if fmt == "csv":
        return PlainTextResponse(reporting.render_csv(table), media_type="text/csv")
    if fmt == "md":
        return PlainTextResponse(reporting.render_markdown(table), media_type="text/markdown")
    raise store.ParseError(f"unknown format {fmt!r} (expected json, csv or md)", "query")


def create_app(register_store: RegisterStore) -> FastAPI:
    app = FastAPI(title="risk workbench", docs_url=None, redoc_url=None)

    @app.exception_handler(RiskError)
    async def _risk_error_handler(_request: Request, exc: RiskError) -> JSONResponse:
        status = _STATUS_BY_CODE.get(exc.code, 422)
        return JSONResponse(status_code=status, content=exc.to_dict())

    # ---- read side -------------------------------------------------------

    @app.get(f"{API_PREFIX}/register")
    def get_register() -> JSONResponse:
        return JSONResponse(store.register_to_document(register_store.snapshot()))

    @app.get(f"{API_PREFIX}/cases")
    def get_cases() -> JSONResponse:
        register = register_store.snapshot()
        cases = [
            _case_view(register, case)
            for case in sorted(register.cases, key=lambda c: c.case_id)
        ]
        return JSONResponse({"revision": register.revision, "cases": cases})

    @app.get(f"{API_PREFIX}/cases/{{case_id}}")
    def get_case(case_id: int) -> JSONResponse:
        register = register_store.snapshot()
        case = register.case(case_id)
        return JSONResponse({"revision": register.revision, "case": _case_view(register, case)})

    @app.get(f"{API_PREFIX}/matrix")
    def get_matrix() -> JSONResponse:
        register = register_store.snapshot()
        return JSONResponse(
            {"revision": register.revision, "matrix": store.matrix_to_document(register.matrix)}
        )

    @app.get(f"{API_PREFIX}/ties")
    def get_ties(levels: str | None = Query(default=None)) -> JSONResponse:
        register = register_store.snapshot()
        rating_levels = None
        if levels:
            rating_levels = {parse_rating(token) for token in levels.split(",") if token.strip()}
        groups = ahp_mod.find_tie_groups(register, rating_levels)
        return JSONResponse(
            {
                "revision": register.revision,
                "groups": [{"rating": g.rating.code, "cases": list(g.case_ids)} for g in groups],
            }
        )

    @app.get(f"{API_PREFIX}/whatif")
    def get_whatif(
        case: int = Query(...), likelihood: str = Query(...), severity: str = Query(...)
    ) -> JSONResponse:
        register = register_store.snapshot()
        subject = register.case(case)
        hypothetical = rate(
            register.matrix, parse_likelihood(likelihood), parse_severity(severity)
        )
        current = subject.assessment.rating.code if subject.assessment else None
        return JSONResponse(
            {
                "case_id": case,
                "likelihood": parse_likelihood(likelihood).code,
                "severity": parse_severity(severity).code,
                "rating": hypothetical.code,
                "current_rating": current,
            }
        )

    @app.get(f"{API_PREFIX}/reports/{{kind}}")
    def get_report(kind: str, format: str = Query(default="json")):
        return _report_response(kind, register_store.snapshot(), format)

    @app.get(f"{API_PREFIX}/iterations/{{index}}/summary")
    def get_iteration_summary(index: int) -> JSONResponse:
        register = register_store.snapshot()
        summary = reporting.iteration_summary(register, index)
        return JSONResponse({"revision": register.revision, "summary": summary.to_dict()})

    @app.get(f"{API_PREFIX}/ahp/sessions")
    def get_sessions() -> JSONResponse:
        register = register_store.snapshot()
        return JSONResponse(
            {
                "revision": register.revision,
                "sessions": [_session_view(s) for s in register.ahp_sessions],
            }
        )

    @app.get(f"{API_PREFIX}/ahp/sessions/{{session_id}}")
    def get_session(session_id: int) -> JSONResponse:
        register = register_store.snapshot()
        return JSONResponse(
            {
                "revision": register.revision,
                "session": _session_view(register.session(session_id)),
            }
        )

    # ---- mutations -------------------------------------------------------

    @app.post(f"{API_PREFIX}/cases", status_code=201)
    def post_case(body: dict = Body(...)) -> JSONResponse:
        case_id = body.get("case_id")
        if case_id is not None and (not isinstance(case_id, int) or isinstance(case_id, bool)):
            raise store.ParseError("field 'case_id' must be an integer", "body")
        mutation = reg.add_case(
            locus=parse_locus(_body_str(body, "locus")),
            asset=_body_str(body, "asset"),
            risk_type=parse_risk_type(_body_str(body, "risk_type")),
            description=_body_str(body, "description"),
            consequence=_body_str(body, "consequence"),
            documentation=_body_str(body, "documentation"),
            actor=_body_actor(body),
            case_id=case_id,
        )
        register, case = register_store.apply(
            mutation, actor=_body_actor(body), expected_revision=_body_revision(body)
        )
        return JSONResponse(
            status_code=201,
            content={"revision": register.revision, "case": _case_view(register, case)},
        )

    def _step_mutation(case_id: int, step: Step, body: Mapping[str, Any]) -> reg.Mutation:
        documentation = _body_str(body, "documentation", default="")
        actor = _body_actor(body)
        if step is Step.PROFILE:
            return reg.record_profile(
                case_id,
                locus=parse_locus(_body_str(body, "locus")),
                asset=_body_str(body, "asset"),
                risk_type=parse_risk_type(_body_str(body, "risk_type")),
                description=_body_str(body, "description"),
                consequence=_body_str(body, "consequence"),
                documentation=documentation,
                actor=actor,
            )
        if step is Step.ASSESSMENT:
            return reg.record_assessment(
                case_id,
                vulnerability=_body_str(body, "vulnerability"),
                threat=_body_str(body, "threat"),
                threat_agent=_body_str(body, "threat_agent"),
                impact=parse_impact(_body_str(body, "impact")),
                likelihood=parse_likelihood(_body_str(body, "likelihood")),
                severity=parse_severity(_body_str(body, "severity")),
                documentation=documentation,
                actor=actor,
            )
        if step is Step.EVALUATION:
            return reg.record_evaluation(
                case_id,
                decision=parse_decision(_body_str(body, "decision")),
                solution=_body_str(body, "solution"),
                documentation=documentation,
                actor=actor,
            )
        if step is Step.TREATMENT:
            raw_actions = body.get("actions")
            if not isinstance(raw_actions, list):
                raise store.ParseError("field 'actions' must be a list", "body")
            plan_doc = {
                "actions": raw_actions,
                "controls": body.get("controls", []),
                "validation_note": body.get("validation_note", ""),
            }
            plan: TreatmentPlan = store.treatment_from_document(plan_doc, "body")
            return reg.record_treatment(case_id, plan=plan, documentation=documentation, actor=actor)
        record = MonitoringRecord(
            observation=_body_str(body, "observation"),
            effective=parse_effectiveness(_body_str(body, "effective")),
            reviewed_by=_body_str(body, "reviewed_by", default=""),
        )
        return reg.record_monitoring(case_id, record=record, documentation=documentation, actor=actor)

    @app.post(f"{API_PREFIX}/cases/{{case_id}}/steps/{{step_name}}")
    def post_step(case_id: int, step_name: str, body: dict = Body(...)) -> JSONResponse:
        from .lifecycle import parse_step

        step = parse_step(step_name)
        mutation = _step_mutation(case_id, step, body)
        register, _record = register_store.apply(
            mutation, actor=_body_actor(body), expected_revision=_body_revision(body)
        )
        case = register.case(case_id)
        payload: dict = {
            "revision": register.revision,
            "case": _case_view(register, case),
            "step": step.code,
        }
        if step is Step.ASSESSMENT and case.assessment is not None:
            payload["rating"] = case.assessment.rating.code
        return JSONResponse(payload)

    @app.put(f"{API_PREFIX}/matrix")
    def put_matrix(body: dict = Body(...)) -> JSONResponse:
        matrix_doc = body.get("matrix", body)
        candidate = store.matrix_from_document(matrix_doc, "body.matrix")
        register, changes = register_store.apply(
            reg.set_matrix(candidate),
            actor=_body_actor(body),
            expected_revision=_body_revision(body),
        )
        return JSONResponse(
            {
                "revision": register.revision,
                "matrix": store.matrix_to_document(register.matrix),
                "changes": [c.to_dict() for c in changes],
            }
        )

    @app.post(f"{API_PREFIX}/iterations", status_code=201)
    def post_iteration(body: dict = Body(...)) -> JSONResponse:
        cadence = body.get("cadence_days")
        if not isinstance(cadence, int) or isinstance(cadence, bool):
            raise store.ParseError("field 'cadence_days' must be an integer", "body")
        register, result = register_store.apply(
            reg.open_iteration(cadence),
            actor=_body_actor(body),
            expected_revision=_body_revision(body),
        )
        return JSONResponse(
            status_code=201,
            content={
                "revision": register.revision,
                "iteration": store.iteration_to_document(result.iteration),
                "warning": result.warning,
            },
        )

    @app.post(f"{API_PREFIX}/iterations/close")
    def post_iteration_close(body: dict = Body(default={})) -> JSONResponse:
        raw = body.get("overrides", [])
        if not isinstance(raw, list):
            raise store.ParseError("field 'overrides' must be a list", "body")
        overrides = {}
        for entry in raw:
            if not isinstance(entry, dict):
                raise store.ParseError("override must be an object", "body.overrides")
            cid = entry.get("case_id")
            if not isinstance(cid, int) or isinstance(cid, bool):
                raise store.ParseError("override 'case_id' must be an integer", "body.overrides")
            overrides[cid] = _body_str(entry, "justification")
        register, report = register_store.apply(
            reg.close_iteration(overrides),
            actor=_body_actor(body),
            expected_revision=_body_revision(body),
        )
        return JSONResponse(
            {
                "revision": register.revision,
                "iteration": store.iteration_to_document(report.iteration),
                "cases": [
                    {
                        "case_id": s.case_id,
                        "complete": s.complete,
                        "last_completed": s.last_completed.code if s.last_completed else None,
                        "justification": s.justification,
                    }
                    for s in report.statuses
                ],
            }
        )

    @app.post(f"{API_PREFIX}/ahp/sessions", status_code=201)
    def post_session(body: dict = Body(...)) -> JSONResponse:
        cases = body.get("cases")
        criteria = body.get("criteria")
        if not isinstance(cases, list) or not all(
            isinstance(c, int) and not isinstance(c, bool) for c in cases
        ):
            raise store.ParseError("field 'cases' must be a list of case ids", "body")
        if not isinstance(criteria, list) or not all(isinstance(c, str) for c in criteria):
            raise store.ParseError("field 'criteria' must be a list of names", "body")
        register, session = register_store.apply(
            reg.create_ahp_session(cases, criteria),
            actor=_body_actor(body),
            expected_revision=_body_revision(body),
        )
        return JSONResponse(
            status_code=201,
            content={"revision": register.revision, "session": _session_view(session)},
        )

    @app.put(f"{API_PREFIX}/ahp/sessions/{{session_id}}/judgments")
    def put_judgment(session_id: int, body: dict = Body(...)) -> JSONResponse:
        matrix_name = _body_str(body, "matrix")
        i = body.get("i")
        j = body.get("j")
        for name, value in (("i", i), ("j", j)):
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise store.ParseError(f"field {name!r} must be a 1-based index", "body")
        value = body.get("value")
        if not isinstance(value, (str, int, float)):
            raise store.ParseError("field 'value' must be a judgment like 3 or \"1/3\"", "body")
        register, session = register_store.apply(
            reg.judge_ahp(session_id, matrix_name, i - 1, j - 1, value),
            actor=_body_actor(body),
            expected_revision=_body_revision(body),
        )
        return JSONResponse(
            {"revision": register.revision, "session": _session_view(session)}
        )

    @app.post(f"{API_PREFIX}/ahp/sessions/{{session_id}}/complete")
    def post_complete(session_id: int, body: dict = Body(default={})) -> JSONResponse:
        raw = body.get("overrides", {})
        if not isinstance(raw, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in raw.items()
        ):
            raise store.ParseError("field 'overrides' must map matrix names to justifications", "body")
        register, session = register_store.apply(
            reg.complete_ahp_session(session_id, raw),
            actor=_body_actor(body),
            expected_revision=_body_revision(body),
        )
        return JSONResponse(
            {"revision": register.revision, "session": _session_view(session)}
        )

    @app.get(f"{API_PREFIX}/audit/verify")
    def get_audit_verify() -> JSONResponse:
        register = register_store.snapshot()
        entries = reg.verify_audit_chain(register)
        return JSONResponse({"revision": register.revision, "ok": True, "entries": entries})

    return app


def create_app_with_ui(register_store: RegisterStore, ui_dir: str | Path | None = None) -> FastAPI:
    app = create_app(register_store)
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app


def serve(
    register_path: str | Path,
    bind: str = DEFAULT_BIND,
    ui_dir: str | Path | None = None,
    create: bool = False,
    seed: bool = False,
) -> None:
    """Load (or create) the register file and serve the API until interrupted."""
    import uvicorn

    register_store = RegisterStore.open(register_path, create=create, seed=seed)
    host, _, port_text = bind.partition(":")
    port = int(port_text) if port_text else 8080
    app = create_app_with_ui(register_store, ui_dir)
    logger.info("serving register %s on %s:%d", register_store.path, host, port)
    uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="warning")
