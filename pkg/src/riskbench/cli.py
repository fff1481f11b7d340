"""`risk` command-line interface.

Every mutating command takes an advisory lock on the register file, applies
exactly one commit, and rewrites the file atomically, so any command sequence
leaves a verifiable audit chain. `--json` switches output to the API's JSON
shapes for scripting parity with the service.
"""

from __future__ import annotations

import contextlib
import fcntl
import json
import os
import sys
from datetime import date
from pathlib import Path
from typing import Any

import click

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
from .lifecycle import ActionItem, MonitoringRecord, TreatmentPlan, UnknownIteration, parse_effectiveness
from .rating import default_matrix, rate, validate_matrix
from .register import Register
from .seed import seed_case_study
from .service import DEFAULT_BIND, serve


class Context:
    def __init__(self, register_path: Path, json_mode: bool, actor: str):
        self.register_path = register_path
        self.json_mode = json_mode
        self.actor = actor

    def load(self) -> Register:
        return store.load(self.register_path)

    @contextlib.contextmanager
    def _file_lock(self):
        lock_path = self.register_path.with_name(self.register_path.name + ".lock")
        with open(lock_path, "w") as handle:
            fcntl.flock(handle, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(handle, fcntl.LOCK_UN)

    def apply(self, mutation: reg.Mutation) -> tuple[Register, Any]:
        with self._file_lock():
            register = self.load()
            committed, output = reg.commit(register, mutation, actor=self.actor)
            store.save(committed, self.register_path)
        return committed, output

    def emit(self, payload: dict, human: str) -> None:
        if self.json_mode:
            click.echo(json.dumps(payload, indent=2, ensure_ascii=False))
        else:
            click.echo(human)


pass_context = click.make_pass_decorator(Context)


def run() -> None:
    """Entry point wrapper: domain errors exit nonzero with the code on stderr."""
    try:
        main(standalone_mode=False)
    except RiskError as exc:
        click.echo(f"{exc.code}: {exc}", err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(130)


@click.group()
@click.option(
    "--register",
    "register_path",
    envvar=store.REGISTER_PATH_ENV,
    default=store.DEFAULT_REGISTER_PATH,
    show_default=True,
    help="Path of the register file.",
)
@click.option("--json", "json_mode", is_flag=True, help="Emit machine-readable JSON output.")
@click.option(
    "--actor",
    envvar="RISK_ACTOR",
    default="security risk team",
    show_default=True,
    help="Recorded as the acting party on steps and audit entries.",
)
@click.pass_context
def main(ctx: click.Context, register_path: str, json_mode: bool, actor: str) -> None:
    """Risk-management workbench: profile, assess, evaluate, treat, monitor."""
    ctx.obj = Context(Path(register_path), json_mode, actor)


@main.command()
@click.option("--seed-paper", is_flag=True, help="Start from the bundled postal-drone case study.")
@pass_context
def init(ctx: Context, seed_paper: bool) -> None:
    """Create a new register file."""
    if ctx.register_path.exists():
        raise store.RegisterExists(str(ctx.register_path))
    register = seed_case_study() if seed_paper else reg.new_register()
    store.save(register, ctx.register_path)
    ctx.emit(
        {"revision": register.revision, "path": str(ctx.register_path)},
        f"register created at {ctx.register_path}"
        + (f" with {len(register.cases)} seeded cases" if seed_paper else ""),
    )


@main.group()
def iteration() -> None:
    """Open, close, and inspect iterations."""


@iteration.command("open")
@click.option("--cadence", type=int, required=True, help="Cycle length in days (guideline: 14-28).")
@pass_context
def iteration_open(ctx: Context, cadence: int) -> None:
    register, result = ctx.apply(reg.open_iteration(cadence))
    lines = [f"iteration {result.iteration.index} opened (cadence {cadence} days)"]
    if result.warning:
        lines.append(result.warning)
    ctx.emit(
        {
            "revision": register.revision,
            "iteration": store.iteration_to_document(result.iteration),
            "warning": result.warning,
        },
        "\n".join(lines),
    )


def _parse_override(text: str) -> tuple[int, str]:
    case_text, sep, justification = text.partition(":")
    if not sep or not case_text.strip().isdigit():
        raise click.BadParameter(f"override must look like <case_id>:<justification>, got {text!r}")
    return int(case_text), justification


@iteration.command("close")
@click.option(
    "--override",
    "overrides",
    multiple=True,
    help="Carry an incomplete case over: <case_id>:<justification>. Repeatable.",
)
@pass_context
def iteration_close(ctx: Context, overrides: tuple[str, ...]) -> None:
    parsed = dict(_parse_override(text) for text in overrides)
    register, report = ctx.apply(reg.close_iteration(parsed))
    lines = [f"iteration {report.iteration.index} closed"]
    for entry in report.carryover:
        resume = entry.resume_after.code if entry.resume_after else "start"
        lines.append(f"  carryover case {entry.case_id}: resumes after {resume} ({entry.justification})")
    ctx.emit(
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
        },
        "\n".join(lines),
    )


@iteration.command("status")
@click.option("--index", type=int, default=None, help="Iteration index (default: latest).")
@pass_context
def iteration_status(ctx: Context, index: int | None) -> None:
    register = ctx.load()
    if index is None:
        current = register.current_iteration()
        if current is None:
            raise UnknownIteration(0)
        index = current.index
    summary = reporting.iteration_summary(register, index)
    ctx.emit(
        {"revision": register.revision, "summary": summary.to_dict()},
        reporting.render_iteration_summary(summary).rstrip("\n"),
    )


@main.command()
@click.option("--where", required=True, help="A, G or A/G.")
@click.option("--asset", required=True)
@click.option("--type", "risk_type", required=True, help="E, I or E/I.")
@click.option("--desc", "description", required=True)
@click.option("--consequence", required=True)
@click.option("--doc", "documentation", required=True, help="Step documentation (mandatory).")
@click.option("--id", "case_id", type=int, default=None, help="Explicit case id (default: next free).")
@pass_context
def add(ctx: Context, where: str, asset: str, risk_type: str, description: str,
        consequence: str, documentation: str, case_id: int | None) -> None:
    """Create a case by recording its Profile step."""
    register, case = ctx.apply(
        reg.add_case(
            locus=parse_locus(where),
            asset=asset,
            risk_type=parse_risk_type(risk_type),
            description=description,
            consequence=consequence,
            documentation=documentation,
            actor=ctx.actor,
            case_id=case_id,
        )
    )
    ctx.emit(
        {"revision": register.revision, "case": store.case_to_document(case)},
        f"case {case.case_id} created",
    )


@main.command()
@click.argument("case_id", type=int)
@click.option("--vuln", "vulnerability", required=True)
@click.option("--threat", required=True)
@click.option("--agent", "threat_agent", required=True)
@click.option("--impact", required=True, help="Subset of CIAa, e.g. CA.")
@click.option("--likelihood", required=True, help="N, L, M, H or VH.")
@click.option("--severity", required=True, help="L, M, H or C.")
@click.option("--doc", "documentation", required=True)
@pass_context
def assess(ctx: Context, case_id: int, vulnerability: str, threat: str, threat_agent: str,
           impact: str, likelihood: str, severity: str, documentation: str) -> None:
    """Record the Assessment step; prints the computed rating."""
    register, _record = ctx.apply(
        reg.record_assessment(
            case_id,
            vulnerability=vulnerability,
            threat=threat,
            threat_agent=threat_agent,
            impact=parse_impact(impact),
            likelihood=parse_likelihood(likelihood),
            severity=parse_severity(severity),
            documentation=documentation,
            actor=ctx.actor,
        )
    )
    rating = register.case(case_id).assessment.rating
    ctx.emit(
        {"revision": register.revision, "case_id": case_id, "rating": rating.code},
        f"case {case_id} assessed: rating {rating.code}",
    )


@main.command()
@click.argument("case_id", type=int)
@click.option("--decision", required=True, help="accept, avoid, transfer or mitigate.")
@click.option("--solution", required=True)
@click.option("--doc", "documentation", required=True)
@pass_context
def evaluate(ctx: Context, case_id: int, decision: str, solution: str, documentation: str) -> None:
    """Record the Evaluation step."""
    register, _record = ctx.apply(
        reg.record_evaluation(
            case_id,
            decision=parse_decision(decision),
            solution=solution,
            documentation=documentation,
            actor=ctx.actor,
        )
    )
    chosen = register.case(case_id).evaluation.decision
    ctx.emit(
        {"revision": register.revision, "case_id": case_id, "decision": chosen.code},
        f"case {case_id} evaluated: {chosen.code}",
    )


def _parse_action(text: str) -> ActionItem:
    parts = text.split("|")
    if len(parts) != 3:
        raise click.BadParameter(f"action must look like <text>|<owner>|<YYYY-MM-DD>, got {text!r}")
    try:
        due = date.fromisoformat(parts[2].strip())
    except ValueError:
        raise click.BadParameter(f"bad due date {parts[2]!r} (expected YYYY-MM-DD)") from None
    return ActionItem(text=parts[0], owner=parts[1], due=due)


@main.command()
@click.argument("case_id", type=int)
@click.option(
    "--action",
    "actions",
    multiple=True,
    required=True,
    help="Mitigation action: <text>|<owner>|<YYYY-MM-DD>. Repeatable.",
)
@click.option("--control", "controls", multiple=True, help="Control description. Repeatable.")
@click.option("--validation", "validation_note", default="", help="How the controls were validated.")
@click.option("--doc", "documentation", required=True)
@pass_context
def treat(ctx: Context, case_id: int, actions: tuple[str, ...], controls: tuple[str, ...],
          validation_note: str, documentation: str) -> None:
    """Record the Treatment step (mitigation plan and controls)."""
    plan = TreatmentPlan(
        actions=tuple(_parse_action(a) for a in actions),
        controls=controls,
        validation_note=validation_note,
    )
    register, _record = ctx.apply(
        reg.record_treatment(case_id, plan=plan, documentation=documentation, actor=ctx.actor)
    )
    ctx.emit(
        {"revision": register.revision, "case_id": case_id, "actions": len(plan.actions)},
        f"case {case_id} treatment recorded ({len(plan.actions)} action(s))",
    )


@main.command()
@click.argument("case_id", type=int)
@click.option("--observation", required=True)
@click.option("--effective", required=True, help="effective, ineffective or inconclusive.")
@click.option("--reviewed-by", default="", help="Reviewer name.")
@click.option("--doc", "documentation", required=True)
@pass_context
def monitor(ctx: Context, case_id: int, observation: str, effective: str,
            reviewed_by: str, documentation: str) -> None:
    """Record the Monitoring step."""
    record = MonitoringRecord(
        observation=observation,
        effective=parse_effectiveness(effective),
        reviewed_by=reviewed_by,
    )
    register, _record = ctx.apply(
        reg.record_monitoring(case_id, record=record, documentation=documentation, actor=ctx.actor)
    )
    ctx.emit(
        {"revision": register.revision, "case_id": case_id},
        f"case {case_id} monitoring recorded",
    )


@main.command("rate")
@click.option("--likelihood", required=True)
@click.option("--severity", required=True)
@pass_context
def rate_cmd(ctx: Context, likelihood: str, severity: str) -> None:
    """Pure matrix lookup (uses the register's matrix when one exists)."""
    matrix = ctx.load().matrix if ctx.register_path.exists() else default_matrix()
    rating = rate(matrix, parse_likelihood(likelihood), parse_severity(severity))
    ctx.emit({"rating": rating.code}, rating.code)


@main.group()
def matrix() -> None:
    """Show, validate, or replace the rating matrix."""


@matrix.command("show")
@pass_context
def matrix_show(ctx: Context) -> None:
    register = ctx.load()
    doc = store.matrix_to_document(register.matrix)
    rows = []
    severities = tuple(reversed(register.matrix.severity_axis))
    for lik in reversed(register.matrix.likelihood_axis):
        rows.append((lik,) + tuple(register.matrix.cells[(lik, s)].code for s in severities))
    table = reporting.Table("Risk Rating Matrix", ("Likelihood \\ Severity",) + severities, tuple(rows))
    ctx.emit({"revision": register.revision, "matrix": doc}, reporting.render_markdown(table).rstrip("\n"))


def _matrix_from_file(path: str):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise store.ParseError(exc.msg, f"{path}: line {exc.lineno} column {exc.colno}") from exc
    return store.matrix_from_document(doc, "matrix")


@matrix.command("validate")
@click.argument("file", type=click.Path(exists=True))
@pass_context
def matrix_validate(ctx: Context, file: str) -> None:
    candidate = _matrix_from_file(file)
    violations = validate_matrix(candidate)
    if not violations:
        ctx.emit({"valid": True, "violations": []}, "matrix is valid")
        return
    if ctx.json_mode:
        click.echo(json.dumps({"valid": False, "violations": [v.to_dict() for v in violations]}, indent=2))
    else:
        for violation in violations:
            click.echo(f"{violation.code}: {violation.message}")
    sys.exit(1)


@matrix.command("set")
@click.argument("file", type=click.Path(exists=True))
@pass_context
def matrix_set(ctx: Context, file: str) -> None:
    candidate = _matrix_from_file(file)
    register, changes = ctx.apply(reg.set_matrix(candidate))
    lines = [f"matrix {register.matrix.name!r} installed as version {register.matrix.version}"]
    for change in changes:
        lines.append(f"  case {change.case_id}: {change.old.code} -> {change.new.code}")
    if not changes:
        lines.append("  no rating changes")
    ctx.emit(
        {
            "revision": register.revision,
            "matrix": store.matrix_to_document(register.matrix),
            "changes": [c.to_dict() for c in changes],
        },
        "\n".join(lines),
    )


@main.command()
@click.option("--levels", default=None, help="Comma-separated rating codes (default: C).")
@pass_context
def ties(ctx: Context, levels: str | None) -> None:
    """List groups of equally rated cases."""
    register = ctx.load()
    rating_levels = None
    if levels:
        rating_levels = {parse_rating(token) for token in levels.split(",") if token.strip()}
    groups = ahp_mod.find_tie_groups(register, rating_levels)
    if ctx.json_mode:
        ctx.emit(
            {
                "revision": register.revision,
                "groups": [{"rating": g.rating.code, "cases": list(g.case_ids)} for g in groups],
            },
            "",
        )
        return
    if not groups:
        click.echo("no tie groups")
        return
    for group in groups:
        click.echo(f"{group.rating.code}: " + ", ".join(str(c) for c in group.case_ids))


@main.group()
def ahp() -> None:
    """Break ties between equally rated cases with pairwise comparisons."""


@ahp.command("new")
@click.option("--group", required=True, help="Comma-separated case ids, e.g. 3,7.")
@click.option("--criteria", required=True, help="Comma-separated criterion names.")
@pass_context
def ahp_new(ctx: Context, group: str, criteria: str) -> None:
    case_ids = [int(token) for token in group.split(",") if token.strip()]
    names = [token.strip() for token in criteria.split(",") if token.strip()]
    register, session = ctx.apply(reg.create_ahp_session(case_ids, names))
    matrices = ", ".join(name for name, _ in session.matrices())
    ctx.emit(
        {"revision": register.revision, "session": store.session_to_document(session)},
        f"AHP session {session.session_id} opened (judge matrices: {matrices})",
    )


@ahp.command("judge")
@click.argument("session_id", type=int)
@click.argument("matrix_name")
@click.argument("i", type=int)
@click.argument("j", type=int)
@click.argument("value")
@pass_context
def ahp_judge(ctx: Context, session_id: int, matrix_name: str, i: int, j: int, value: str) -> None:
    """Set judgment (I, J) of a session matrix; indices are 1-based."""
    if i < 1 or j < 1:
        raise click.BadParameter("indices are 1-based")
    register, session = ctx.apply(reg.judge_ahp(session_id, matrix_name, i - 1, j - 1, value))
    remaining = sum(len(m.missing_pairs) for _, m in session.matrices())
    ctx.emit(
        {"revision": register.revision, "session": store.session_to_document(session)},
        f"judgment recorded ({remaining} pair(s) left to judge)",
    )


@ahp.command("complete")
@click.argument("session_id", type=int)
@click.option(
    "--override",
    "overrides",
    multiple=True,
    help="Accept an inconsistent matrix: <matrix>:<justification>. Repeatable.",
)
@pass_context
def ahp_complete(ctx: Context, session_id: int, overrides: tuple[str, ...]) -> None:
    parsed: dict[str, str] = {}
    for text in overrides:
        name, sep, justification = text.partition(":")
        if not sep or not justification.strip():
            raise click.BadParameter(f"override must look like <matrix>:<justification>, got {text!r}")
        parsed[name] = justification
    register, session = ctx.apply(reg.complete_ahp_session(session_id, parsed))
    assert session.result is not None
    lines = [f"AHP session {session_id} complete; ranking:"]
    for position, ranked in enumerate(session.result.ranking, start=1):
        lines.append(f"  {position}. case {ranked.case_id} (score {ranked.score:.4f})")
    ctx.emit(
        {"revision": register.revision, "session": store.session_to_document(session)},
        "\n".join(lines),
    )


@ahp.command("show")
@click.argument("session_id", type=int)
@pass_context
def ahp_show(ctx: Context, session_id: int) -> None:
    register = ctx.load()
    session = register.session(session_id)
    doc = store.session_to_document(session)
    lines = [
        f"session {session.session_id}: cases {list(session.tie_group)} at {session.rating.code}, "
        f"status {session.status.code}"
    ]
    for name, m in session.matrices():
        judged = len(m.judgments)
        lines.append(f"  matrix {name}: {judged}/{m.pair_count} pairs judged")
    if session.result:
        for position, ranked in enumerate(session.result.ranking, start=1):
            lines.append(f"  {position}. case {ranked.case_id} (score {ranked.score:.4f})")
    ctx.emit({"revision": register.revision, "session": doc}, "\n".join(lines))


@main.command()
@click.argument("kind", type=click.Choice(["profile", "assessment", "evaluation", "heatmap"]))
@click.option("--format", "fmt", type=click.Choice(["md", "csv"]), default="md", show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write to a file instead of stdout.")
@pass_context
def report(ctx: Context, kind: str, fmt: str, out: str | None) -> None:
    """Render a register table."""
    register = ctx.load()
    if kind == "heatmap":
        table = reporting.heatmap_table(reporting.heatmap(register))
    elif kind == "profile":
        table = reporting.profile_table(register)
    elif kind == "assessment":
        table = reporting.assessment_table(register)
    else:
        table = reporting.evaluation_table(register)
    if ctx.json_mode:
        text = json.dumps(table.to_dict(), indent=2, ensure_ascii=False) + "\n"
    else:
        text = reporting.render_markdown(table) if fmt == "md" else reporting.render_csv(table)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"written to {out}")
    else:
        click.echo(text, nl=False)


@main.group()
def audit() -> None:
    """Audit-log operations."""


@audit.command("verify")
@pass_context
def audit_verify(ctx: Context) -> None:
    register = ctx.load()
    entries = reg.verify_audit_chain(register)
    ctx.emit(
        {"revision": register.revision, "ok": True, "entries": entries},
        f"audit chain OK ({entries} entries)",
    )


@main.command("serve")
@click.option("--bind", default=DEFAULT_BIND, show_default=True, help="host:port to listen on.")
@click.option("--ui", "ui_dir", type=click.Path(exists=True), default=None, help="Static web UI directory.")
@pass_context
def serve_cmd(ctx: Context, bind: str, ui_dir: str | None) -> None:
    """Serve the JSON API (and optionally the web UI) over HTTP."""
    serve(ctx.register_path, bind=bind, ui_dir=ui_dir)


if __name__ == "__main__":
    run()
