"""Read-only views over a register snapshot: the three step tables, the
matrix heatmap, and per-iteration summaries.

Tables render to markdown (pipe tables) and RFC 4180 CSV with identical cell
values; fields a case has not reached yet render as "-" so columns stay
aligned.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass

from . import lifecycle as lc
from .ahp import TieGroup, find_tie_groups
from .domain import Rating
from .register import CaseStatus, Register

DASH = "-"


@dataclass(frozen=True)
class Table:
    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def to_dict(self) -> dict:
        return {"title": self.title, "columns": list(self.columns), "rows": [list(r) for r in self.rows]}


def _markdown_cell(value: str) -> str:
    return value.replace("|", "\\|").replace("\n", " ")


def render_markdown(table: Table) -> str:
    lines = [
        "| " + " | ".join(_markdown_cell(c) for c in table.columns) + " |",
        "| " + " | ".join("---" for _ in table.columns) + " |",
    ]
    for row in table.rows:
        lines.append("| " + " | ".join(_markdown_cell(v) for v in row) + " |")
    return "\n".join(lines) + "\n"


def render_csv(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(table.columns)
    writer.writerows(table.rows)
    return buffer.getvalue()


def profile_table(register: Register) -> Table:
    rows = []
    for case in sorted(register.cases, key=lambda c: c.case_id):
        p = case.profile
        rows.append(
            (
                str(case.case_id),
                p.locus.render(),
                p.asset,
                p.risk_type.render(),
                p.description,
                p.consequence,
            )
        )
    return Table(
        title="Risk Profile",
        columns=("Case #", "Where(G/A)", "Asset", "Risk Type", "Risk Description", "Consequence"),
        rows=tuple(rows),
    )


def assessment_table(register: Register) -> Table:
    rows = []
    for case in sorted(register.cases, key=lambda c: c.case_id):
        a = case.assessment
        if a is None:
            rows.append((str(case.case_id),) + (DASH,) * 7)
        else:
            rows.append(
                (
                    str(case.case_id),
                    a.vulnerability,
                    a.threat,
                    a.threat_agent,
                    a.impact.render(),
                    a.likelihood.code,
                    a.severity.code,
                    a.rating.code,
                )
            )
    return Table(
        title="Risk Assessment",
        columns=(
            "Case #",
            "Vulnerability",
            "Threat",
            "Source",
            "Impact on",
            "Likelihood",
            "Severity",
            "Rate",
        ),
        rows=tuple(rows),
    )


def evaluation_table(register: Register) -> Table:
    rows = []
    for case in sorted(register.cases, key=lambda c: c.case_id):
        e = case.evaluation
        if e is None:
            rows.append((str(case.case_id), DASH, DASH))
        else:
            rows.append((str(case.case_id), e.decision.code, e.solution))
    return Table(
        title="Risk Evaluation",
        columns=("Case #", "Decision", "Solution"),
        rows=tuple(rows),
    )


@dataclass(frozen=True)
class HeatCell:
    likelihood: str
    severity: str
    rating: Rating
    count: int


@dataclass(frozen=True)
class Heatmap:
    """Case counts per (likelihood, severity) cell of the active matrix, with
    each cell's rating. Axes are presented descending, mirroring the grid."""

    likelihoods: tuple[str, ...]  # descending
    severities: tuple[str, ...]  # descending
    cells: tuple[tuple[HeatCell, ...], ...]  # rows follow `likelihoods`
    total: int

    def to_dict(self) -> dict:
        return {
            "likelihoods": list(self.likelihoods),
            "severities": list(self.severities),
            "cells": [
                [
                    {"likelihood": c.likelihood, "severity": c.severity, "rating": c.rating.code, "count": c.count}
                    for c in row
                ]
                for row in self.cells
            ],
            "total": self.total,
        }


def heatmap(register: Register) -> Heatmap:
    counts: Counter[tuple[str, str]] = Counter()
    for case in register.cases:
        if case.assessment is not None:
            counts[(case.assessment.likelihood.code, case.assessment.severity.code)] += 1
    likelihoods = tuple(reversed(register.matrix.likelihood_axis))
    severities = tuple(reversed(register.matrix.severity_axis))
    rows = []
    for lik in likelihoods:
        row = []
        for sev in severities:
            row.append(
                HeatCell(
                    likelihood=lik,
                    severity=sev,
                    rating=register.matrix.cells[(lik, sev)],
                    count=counts.get((lik, sev), 0),
                )
            )
        rows.append(tuple(row))
    return Heatmap(likelihoods, severities, tuple(rows), total=sum(counts.values()))


def heatmap_table(grid: Heatmap) -> Table:
    """Heatmap as a table: one row per likelihood, cells "count (rating)"."""
    rows = []
    for lik, row in zip(grid.likelihoods, grid.cells):
        rows.append((lik,) + tuple(f"{cell.count} ({cell.rating.code})" for cell in row))
    return Table(
        title="Risk Heatmap",
        columns=("Likelihood \\ Severity",) + grid.severities,
        rows=tuple(rows),
    )


@dataclass(frozen=True)
class IterationSummary:
    iteration: lc.Iteration
    statuses: tuple[CaseStatus, ...]
    rating_distribution: tuple[tuple[str, int], ...]  # rating code desc -> count
    tie_groups: tuple[TieGroup, ...]  # unresolved groups at the default levels
    carryover: tuple[lc.Carryover, ...]

    def to_dict(self) -> dict:
        return {
            "index": self.iteration.index,
            "cadence_days": self.iteration.cadence_days,
            "open": self.iteration.is_open,
            "cases": [
                {
                    "case_id": s.case_id,
                    "last_completed": s.last_completed.code if s.last_completed else None,
                    "next_step": s.next_step.code if s.next_step else None,
                    "complete": s.complete,
                    "status": s.describe(),
                }
                for s in self.statuses
            ],
            "rating_distribution": {code: count for code, count in self.rating_distribution},
            "tie_groups": [
                {"rating": g.rating.code, "cases": list(g.case_ids)} for g in self.tie_groups
            ],
            "carryover": [
                {
                    "case_id": c.case_id,
                    "resume_after": c.resume_after.code if c.resume_after else None,
                    "justification": c.justification,
                }
                for c in self.carryover
            ],
        }


def _iteration_case_status(register: Register, case_id: int, iteration_index: int) -> CaseStatus:
    case = register.case(case_id)
    completed = register.completed_steps(case, iteration_index)
    recorded = {r.step for r in case.history if r.iteration == iteration_index}
    return CaseStatus(
        case_id=case_id,
        iteration_index=iteration_index,
        last_completed=lc.last_completed_step(completed),
        next_step=lc.first_missing_step(completed),
        complete=lc.Step.MONITORING in recorded,
    )


def iteration_summary(register: Register, iteration_index: int) -> IterationSummary:
    """Per-case completion, ratings distribution, open tie groups, and
    carryovers for one iteration."""
    iteration = register.iteration(iteration_index)
    statuses = tuple(
        _iteration_case_status(register, case.case_id, iteration_index)
        for case in sorted(register.cases, key=lambda c: c.case_id)
    )
    distribution = Counter(
        case.assessment.rating for case in register.cases if case.assessment is not None
    )
    resolved = {
        session.tie_group
        for session in register.ahp_sessions
        if session.result is not None
    }
    open_groups = tuple(
        group for group in find_tie_groups(register) if group.case_ids not in resolved
    )
    return IterationSummary(
        iteration=iteration,
        statuses=statuses,
        rating_distribution=tuple(
            (rating.code, distribution[rating]) for rating in sorted(distribution, reverse=True)
        ),
        tie_groups=open_groups,
        carryover=iteration.carryover,
    )


def render_iteration_summary(summary: IterationSummary) -> str:
    iteration = summary.iteration
    state = "open" if iteration.is_open else "closed"
    lines = [
        f"Iteration {iteration.index} ({state}, cadence {iteration.cadence_days} days)",
        "",
    ]
    for s in summary.statuses:
        lines.append(f"  case {s.case_id}: {s.describe()}")
    if summary.rating_distribution:
        dist = ", ".join(f"{code}: {count}" for code, count in summary.rating_distribution)
        lines.append("")
        lines.append(f"Ratings: {dist}")
    if summary.tie_groups:
        for group in summary.tie_groups:
            ids = ", ".join(str(c) for c in group.case_ids)
            lines.append(f"Open tie group at {group.rating.code}: {ids}")
    if summary.carryover:
        lines.append("Carryover:")
        for c in summary.carryover:
            resume = c.resume_after.code if c.resume_after else "start"
            lines.append(f"  case {c.case_id}: resumes after {resume} ({c.justification})")
    return "\n".join(lines) + "\n"
