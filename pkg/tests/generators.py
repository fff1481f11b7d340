"""Shared random generators and small builders used across the test modules."""

from __future__ import annotations

import random
from datetime import date, datetime, timedelta, timezone

import numpy as np

from riskbench.ahp import SAATY_SCALE, find_tie_groups
from riskbench.domain import (
    ImpactSet,
    Impact,
    Likelihood,
    Locus,
    Rating,
    RiskOrigin,
    RiskType,
    Segment,
    Severity,
    parse_decision,
)
from riskbench.lifecycle import (
    ActionItem,
    Effectiveness,
    MonitoringRecord,
    Step,
    TreatmentPlan,
    first_missing_step,
)
from riskbench.rating import RatingMatrix, default_matrix
from riskbench.register import (
    Register,
    add_case,
    close_iteration,
    commit,
    complete_ahp_session,
    create_ahp_session,
    judge_ahp,
    new_register,
    open_iteration,
    record_assessment,
    record_evaluation,
    record_monitoring,
    record_profile,
    record_treatment,
    set_matrix,
)

SAATY_CHOICES = sorted(SAATY_SCALE)

_WORDS = (
    "relay", "uplink", "battery", "beacon", "payload", "route", "sensor",
    "operator", "ground", "airframe", "firmware", "antenna", "cloud", "manifest",
)


def words(rng: random.Random, n: int = 3) -> str:
    return " ".join(rng.choice(_WORDS) for _ in range(n))


def random_impact(rng: random.Random) -> ImpactSet:
    members = rng.sample(list(Impact), rng.randint(1, 4))
    return ImpactSet(frozenset(members))


def random_locus(rng: random.Random) -> Locus:
    return Locus(frozenset(rng.sample(list(Segment), rng.randint(1, 2))))


def random_risk_type(rng: random.Random) -> RiskType:
    return RiskType(frozenset(rng.sample(list(RiskOrigin), rng.randint(1, 2))))


class Clock:
    """Deterministic commit timestamps."""

    def __init__(self, start: datetime | None = None):
        self.now = start or datetime(2024, 1, 8, 8, 0, 0, tzinfo=timezone.utc)

    def tick(self, minutes: int = 7) -> datetime:
        self.now += timedelta(minutes=minutes)
        return self.now


def open_register(cadence: int = 21, clock: Clock | None = None) -> tuple[Register, Clock]:
    clock = clock or Clock()
    register, _ = commit(
        new_register(), open_iteration(cadence), actor="team", timestamp=clock.tick()
    )
    return register, clock


def add_simple_case(
    register: Register, clock: Clock, *, case_id: int | None = None, asset: str = "GCS uplink"
) -> Register:
    register, _ = commit(
        register,
        add_case(
            locus=Locus.of(Segment.GROUND),
            asset=asset,
            risk_type=RiskType.of(RiskOrigin.EXTERNAL),
            description="signal degradation under interference",
            consequence="lost telemetry",
            documentation="profiled in review",
            actor="team",
            case_id=case_id,
        ),
        actor="team",
        timestamp=clock.tick(),
    )
    return register


def step_mutation(rng: random.Random, case_id: int, step: Step):
    """A valid mutation for recording `step` on `case_id` with random content."""
    if step is Step.PROFILE:
        return record_profile(
            case_id,
            locus=random_locus(rng),
            asset=words(rng, 2),
            risk_type=random_risk_type(rng),
            description=words(rng, 4),
            consequence=words(rng, 2),
            documentation=words(rng),
            actor="team",
        )
    if step is Step.ASSESSMENT:
        return record_assessment(
            case_id,
            vulnerability=words(rng),
            threat=words(rng),
            threat_agent=words(rng, 2),
            impact=random_impact(rng),
            likelihood=rng.choice(list(Likelihood)),
            severity=rng.choice(list(Severity)),
            documentation=words(rng),
            actor="team",
        )
    if step is Step.EVALUATION:
        return record_evaluation(
            case_id,
            decision=parse_decision(rng.choice(["accept", "avoid", "transfer", "mitigate"])),
            solution=words(rng),
            documentation=words(rng),
            actor="team",
        )
    if step is Step.TREATMENT:
        plan = TreatmentPlan(
            actions=(
                ActionItem(text=words(rng), owner=words(rng, 1), due=date(2024, 6, 1)),
            ),
            controls=(words(rng, 2),),
            validation_note=words(rng, 2),
        )
        return record_treatment(case_id, plan=plan, documentation=words(rng), actor="team")
    if step is Step.MONITORING:
        record = MonitoringRecord(
            observation=words(rng),
            effective=rng.choice(list(Effectiveness)),
            reviewed_by=words(rng, 1),
        )
        return record_monitoring(case_id, record=record, documentation=words(rng), actor="team")
    raise AssertionError(f"no mutation builder for {step}")


# ---------------------------------------------------------------------------
# Rating matrices


def _random_axis(rng: random.Random, codes: tuple[str, ...]) -> tuple[str, ...]:
    while True:
        axis = tuple(code for code in codes if rng.random() < 0.8)
        if len(axis) >= 2:
            return axis


def random_monotone_matrix(
    rng: random.Random, name: str = "random", full_axes: bool = False
) -> RatingMatrix:
    """A valid matrix; axes are random sub-axes of the standard scales unless
    ``full_axes`` keeps every level (needed when assessments already use them)."""
    if full_axes:
        likelihood_axis = ("N", "L", "M", "H", "VH")
        severity_axis = ("L", "M", "H", "C")
    else:
        likelihood_axis = _random_axis(rng, ("N", "L", "M", "H", "VH"))
        severity_axis = _random_axis(rng, ("L", "M", "H", "C"))
    ratings = list(Rating)
    grid: dict[tuple[str, str], Rating] = {}
    for i, lik in enumerate(likelihood_axis):
        for j, sev in enumerate(severity_axis):
            floor = 0
            if i > 0:
                floor = max(floor, ratings.index(grid[(likelihood_axis[i - 1], sev)]))
            if j > 0:
                floor = max(floor, ratings.index(grid[(lik, severity_axis[j - 1])]))
            grid[(lik, sev)] = ratings[rng.randint(floor, 3)]
    return RatingMatrix(
        name=name,
        version=1,
        likelihood_axis=likelihood_axis,
        severity_axis=severity_axis,
        cells=grid,
    )


def corrupt_monotonicity(rng: random.Random, matrix: RatingMatrix) -> RatingMatrix:
    """Break monotonicity at one random adjacent cell pair."""
    ratings = list(Rating)
    cells = dict(matrix.cells)
    axes: list[tuple[tuple[str, str], tuple[str, str]]] = []
    for si in range(len(matrix.severity_axis)):
        for li in range(len(matrix.likelihood_axis) - 1):
            axes.append(
                (
                    (matrix.likelihood_axis[li], matrix.severity_axis[si]),
                    (matrix.likelihood_axis[li + 1], matrix.severity_axis[si]),
                )
            )
    for li in range(len(matrix.likelihood_axis)):
        for si in range(len(matrix.severity_axis) - 1):
            axes.append(
                (
                    (matrix.likelihood_axis[li], matrix.severity_axis[si]),
                    (matrix.likelihood_axis[li], matrix.severity_axis[si + 1]),
                )
            )
    lower, higher = rng.choice(axes)
    low_rank = ratings.index(cells[lower])
    if low_rank == 0:
        low_rank = rng.randint(1, 3)
        cells[lower] = ratings[low_rank]
    cells[higher] = ratings[rng.randint(0, low_rank - 1)]
    return RatingMatrix(
        name=matrix.name + "-corrupt",
        version=matrix.version,
        likelihood_axis=matrix.likelihood_axis,
        severity_axis=matrix.severity_axis,
        cells=cells,
    )


def monotone_oracle(matrix: RatingMatrix) -> bool:
    """Brute force: every comparable cell pair must be ordered."""
    lik, sev = matrix.likelihood_axis, matrix.severity_axis
    for i1 in range(len(lik)):
        for j1 in range(len(sev)):
            for i2 in range(i1, len(lik)):
                for j2 in range(j1, len(sev)):
                    if matrix.cells[(lik[i1], sev[j1])] > matrix.cells[(lik[i2], sev[j2])]:
                        return False
    return True


# ---------------------------------------------------------------------------
# AHP matrices


def random_saaty_array(rng: random.Random, n: int) -> np.ndarray:
    matrix = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            value = float(rng.choice(SAATY_CHOICES))
            matrix[i, j] = value
            matrix[j, i] = 1.0 / value
    return matrix


def consistent_array(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    weights = rng.uniform(0.05, 10.0, size=n)
    return weights[:, None] / weights[None, :], weights / weights.sum()


# ---------------------------------------------------------------------------
# Whole random registers


def random_register(rng: random.Random) -> Register:
    """A register built through the commit machinery with random content:
    several iterations, carryovers, all payload types, sessions, matrix swaps."""
    clock = Clock(datetime(2024, 2, 5, 9, 0, 0, tzinfo=timezone.utc))
    register = new_register()
    n_iterations = rng.randint(1, 3)
    for iteration_round in range(n_iterations):
        register, _ = commit(
            register,
            open_iteration(rng.choice([7, 14, 21, 28, 45])),
            actor="team",
            timestamp=clock.tick(),
        )
        for _ in range(rng.randint(0, 3)):
            register, _ = commit(
                register,
                add_case(
                    locus=random_locus(rng),
                    asset=words(rng, 2),
                    risk_type=random_risk_type(rng),
                    description=words(rng, 4),
                    consequence=words(rng, 2),
                    documentation=words(rng),
                    actor="team",
                ),
                actor="team",
                timestamp=clock.tick(),
            )
        # walk cases forward a random number of steps
        iteration = register.open_iteration()
        for case_id in [c.case_id for c in register.cases]:
            while rng.random() >= 0.35:
                completed = register.completed_steps(register.case(case_id), iteration.index)
                next_step = first_missing_step(completed)
                if next_step is None:
                    break
                register, _ = commit(
                    register,
                    step_mutation(rng, case_id, next_step),
                    actor="team",
                    timestamp=clock.tick(),
                )
        if rng.random() < 0.3:
            register, _ = commit(
                register,
                set_matrix(random_monotone_matrix(rng, full_axes=True)),
                actor="team",
                timestamp=clock.tick(),
            )
        if rng.random() < 0.5:
            groups = find_tie_groups(register, set(Rating))
            if groups:
                group = rng.choice(groups)
                criteria = [f"criterion-{k}" for k in range(rng.randint(1, 3))]
                register, session = commit(
                    register,
                    create_ahp_session(group.case_ids, criteria),
                    actor="team",
                    timestamp=clock.tick(),
                )
                if rng.random() < 0.8:
                    for name, matrix in session.matrices():
                        for i, j in matrix.missing_pairs:
                            register, _ = commit(
                                register,
                                judge_ahp(
                                    session.session_id, name, i, j, rng.choice(SAATY_CHOICES)
                                ),
                                actor="team",
                                timestamp=clock.tick(),
                            )
                    overrides = {
                        name: "accepted for the drill"
                        for name, _ in session.matrices()
                    }
                    register, _ = commit(
                        register,
                        complete_ahp_session(session.session_id, overrides),
                        actor="team",
                        timestamp=clock.tick(),
                    )
        close_now = iteration_round < n_iterations - 1 or rng.random() < 0.5
        if close_now:
            iteration = register.open_iteration()
            overrides = {}
            for case in register.cases:
                recorded = {r.step for r in case.history if r.iteration == iteration.index}
                if Step.MONITORING not in recorded:
                    overrides[case.case_id] = "carry into the next cycle"
            register, _ = commit(
                register,
                close_iteration(overrides),
                actor="team",
                timestamp=clock.tick(),
            )
    return register
