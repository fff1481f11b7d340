"""Configurable rating matrix: (likelihood, severity) -> rating lookups,
matrix validity checking, and register-wide recomputation after a change.

Axes are ordered code lists (ascending). The team may drop or add levels, but
a valid grid must stay complete and monotone in both directions: a non-
monotone matrix makes ratings incoherent, so candidates failing the check are
rejected with diagnostics rather than warned about.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, ClassVar, Mapping, Union

from .domain import Likelihood, Rating, Severity
from .errors import RiskError

if TYPE_CHECKING:
    from .register import Register

Cell = tuple[str, str]  # (likelihood code, severity code)


class LevelNotOnAxis(RiskError):
    code = "LevelNotOnAxis"

    def __init__(self, axis: str, level: str, available: tuple[str, ...]):
        super().__init__(
            f"{level!r} is not on the {axis} axis {list(available)}",
            axis=axis,
            level=level,
            available=list(available),
        )


class InvalidMatrix(RiskError):
    code = "InvalidMatrix"

    def __init__(self, violations: tuple["MatrixViolation", ...]):
        super().__init__(
            "; ".join(v.message for v in violations),
            violations=[v.to_dict() for v in violations],
        )
        self.violations = violations


@dataclass(frozen=True)
class AxisViolation:
    code: ClassVar[str] = "AxisViolation"
    axis: str
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "axis": self.axis, "message": self.message}


@dataclass(frozen=True)
class IncompleteGrid:
    code: ClassVar[str] = "IncompleteGrid"
    missing: tuple[Cell, ...]
    extra: tuple[Cell, ...]

    @property
    def message(self) -> str:
        parts = []
        if self.missing:
            parts.append(f"missing cells {[f'({l},{s})' for l, s in self.missing]}")
        if self.extra:
            parts.append(f"cells off the axes {[f'({l},{s})' for l, s in self.extra]}")
        return "grid is not a complete rectangle: " + ", ".join(parts)

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "missing": [list(c) for c in self.missing],
            "extra": [list(c) for c in self.extra],
            "message": self.message,
        }


@dataclass(frozen=True)
class MonotonicityViolation:
    """A cell pair where the rating decreases while likelihood or severity increases."""

    code: ClassVar[str] = "MonotonicityViolation"
    lower_cell: Cell
    higher_cell: Cell
    lower_rating: Rating
    higher_rating: Rating

    @property
    def message(self) -> str:
        return (
            f"rating drops from {self.lower_rating.code} at ({self.lower_cell[0]},{self.lower_cell[1]}) "
            f"to {self.higher_rating.code} at ({self.higher_cell[0]},{self.higher_cell[1]})"
        )

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "lower_cell": list(self.lower_cell),
            "higher_cell": list(self.higher_cell),
            "lower_rating": self.lower_rating.code,
            "higher_rating": self.higher_rating.code,
            "message": self.message,
        }


MatrixViolation = Union[AxisViolation, IncompleteGrid, MonotonicityViolation]


@dataclass(frozen=True)
class RatingMatrix:
    """Grid assigning a Rating to every (likelihood, severity) pair.

    Both axes are ascending; cells are keyed by (likelihood code, severity
    code). Values are immutable after construction; changes go through
    register commits so prior ratings stay in the audit log.
    """

    name: str
    version: int
    likelihood_axis: tuple[str, ...]
    severity_axis: tuple[str, ...]
    cells: Mapping[Cell, Rating]

    @classmethod
    def from_rows(
        cls,
        name: str,
        likelihood_axis: tuple[str, ...],
        severity_axis: tuple[str, ...],
        rows: Mapping[str, str],
        version: int = 1,
    ) -> "RatingMatrix":
        """Build a matrix from per-likelihood rows of space-separated rating
        codes given in *descending* severity order (the presentation layout)."""
        from .domain import parse_rating

        cells: dict[Cell, Rating] = {}
        severities_desc = tuple(reversed(severity_axis))
        for lik, row in rows.items():
            codes = row.split()
            for sev, code in zip(severities_desc, codes):
                cells[(lik, sev)] = parse_rating(code)
        return cls(name, version, likelihood_axis, severity_axis, cells)


def default_matrix() -> RatingMatrix:
    """The standard 5x4 grid. Rows are likelihood VH..N, columns severity C H M L."""
    return RatingMatrix.from_rows(
        "default",
        likelihood_axis=("N", "L", "M", "H", "VH"),
        severity_axis=("L", "M", "H", "C"),
        rows={
            "VH": "C C H M",
            "H": "C C H L",
            "M": "H H M L",
            "L": "M M L L",
            "N": "L L L L",
        },
    )


def _code(level: Likelihood | Severity | str) -> str:
    if isinstance(level, (Likelihood, Severity)):
        return level.code
    return str(level)


def rate(matrix: RatingMatrix, likelihood: Likelihood | str, severity: Severity | str) -> Rating:
    """Pure cell lookup; raises LevelNotOnAxis when a level is not on the grid."""
    lik, sev = _code(likelihood), _code(severity)
    if lik not in matrix.likelihood_axis:
        raise LevelNotOnAxis("likelihood", lik, matrix.likelihood_axis)
    if sev not in matrix.severity_axis:
        raise LevelNotOnAxis("severity", sev, matrix.severity_axis)
    rating = matrix.cells.get((lik, sev))
    if rating is None:
        raise InvalidMatrix((IncompleteGrid(missing=((lik, sev),), extra=()),))
    return rating


_CANONICAL_ORDER = {
    "likelihood": tuple(level.code for level in Likelihood),
    "severity": tuple(level.code for level in Severity),
}


def _check_axis(violations: list[MatrixViolation], axis_name: str, axis: tuple[str, ...]) -> bool:
    ok = True
    if not axis:
        violations.append(AxisViolation(axis_name, f"{axis_name} axis is empty"))
        ok = False
    if len(set(axis)) != len(axis):
        violations.append(AxisViolation(axis_name, f"{axis_name} axis repeats a level"))
        ok = False
    if any(not str(code).strip() for code in axis):
        violations.append(AxisViolation(axis_name, f"{axis_name} axis contains a blank level code"))
        ok = False
    # Known levels must keep their canonical relative order; extension levels
    # take whatever position the axis list gives them.
    canonical = _CANONICAL_ORDER[axis_name]
    known = [code for code in axis if code in canonical]
    if [c for c in canonical if c in known] != known:
        violations.append(
            AxisViolation(axis_name, f"{axis_name} axis reorders standard levels {known}")
        )
        ok = False
    return ok


def validate_matrix(candidate: RatingMatrix) -> tuple[MatrixViolation, ...]:
    """Return every violated matrix invariant; empty means the grid is valid."""
    violations: list[MatrixViolation] = []
    axes_ok = _check_axis(violations, "likelihood", candidate.likelihood_axis)
    axes_ok = _check_axis(violations, "severity", candidate.severity_axis) and axes_ok
    if not isinstance(candidate.version, int) or candidate.version < 1:
        violations.append(AxisViolation("version", "version must be a positive integer"))

    expected = {(l, s) for l in candidate.likelihood_axis for s in candidate.severity_axis}
    actual = set(candidate.cells)
    missing = tuple(sorted(expected - actual))
    extra = tuple(sorted(actual - expected))
    if missing or extra:
        violations.append(IncompleteGrid(missing=missing, extra=extra))
        return tuple(violations)
    if not axes_ok:
        return tuple(violations)

    # Adjacent-pair scan along both axes; transitivity covers the rest.
    for sev in candidate.severity_axis:
        for li in range(len(candidate.likelihood_axis) - 1):
            low, high = candidate.likelihood_axis[li], candidate.likelihood_axis[li + 1]
            a, b = candidate.cells[(low, sev)], candidate.cells[(high, sev)]
            if a > b:
                violations.append(MonotonicityViolation((low, sev), (high, sev), a, b))
    for lik in candidate.likelihood_axis:
        for si in range(len(candidate.severity_axis) - 1):
            low, high = candidate.severity_axis[si], candidate.severity_axis[si + 1]
            a, b = candidate.cells[(lik, low)], candidate.cells[(lik, high)]
            if a > b:
                violations.append(MonotonicityViolation((lik, low), (lik, high), a, b))
    return tuple(violations)


@dataclass(frozen=True)
class RatingChange:
    case_id: int
    old: Rating
    new: Rating

    def to_dict(self) -> dict:
        return {"case_id": self.case_id, "old": self.old.code, "new": self.new.code}


def recompute_ratings(
    register: "Register", matrix: RatingMatrix
) -> tuple["Register", tuple[RatingChange, ...]]:
    """Install ``matrix`` (version bumped past the active one) and recompute
    every assessed case's rating.

    Returns the updated register and the list of rating changes. An invalid
    candidate, or one whose axes no longer cover an assessed level, rejects
    the whole operation and leaves the register untouched.
    """
    violations = validate_matrix(matrix)
    if violations:
        raise InvalidMatrix(violations)
    installed = replace(matrix, version=register.matrix.version + 1)
    changes: list[RatingChange] = []
    cases = []
    for case in register.cases:
        assessment = case.assessment
        if assessment is None:
            cases.append(case)
            continue
        new_rating = rate(installed, assessment.likelihood, assessment.severity)
        if new_rating != assessment.rating:
            changes.append(RatingChange(case.case_id, assessment.rating, new_rating))
            case = replace(case, assessment=replace(assessment, rating=new_rating))
        cases.append(case)
    updated = replace(register, matrix=installed, cases=tuple(cases))
    return updated, tuple(changes)
