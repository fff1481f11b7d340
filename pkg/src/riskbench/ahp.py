"""Pairwise-comparison tie-breaking for equally rated risks.

Classical eigenvector AHP: judgments on the 1-9 scale go into reciprocal
matrices, priority weights come out of the principal right eigenvector
(power iteration), and the consistency ratio flags sloppy judgment sets.
A session bundles one criteria matrix with one alternatives matrix per
criterion over a tie group of cases, then synthesizes a global ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Iterator, Mapping, Sequence, Union

import numpy as np

from .domain import Rating
from .errors import RiskError

if TYPE_CHECKING:
    from .register import Register

MIN_ITEMS = 2
MAX_ITEMS = 15

# Saaty 1-9 judgment scale: integers 1..9 and their reciprocals.
SAATY_SCALE = frozenset(
    [Fraction(k) for k in range(1, 10)] + [Fraction(1, k) for k in range(2, 10)]
)

# Random consistency indices for n = 1..15. CR = CI / RI compares a judgment
# matrix's inconsistency against random matrices of the same size.
RANDOM_INDEX = {
    1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24, 7: 1.32, 8: 1.41,
    9: 1.45, 10: 1.49, 11: 1.51, 12: 1.48, 13: 1.56, 14: 1.57, 15: 1.59,
}

CR_THRESHOLD = 0.10

POWER_ITERATION_TOL = 1e-12
POWER_ITERATION_MAX = 10_000

RECIPROCITY_TOL = 1e-8

CRITERIA_MATRIX = "criteria"  # reserved judgment-matrix name in a session


class InvalidPairwiseMatrix(RiskError):
    code = "InvalidPairwiseMatrix"


class InvalidJudgment(RiskError):
    code = "InvalidJudgment"


class UnknownMatrix(RiskError):
    code = "UnknownMatrix"

    def __init__(self, name: str, available: tuple[str, ...]):
        super().__init__(
            f"session has no judgment matrix {name!r} (available: {', '.join(available)})",
            name=name,
            available=list(available),
        )


class DimensionMismatch(RiskError):
    code = "DimensionMismatch"


class SessionIncomplete(RiskError):
    code = "SessionIncomplete"

    def __init__(self, missing: dict[str, int]):
        super().__init__(
            "judgments missing: " + ", ".join(f"{name} ({n} pairs)" for name, n in missing.items()),
            missing=missing,
        )


class InconsistentJudgments(RiskError):
    code = "InconsistentJudgments"

    def __init__(self, matrix: str, cr: float):
        super().__init__(
            f"matrix {matrix!r} has CR {cr:.3f} > {CR_THRESHOLD}; revise judgments or "
            "override with a justification",
            matrix=matrix,
            cr=cr,
        )
        self.matrix = matrix
        self.cr = cr


class UnknownSession(RiskError):
    code = "UnknownSession"

    def __init__(self, session_id: int):
        super().__init__(f"no AHP session with id {session_id}", session_id=session_id)


class NotATieGroup(RiskError):
    code = "NotATieGroup"


def parse_judgment(value: Union[str, int, float, Fraction]) -> Fraction:
    """Parse a judgment ("3", "1/3", 3, 0.5) and require it on the 1-9 scale."""
    try:
        if isinstance(value, Fraction):
            judgment = value
        elif isinstance(value, str):
            judgment = Fraction(value.strip())
        elif isinstance(value, int):
            judgment = Fraction(value)
        elif isinstance(value, float):
            judgment = Fraction(value)
        else:
            raise ValueError(f"unsupported judgment type {type(value).__name__}")
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidJudgment(f"cannot read judgment {value!r}: {exc}") from exc
    if judgment not in SAATY_SCALE:
        raise InvalidJudgment(
            f"judgment {value!r} is not on the 1-9 scale (integers 1..9 or reciprocals 1/2..1/9)"
        )
    return judgment


@dataclass(frozen=True)
class PairwiseMatrix:
    """Reciprocal comparison matrix over labelled items.

    Judgments live in the upper triangle as exact rationals (0-based ``(i, j)``
    with ``i < j``); the diagonal is 1 and the lower triangle is derived, so
    reciprocity is exact by construction and survives serialization.
    """

    labels: tuple[str, ...]
    judgments: Mapping[tuple[int, int], Fraction]

    def __post_init__(self) -> None:
        n = len(self.labels)
        if not (MIN_ITEMS <= n <= MAX_ITEMS):
            raise InvalidPairwiseMatrix(f"need {MIN_ITEMS}..{MAX_ITEMS} items, got {n}")
        if len(set(self.labels)) != n or any(not str(l).strip() for l in self.labels):
            raise InvalidPairwiseMatrix(f"labels must be distinct and non-empty: {list(self.labels)}")
        for (i, j), value in self.judgments.items():
            if not (0 <= i < j < n):
                raise InvalidPairwiseMatrix(f"judgment key ({i},{j}) is not upper-triangle for n={n}")
            if not isinstance(value, Fraction) or value <= 0:
                raise InvalidPairwiseMatrix(f"judgment ({i},{j}) must be a positive rational, got {value!r}")

    @classmethod
    def empty(cls, labels: Sequence[str]) -> "PairwiseMatrix":
        return cls(tuple(labels), {})

    @classmethod
    def from_entries(cls, labels: Sequence[str], entries) -> "PairwiseMatrix":
        """Build from a dense positive reciprocal matrix (tolerance 1e-8 on
        a_ij * a_ji = 1); the upper triangle is kept exactly, the rest derived."""
        array = np.asarray(entries, dtype=float)
        _validate_array(array, n_expected=len(labels))
        judgments = {
            (i, j): Fraction(array[i, j])
            for i in range(array.shape[0])
            for j in range(i + 1, array.shape[0])
        }
        return cls(tuple(labels), judgments)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def pair_count(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def missing_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (i, j)
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if (i, j) not in self.judgments
        )

    @property
    def is_complete(self) -> bool:
        return len(self.judgments) == self.pair_count

    def entry(self, i: int, j: int) -> Fraction | None:
        """Exact entry at (i, j); None while the pair is unjudged."""
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise InvalidJudgment(f"indices ({i},{j}) out of range for n={self.n}")
        if i == j:
            return Fraction(1)
        if i < j:
            return self.judgments.get((i, j))
        inverse = self.judgments.get((j, i))
        return None if inverse is None else 1 / inverse

    def with_judgment(self, i: int, j: int, value: Union[str, int, float, Fraction]) -> "PairwiseMatrix":
        """Set the (i, j) judgment; (j, i) becomes the exact reciprocal atomically."""
        if i == j:
            raise InvalidJudgment("diagonal entries are fixed at 1")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise InvalidJudgment(f"indices ({i},{j}) out of range for n={self.n}")
        judgment = parse_judgment(value)
        if i > j:
            i, j, judgment = j, i, 1 / judgment
        updated = dict(self.judgments)
        updated[(i, j)] = judgment
        return replace(self, judgments=updated)

    def to_array(self) -> np.ndarray:
        if not self.is_complete:
            raise InvalidPairwiseMatrix(
                f"matrix is missing {len(self.missing_pairs)} judgment(s); judge all pairs first"
            )
        array = np.ones((self.n, self.n), dtype=float)
        for (i, j), value in self.judgments.items():
            array[i, j] = float(value)
            array[j, i] = float(1 / value)
        return array


def _validate_array(array: np.ndarray, n_expected: int | None = None) -> np.ndarray:
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise InvalidPairwiseMatrix(f"matrix must be square, got shape {array.shape}")
    n = array.shape[0]
    if n_expected is not None and n != n_expected:
        raise InvalidPairwiseMatrix(f"matrix is {n}x{n} but {n_expected} labels were given")
    if not (MIN_ITEMS <= n <= MAX_ITEMS):
        raise InvalidPairwiseMatrix(f"need {MIN_ITEMS}..{MAX_ITEMS} items, got {n}")
    if not np.all(np.isfinite(array)) or np.any(array <= 0):
        raise InvalidPairwiseMatrix("entries must be positive finite reals")
    if np.max(np.abs(np.diag(array) - 1.0)) > 1e-12:
        raise InvalidPairwiseMatrix("diagonal entries must equal 1")
    residual = np.max(np.abs(array * array.T - 1.0))
    if residual > RECIPROCITY_TOL:
        raise InvalidPairwiseMatrix(
            f"not reciprocal: max |a_ij * a_ji - 1| = {residual:.3e} > {RECIPROCITY_TOL}"
        )
    return array


def _as_array(m: Union[PairwiseMatrix, np.ndarray, Sequence[Sequence[float]]]) -> tuple[np.ndarray, tuple[str, ...]]:
    if isinstance(m, PairwiseMatrix):
        return m.to_array(), m.labels
    array = _validate_array(np.asarray(m, dtype=float))
    return array, tuple(str(i + 1) for i in range(array.shape[0]))


@dataclass(frozen=True)
class PriorityVector:
    """Weights summing to 1, aligned with the source matrix labels."""

    labels: tuple[str, ...]
    weights: tuple[float, ...]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.weights))


@dataclass(frozen=True)
class ConsistencyReport:
    """Principal-eigenvalue diagnostics for one judgment matrix.

    ci = (lambda_max - n) / (n - 1); cr = ci / ri (0 for n <= 2);
    acceptable means cr <= 0.10.
    """

    lambda_max: float
    ci: float
    ri: float
    cr: float
    acceptable: bool

    def to_dict(self) -> dict:
        return {
            "lambda_max": self.lambda_max,
            "ci": self.ci,
            "ri": self.ri,
            "cr": self.cr,
            "acceptable": self.acceptable,
        }


def priority_vector(m: Union[PairwiseMatrix, np.ndarray, Sequence[Sequence[float]]]) -> PriorityVector:
    """Principal right eigenvector by power iteration, normalized to sum 1.

    Starts uniform, iterates v <- normalize(M v), and stops when the max-abs
    change drops below 1e-12 (or after 10,000 iterations).
    """
    array, labels = _as_array(m)
    n = array.shape[0]
    v = np.full(n, 1.0 / n)
    for _ in range(POWER_ITERATION_MAX):
        w = array @ v
        w = w / w.sum()
        delta = float(np.max(np.abs(w - v)))
        v = w
        if delta < POWER_ITERATION_TOL:
            break
    return PriorityVector(labels, tuple(float(x) for x in v))


def consistency(m: Union[PairwiseMatrix, np.ndarray, Sequence[Sequence[float]]]) -> ConsistencyReport:
    """Consistency diagnostics: lambda_max is the mean of (M w)_i / w_i."""
    array, _ = _as_array(m)
    n = array.shape[0]
    w = np.asarray(priority_vector(array).weights)
    lambda_max = float(np.mean((array @ w) / w))
    ci = (lambda_max - n) / (n - 1)
    ri = RANDOM_INDEX[n]
    cr = ci / ri if n >= 3 else 0.0
    return ConsistencyReport(lambda_max, ci, ri, cr, acceptable=cr <= CR_THRESHOLD)


def synthesize(criteria_weights: PriorityVector, local: Sequence[PriorityVector]) -> PriorityVector:
    """Global scores: weighted sum of per-criterion local priorities."""
    if len(local) != len(criteria_weights.weights):
        raise DimensionMismatch(
            f"{len(criteria_weights.weights)} criteria weights but {len(local)} local vectors"
        )
    if not local:
        raise DimensionMismatch("need at least one local priority vector")
    alt_labels = local[0].labels
    for vector in local:
        if vector.labels != alt_labels:
            raise DimensionMismatch(
                f"local vectors disagree on alternatives: {vector.labels} vs {alt_labels}"
            )
    scores = np.zeros(len(alt_labels))
    for weight, vector in zip(criteria_weights.weights, local):
        scores += weight * np.asarray(vector.weights)
    return PriorityVector(alt_labels, tuple(float(s) for s in scores))


# --------------------------------------------------------------------------
# Sessions


class SessionStatus(Enum):
    DRAFT = "Draft"
    COMPLETE = "Complete"

    @property
    def code(self) -> str:
        return self.value


@dataclass(frozen=True)
class RankedCase:
    case_id: int
    score: float


@dataclass(frozen=True)
class AhpResult:
    ranking: tuple[RankedCase, ...]
    criteria_weights: tuple[float, ...]
    consistency: Mapping[str, float]  # judgment-matrix name -> CR


@dataclass(frozen=True)
class AhpSession:
    """One tie-breaking exercise over a group of equally rated cases.

    ``criteria_matrix`` is None for single-criterion sessions (the weight is
    trivially 1). Alternatives matrices are labelled with the tie group's case
    ids, one matrix per criterion, all in the same order.
    """

    session_id: int
    tie_group: tuple[int, ...]
    rating: Rating
    criteria: tuple[str, ...]
    criteria_matrix: PairwiseMatrix | None
    alternative_matrices: tuple[PairwiseMatrix, ...]
    cr_overrides: Mapping[str, str]
    status: SessionStatus
    result: AhpResult | None

    @classmethod
    def draft(cls, session_id: int, tie_group: Sequence[int], rating: Rating, criteria: Sequence[str]) -> "AhpSession":
        names = tuple(c.strip() for c in criteria)
        if not names or any(not n for n in names):
            raise NotATieGroup("criteria names must be non-empty")
        if len(set(names)) != len(names):
            raise NotATieGroup(f"criteria names must be distinct: {list(names)}")
        if CRITERIA_MATRIX in names:
            raise NotATieGroup(f"{CRITERIA_MATRIX!r} is reserved for the criteria matrix itself")
        group = tuple(tie_group)
        if len(group) < 2 or len(set(group)) != len(group):
            raise NotATieGroup(f"a tie group needs at least two distinct cases, got {list(group)}")
        alt_labels = tuple(str(cid) for cid in group)
        return cls(
            session_id=session_id,
            tie_group=group,
            rating=rating,
            criteria=names,
            criteria_matrix=PairwiseMatrix.empty(names) if len(names) > 1 else None,
            alternative_matrices=tuple(PairwiseMatrix.empty(alt_labels) for _ in names),
            cr_overrides={},
            status=SessionStatus.DRAFT,
            result=None,
        )

    def matrices(self) -> Iterator[tuple[str, PairwiseMatrix]]:
        if self.criteria_matrix is not None:
            yield CRITERIA_MATRIX, self.criteria_matrix
        for name, matrix in zip(self.criteria, self.alternative_matrices):
            yield name, matrix

    def matrix_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.matrices())

    def with_judgment(self, matrix_name: str, i: int, j: int, value) -> "AhpSession":
        """Apply one upper-triangle judgment (0-based indices) to the named matrix."""
        if self.status is SessionStatus.COMPLETE:
            raise InvalidJudgment(f"session {self.session_id} is already complete")
        if matrix_name == CRITERIA_MATRIX:
            if self.criteria_matrix is None:
                raise UnknownMatrix(matrix_name, self.matrix_names())
            return replace(self, criteria_matrix=self.criteria_matrix.with_judgment(i, j, value))
        if matrix_name not in self.criteria:
            raise UnknownMatrix(matrix_name, self.matrix_names())
        index = self.criteria.index(matrix_name)
        matrices = list(self.alternative_matrices)
        matrices[index] = matrices[index].with_judgment(i, j, value)
        return replace(self, alternative_matrices=tuple(matrices))


def find_tie_groups(register: "Register", levels: set[Rating] | None = None) -> tuple["TieGroup", ...]:
    """Groups of two or more assessed cases sharing a rating in ``levels``.

    Breaking ties is only worth the team's time at the top of the ranking, so
    the default looks at Critical only.
    """
    if levels is None:
        levels = {Rating.CRITICAL}
    by_rating: dict[Rating, list[int]] = {}
    for case in register.cases:
        if case.assessment is not None and case.assessment.rating in levels:
            by_rating.setdefault(case.assessment.rating, []).append(case.case_id)
    groups = [
        TieGroup(rating, tuple(sorted(ids)))
        for rating, ids in by_rating.items()
        if len(ids) >= 2
    ]
    groups.sort(key=lambda g: g.rating, reverse=True)
    return tuple(groups)


@dataclass(frozen=True)
class TieGroup:
    rating: Rating
    case_ids: tuple[int, ...]


def rank_session(session: AhpSession, overrides: Mapping[str, str] | None = None) -> AhpSession:
    """Check judgments and consistency, then synthesize the final ranking.

    Every matrix must be fully judged; every CR above 0.10 must carry an
    override justification (kept on the session for the audit trail). Scores
    sort descending, exact ties break by case id ascending.
    """
    merged = dict(session.cr_overrides)
    for name, justification in (overrides or {}).items():
        if justification.strip():
            merged[name] = justification.strip()

    missing = {name: len(m.missing_pairs) for name, m in session.matrices() if not m.is_complete}
    if missing:
        raise SessionIncomplete(missing)

    crs: dict[str, float] = {}
    for name, matrix in session.matrices():
        report = consistency(matrix)
        crs[name] = report.cr
        if not report.acceptable and name not in merged:
            raise InconsistentJudgments(name, report.cr)

    if session.criteria_matrix is not None:
        criteria_weights = priority_vector(session.criteria_matrix)
    else:
        criteria_weights = PriorityVector(session.criteria, (1.0,))
    locals_ = [priority_vector(m) for m in session.alternative_matrices]
    global_scores = synthesize(criteria_weights, locals_)

    scored = sorted(
        zip(session.tie_group, global_scores.weights),
        key=lambda pair: (-pair[1], pair[0]),
    )
    result = AhpResult(
        ranking=tuple(RankedCase(cid, score) for cid, score in scored),
        criteria_weights=criteria_weights.weights,
        consistency=crs,
    )
    return replace(session, status=SessionStatus.COMPLETE, result=result, cr_overrides=merged)
