"""Core vocabulary of the workbench: qualitative scales, impact sets, and the
profile/assessment/evaluation records every other module builds on.

Canonical short codes ("VH", "C", "E/I", "CIAa", ...) are the contract shared
by the register file format, the CLI, and the HTTP API. Parsing is
case-insensitive and accepts full level names; rendering always emits the
short codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import total_ordering
from typing import Iterator

from .errors import RiskError


class EmptyImpact(RiskError):
    code = "EmptyImpact"

    def __init__(self) -> None:
        super().__init__("impact set must name at least one of C, I, A, a")


class UnknownImpactLetter(RiskError):
    code = "UnknownImpactLetter"

    def __init__(self, letter: str):
        super().__init__(f"unknown impact letter {letter!r} (expected C, I, A or a)", letter=letter)
        self.letter = letter


class AmbiguousAccountability(RiskError):
    code = "AmbiguousAccountability"

    def __init__(self, text: str):
        super().__init__(
            f"impact {text!r} repeats uppercase 'A'; accountability is lowercase 'a' "
            "(pass strict=False to read the second 'A' as accountability)",
            text=text,
        )


class UnknownLevel(RiskError):
    code = "UnknownLevel"

    def __init__(self, text: str, kind: str):
        super().__init__(f"{text!r} is not a {kind}", text=text, kind=kind)


class InvalidProfile(RiskError):
    code = "InvalidProfile"

    def __init__(self, violations: tuple[Violation, ...]):
        super().__init__(
            "; ".join(v.message for v in violations),
            violations=[v.to_dict() for v in violations],
        )
        self.violations = violations


class InvalidPayload(RiskError):
    """A step payload (assessment, evaluation, treatment, monitoring) failed validation."""

    code = "InvalidPayload"

    def __init__(self, step: str, violations: tuple[Violation, ...]):
        super().__init__(
            f"{step}: " + "; ".join(v.message for v in violations),
            step=step,
            violations=[v.to_dict() for v in violations],
        )
        self.violations = violations


@dataclass(frozen=True)
class Violation:
    """One violated field invariant. Validation results are data, not failures."""

    code: str
    field: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {"code": self.code, "field": self.field, "message": self.message}


@total_ordering
class OrderedLevel(Enum):
    """Enum base whose members are totally ordered by declaration order."""

    def __lt__(self, other: object) -> bool:
        if self.__class__ is not other.__class__:
            return NotImplemented
        members = list(self.__class__)
        return members.index(self) < members.index(other)  # type: ignore[arg-type]

    @property
    def code(self) -> str:
        return self.value

    def __str__(self) -> str:
        return self.value


class Likelihood(OrderedLevel):
    """Five-level probability scale, N < L < M < H < VH."""

    NEGLIGIBLE = "N"
    LOW = "L"
    MODERATE = "M"
    HIGH = "H"
    VERY_HIGH = "VH"

    @property
    def nominal_probability(self) -> float:
        """Nominal probability annotation (N is "around one percent", etc.)."""
        return _NOMINAL_PROBABILITY[self]


_NOMINAL_PROBABILITY = {
    Likelihood.NEGLIGIBLE: 0.01,
    Likelihood.LOW: 0.25,
    Likelihood.MODERATE: 0.50,
    Likelihood.HIGH: 0.75,
    Likelihood.VERY_HIGH: 1.00,
}


class Severity(OrderedLevel):
    """Four-level impact scale, L < M < H < C."""

    LOW = "L"
    MODERATE = "M"
    HIGH = "H"
    CRITICAL = "C"


class Rating(OrderedLevel):
    """Four-level risk rating produced by the matrix lookup, L < M < H < C."""

    LOW = "L"
    MODERATE = "M"
    HIGH = "H"
    CRITICAL = "C"


class Decision(Enum):
    """The four evaluation outcomes."""

    ACCEPT = "Accept"
    AVOID = "Avoid"
    TRANSFER = "Transfer"
    MITIGATE = "Mitigate"

    @property
    def code(self) -> str:
        return self.value

    def __str__(self) -> str:
        return self.value


class Impact(Enum):
    """One letter of the C-I-A-A quadruple. Accountability is lowercase 'a'."""

    CONFIDENTIALITY = "C"
    INTEGRITY = "I"
    AVAILABILITY = "A"
    ACCOUNTABILITY = "a"


_IMPACT_ORDER = (
    Impact.CONFIDENTIALITY,
    Impact.INTEGRITY,
    Impact.AVAILABILITY,
    Impact.ACCOUNTABILITY,
)


@dataclass(frozen=True)
class ImpactSet:
    """Non-empty subset of the C-I-A-A quadruple, rendered in C, I, A, a order."""

    members: frozenset[Impact]

    def render(self) -> str:
        return "".join(m.value for m in _IMPACT_ORDER if m in self.members)

    def __contains__(self, impact: Impact) -> bool:
        return impact in self.members

    def __iter__(self) -> Iterator[Impact]:
        return iter(m for m in _IMPACT_ORDER if m in self.members)

    def __len__(self) -> int:
        return len(self.members)

    @classmethod
    def of(cls, *impacts: Impact) -> "ImpactSet":
        return cls(frozenset(impacts))


class RiskOrigin(Enum):
    """Where a risk originates relative to the organization."""

    EXTERNAL = "E"
    INTERNAL = "I"


@dataclass(frozen=True)
class RiskType:
    """Non-empty subset of {External, Internal}; renders "E", "I" or "E/I"."""

    members: frozenset[RiskOrigin]

    def render(self) -> str:
        return "/".join(m.value for m in (RiskOrigin.EXTERNAL, RiskOrigin.INTERNAL) if m in self.members)

    def __contains__(self, origin: RiskOrigin) -> bool:
        return origin in self.members

    @classmethod
    def of(cls, *origins: RiskOrigin) -> "RiskType":
        return cls(frozenset(origins))


class Segment(Enum):
    """Operational segment a risk touches: the air side or the ground side."""

    AIR = "A"
    GROUND = "G"


@dataclass(frozen=True)
class Locus:
    """Non-empty subset of {Air, Ground}; renders "A", "G" or "A/G"."""

    members: frozenset[Segment]

    def render(self) -> str:
        return "/".join(m.value for m in (Segment.AIR, Segment.GROUND) if m in self.members)

    def __contains__(self, segment: Segment) -> bool:
        return segment in self.members

    @classmethod
    def of(cls, *segments: Segment) -> "Locus":
        return cls(frozenset(segments))


@dataclass(frozen=True)
class RiskProfile:
    """First-step record of a risk: where it occurs, the affected asset, its
    origin, and free-text description/consequence."""

    case_id: int
    locus: Locus
    asset: str
    risk_type: RiskType
    description: str
    consequence: str


@dataclass(frozen=True)
class RiskAssessment:
    """Second-step record. ``rating`` is always derived from the active matrix,
    never hand-entered; it is recomputed whenever the matrix changes."""

    vulnerability: str
    threat: str
    threat_agent: str
    impact: ImpactSet
    likelihood: Likelihood
    severity: Severity
    rating: Rating


@dataclass(frozen=True)
class RiskEvaluation:
    """Third-step record: the decision taken and its concrete solution."""

    decision: Decision
    solution: str


# --------------------------------------------------------------------------
# Parsing


def _normalize(text: str) -> str:
    return "".join(ch for ch in text.lower() if not ch.isspace() and ch not in "-_")


_LIKELIHOOD_TOKENS = {
    "n": Likelihood.NEGLIGIBLE,
    "negligible": Likelihood.NEGLIGIBLE,
    "l": Likelihood.LOW,
    "low": Likelihood.LOW,
    "m": Likelihood.MODERATE,
    "moderate": Likelihood.MODERATE,
    "h": Likelihood.HIGH,
    "high": Likelihood.HIGH,
    "vh": Likelihood.VERY_HIGH,
    "veryhigh": Likelihood.VERY_HIGH,
}

_SEVERITY_TOKENS = {
    "l": "LOW",
    "low": "LOW",
    "m": "MODERATE",
    "moderate": "MODERATE",
    "h": "HIGH",
    "high": "HIGH",
    "c": "CRITICAL",
    "critical": "CRITICAL",
}

_DECISION_TOKENS = {
    "accept": Decision.ACCEPT,
    "acceptance": Decision.ACCEPT,
    "accepting": Decision.ACCEPT,
    "avoid": Decision.AVOID,
    "avoidance": Decision.AVOID,
    "avoiding": Decision.AVOID,
    "transfer": Decision.TRANSFER,
    "transferring": Decision.TRANSFER,
    "mitigate": Decision.MITIGATE,
    "mitigation": Decision.MITIGATE,
    "mitigating": Decision.MITIGATE,
}


def parse_likelihood(text: str) -> Likelihood:
    level = _LIKELIHOOD_TOKENS.get(_normalize(text))
    if level is None:
        raise UnknownLevel(text, "likelihood level")
    return level


def parse_severity(text: str) -> Severity:
    name = _SEVERITY_TOKENS.get(_normalize(text))
    if name is None:
        raise UnknownLevel(text, "severity level")
    return Severity[name]


def parse_rating(text: str) -> Rating:
    name = _SEVERITY_TOKENS.get(_normalize(text))
    if name is None:
        raise UnknownLevel(text, "rating level")
    return Rating[name]


def parse_decision(text: str) -> Decision:
    decision = _DECISION_TOKENS.get(_normalize(text))
    if decision is None:
        raise UnknownLevel(text, "decision")
    return decision


def parse_impact(text: str, strict: bool = True) -> ImpactSet:
    """Parse an impact string like "CIAa" or "C I A" into an ImpactSet.

    Letters may appear in any order; whitespace is tolerated and duplicates
    collapse. 'A' (availability) and 'a' (accountability) are distinct. A
    repeated uppercase 'A' is ambiguous table typography: strict mode rejects
    it, lenient mode reads it as accountability.
    """
    letters = [ch for ch in text if not ch.isspace()]
    if not letters:
        raise EmptyImpact()
    members: set[Impact] = set()
    for ch in letters:
        if ch == "C":
            members.add(Impact.CONFIDENTIALITY)
        elif ch == "I":
            members.add(Impact.INTEGRITY)
        elif ch == "A":
            if Impact.AVAILABILITY not in members:
                members.add(Impact.AVAILABILITY)
            elif strict:
                raise AmbiguousAccountability(text)
            else:
                members.add(Impact.ACCOUNTABILITY)
        elif ch == "a":
            members.add(Impact.ACCOUNTABILITY)
        else:
            raise UnknownImpactLetter(ch)
    return ImpactSet(frozenset(members))


def parse_risk_type(text: str) -> RiskType:
    members: set[RiskOrigin] = set()
    for ch in text:
        if ch.isspace() or ch in "/,":
            continue
        if ch in ("E", "e"):
            members.add(RiskOrigin.EXTERNAL)
        elif ch in ("I", "i"):
            members.add(RiskOrigin.INTERNAL)
        else:
            raise UnknownLevel(text, "risk type")
    if not members:
        raise UnknownLevel(text, "risk type")
    return RiskType(frozenset(members))


def parse_locus(text: str) -> Locus:
    members: set[Segment] = set()
    for ch in text:
        if ch.isspace() or ch in "/,":
            continue
        if ch in ("A", "a"):
            members.add(Segment.AIR)
        elif ch in ("G", "g"):
            members.add(Segment.GROUND)
        else:
            raise UnknownLevel(text, "locus")
    if not members:
        raise UnknownLevel(text, "locus")
    return Locus(frozenset(members))


# --------------------------------------------------------------------------
# Validation


def _require_text(violations: list[Violation], field: str, value: str) -> None:
    if not value.strip():
        violations.append(Violation("EmptyField", field, f"{field} must be non-empty"))


def validate_profile(profile: RiskProfile) -> tuple[Violation, ...]:
    """Return every violated profile invariant; an empty report means valid."""
    violations: list[Violation] = []
    if not isinstance(profile.case_id, int) or isinstance(profile.case_id, bool) or profile.case_id < 1:
        violations.append(Violation("NonPositiveCaseId", "case_id", "case_id must be a positive integer"))
    if not profile.locus.members:
        violations.append(Violation("EmptyField", "locus", "locus must include at least one of A, G"))
    _require_text(violations, "asset", profile.asset)
    if not profile.risk_type.members:
        violations.append(Violation("EmptyField", "risk_type", "risk_type must include at least one of E, I"))
    _require_text(violations, "description", profile.description)
    _require_text(violations, "consequence", profile.consequence)
    return tuple(violations)


def validate_assessment(assessment: RiskAssessment) -> tuple[Violation, ...]:
    violations: list[Violation] = []
    _require_text(violations, "vulnerability", assessment.vulnerability)
    _require_text(violations, "threat", assessment.threat)
    _require_text(violations, "threat_agent", assessment.threat_agent)
    if not assessment.impact.members:
        violations.append(Violation("EmptyField", "impact", "impact must name at least one of C, I, A, a"))
    return tuple(violations)


def validate_evaluation(evaluation: RiskEvaluation) -> tuple[Violation, ...]:
    violations: list[Violation] = []
    _require_text(violations, "solution", evaluation.solution)
    return tuple(violations)
