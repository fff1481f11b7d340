"""Built-in demo register: the postal-drone case study.

Seven cases with their profile, assessment, and evaluation steps recorded in
iteration 1, left open mid-cycle. Timestamps are fixed so the fixture
serializes byte-identically on every run.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

from .domain import parse_decision, parse_impact, parse_likelihood, parse_locus, parse_risk_type, parse_severity
from .register import (
    Register,
    add_case,
    commit,
    new_register,
    open_iteration,
    record_assessment,
    record_evaluation,
)

_BASE_TS = datetime(2023, 3, 6, 9, 0, 0, tzinfo=timezone.utc)

_PROFILE_ACTOR = "business owner and security risk team"
_TEAM_ACTOR = "security risk team"

# (where, asset, type, description, consequence)
_PROFILES = [
    ("A/G", "All Nodes in the Network", "I", "Degrade Communication Quality", "Network Problem"),
    (
        "G",
        "Cloud Resources",
        "I",
        "Becoming The Target of Any Elevation of Privilege on Access Control",
        "Organization/ Operation",
    ),
    (
        "G",
        "Client to Terminal network",
        "E",
        "Attempting to use weak Authentication mechanisms",
        "Drone Loss/ Information leakage",
    ),
    (
        "A",
        "Drone Nodes",
        "I",
        "Battery Packs Energy Getting Low or Destroy After a While",
        "Limitation In Flight Duration",
    ),
    (
        "G",
        "Human Resources",
        "E",
        "Becoming The Target of Social Engineering and Making Backdoors and Import Viruses into Systems",
        "Organization/ Operation/ HR Damage",
    ),
    (
        "G",
        "Operation",
        "E/I",
        "New and current Ethical/Legal Regulation Can Take Our Mission Impossible",
        "Operation Problem",
    ),
    (
        "A/G",
        "All Nodes in the Network",
        "E",
        "Attempting to Eavesdropping on transmitted information",
        "Information leakage",
    ),
]

# (vulnerability, threat, agent, impact, likelihood, severity)
_ASSESSMENTS = [
    (
        "Lack of QoS",
        "Packet Loss/Latency/Jitter/Congestion/Delays/Collisions",
        "Development Team",
        "I",
        "H",
        "M",
    ),
    (
        "Not Implementing the Right Policy for Access Control",
        "Elevation/ Escalation of Privilege",
        "Development/ Maintenance Team",
        "C I A A",
        "VH",
        "M",
    ),
    (
        "Weakness in authentication Security",
        "Password Cracking",
        "Opponent",
        "C I A A",
        "H",
        "C",
    ),
    (
        "Battery Packs",
        "Battery Failure/ Expired Battery/ Charge Cycle Issues",
        "maintenance team",
        "A",
        "L",
        "C",
    ),
    (
        "Human Resource Challenges/ Employee Egos and dissatisfaction",
        "Not Paying Attention to the salaries and benefits of employees",
        "Malicious Insiders",
        "C I A",
        "L",
        "M",
    ),
    (
        "Policy Changing and failure to comply with law",
        "Law and Justice",
        "Pilot/ Government",
        "A",
        "N",
        "M",
    ),
    (
        "Weakness in Confidentiality Security",
        "Man in the Middle or Eavesdropping Attacks",
        "Opponent",
        "C",
        "H",
        "H",
    ),
]

# (decision, solution)
_EVALUATIONS = [
    ("Mitigate", "Increase the quality of the Development team and use QoS."),
    ("Avoid", "Role-based access control (RBAC) can be implemented."),
    ("Avoid", "Implementing Kerberos System"),
    ("Mitigate", "Implementation of the periodic check policy of parts."),
    ("Mitigate", "Making a system for checking Malware infection based on Data science."),
    ("Accept", "This risk must be adopted."),
    ("Avoid", "Using a Secure and Fast Cryptographic function."),
]


def seed_case_study() -> Register:
    """The postal-drone demo register: iteration 1 open, seven cases profiled,
    assessed, and evaluated; deterministic timestamps."""
    tick = [0]

    def next_ts() -> datetime:
        tick[0] += 1
        return _BASE_TS + timedelta(minutes=5 * tick[0])

    register = new_register()
    register, _ = commit(
        register,
        open_iteration(cadence_days=21),
        actor=_TEAM_ACTOR,
        timestamp=next_ts(),
    )
    for where, asset, risk_type, description, consequence in _PROFILES:
        register, _ = commit(
            register,
            add_case(
                locus=parse_locus(where),
                asset=asset,
                risk_type=parse_risk_type(risk_type),
                description=description,
                consequence=consequence,
                documentation="Profiled during the postal-drone case review.",
                actor=_PROFILE_ACTOR,
            ),
            actor=_PROFILE_ACTOR,
            timestamp=next_ts(),
        )
    for case_id, (vulnerability, threat, agent, impact, likelihood, severity) in enumerate(
        _ASSESSMENTS, start=1
    ):
        register, _ = commit(
            register,
            record_assessment(
                case_id,
                vulnerability=vulnerability,
                threat=threat,
                threat_agent=agent,
                impact=parse_impact(impact, strict=False),
                likelihood=parse_likelihood(likelihood),
                severity=parse_severity(severity),
                documentation="Assessed against the current threat surveys.",
                actor=_TEAM_ACTOR,
            ),
            actor=_TEAM_ACTOR,
            timestamp=next_ts(),
        )
    for case_id, (decision, solution) in enumerate(_EVALUATIONS, start=1):
        register, _ = commit(
            register,
            record_evaluation(
                case_id,
                decision=parse_decision(decision),
                solution=solution,
                documentation="Decision coordinated with the business owner.",
                actor=_TEAM_ACTOR,
            ),
            actor=_TEAM_ACTOR,
            timestamp=next_ts(),
        )
    return register
