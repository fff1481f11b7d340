"""Risk-management workbench: a cyclic profile / assess / evaluate / treat /
monitor workflow over a persistent register, with a configurable qualitative
rating matrix and pairwise-comparison tie-breaking for equally rated risks."""

from .ahp import (
    AhpResult,
    AhpSession,
    ConsistencyReport,
    PairwiseMatrix,
    PriorityVector,
    TieGroup,
    consistency,
    find_tie_groups,
    priority_vector,
    rank_session,
    synthesize,
)
from .domain import (
    Decision,
    Impact,
    ImpactSet,
    Likelihood,
    Locus,
    Rating,
    RiskAssessment,
    RiskEvaluation,
    RiskOrigin,
    RiskProfile,
    RiskType,
    Segment,
    Severity,
    parse_decision,
    parse_impact,
    parse_likelihood,
    parse_locus,
    parse_rating,
    parse_risk_type,
    parse_severity,
    validate_profile,
)
from .errors import RiskError
from .lifecycle import (
    ActionItem,
    Carryover,
    Effectiveness,
    Iteration,
    MonitoringRecord,
    Step,
    StepRecord,
    TreatmentPlan,
)
from .rating import RatingMatrix, default_matrix, rate, recompute_ratings, validate_matrix
from .register import (
    AuditEntry,
    Register,
    RiskCase,
    add_case,
    case_status,
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
    verify_audit_chain,
)
from .reporting import (
    Heatmap,
    IterationSummary,
    Table,
    assessment_table,
    evaluation_table,
    heatmap,
    iteration_summary,
    profile_table,
)
from .seed import seed_case_study
from .store import dumps, load, loads, save

__version__ = "0.1.0"

__all__ = [
    "AhpResult",
    "AhpSession",
    "ActionItem",
    "AuditEntry",
    "Carryover",
    "ConsistencyReport",
    "Decision",
    "Effectiveness",
    "Heatmap",
    "Impact",
    "ImpactSet",
    "Iteration",
    "IterationSummary",
    "Likelihood",
    "Locus",
    "MonitoringRecord",
    "PairwiseMatrix",
    "PriorityVector",
    "Rating",
    "RatingMatrix",
    "Register",
    "RiskAssessment",
    "RiskCase",
    "RiskError",
    "RiskEvaluation",
    "RiskOrigin",
    "RiskProfile",
    "RiskType",
    "Segment",
    "Severity",
    "Step",
    "StepRecord",
    "Table",
    "TieGroup",
    "TreatmentPlan",
    "add_case",
    "assessment_table",
    "case_status",
    "close_iteration",
    "commit",
    "complete_ahp_session",
    "consistency",
    "create_ahp_session",
    "default_matrix",
    "dumps",
    "evaluation_table",
    "find_tie_groups",
    "heatmap",
    "iteration_summary",
    "judge_ahp",
    "load",
    "loads",
    "new_register",
    "open_iteration",
    "parse_decision",
    "parse_impact",
    "parse_likelihood",
    "parse_locus",
    "parse_rating",
    "parse_risk_type",
    "parse_severity",
    "priority_vector",
    "profile_table",
    "rank_session",
    "rate",
    "record_assessment",
    "record_evaluation",
    "record_monitoring",
    "record_profile",
    "record_treatment",
    "recompute_ratings",
    "save",
    "seed_case_study",
    "set_matrix",
    "synthesize",
    "validate_matrix",
    "validate_profile",
    "verify_audit_chain",
]
