import random
from dataclasses import replace

import pytest

from riskbench.domain import Likelihood, Rating, Severity, parse_rating
from riskbench.rating import (
    IncompleteGrid,
    InvalidMatrix,
    LevelNotOnAxis,
    MonotonicityViolation,
    RatingMatrix,
    default_matrix,
    rate,
    recompute_ratings,
    validate_matrix,
)
from riskbench.register import commit, new_register, set_matrix
from riskbench.seed import seed_case_study

from generators import corrupt_monotonicity, monotone_oracle, random_monotone_matrix

# The published 5x4 grid, transcribed row by row (likelihood descending,
# severity columns C H M L).
GRID = {
    "VH": "C C H M",
    "H": "C C H L",
    "M": "H H M L",
    "L": "M M L L",
    "N": "L L L L",
}


def test_default_matrix_matches_published_grid_on_all_20_cells():
    matrix = default_matrix()
    assert len(matrix.cells) == 20
    for lik, row in GRID.items():
        for sev, code in zip(("C", "H", "M", "L"), row.split()):
            assert matrix.cells[(lik, sev)] is parse_rating(code), (lik, sev)


@pytest.mark.parametrize(
    "likelihood,severity,expected",
    [
        ("VH", "C", "C"),
        ("H", "L", "L"),
        ("N", "C", "L"),
        ("H", "M", "H"),  # case 1
        ("L", "C", "M"),  # case 4
        ("N", "M", "L"),  # case 6
        ("H", "H", "C"),  # case 7
    ],
)
def test_rate_examples(likelihood, severity, expected):
    assert rate(default_matrix(), likelihood, severity).code == expected


def test_rate_accepts_enums():
    assert rate(default_matrix(), Likelihood.VERY_HIGH, Severity.MODERATE) is Rating.HIGH


def test_rate_is_pure():
    matrix = default_matrix()
    first = rate(matrix, "M", "H")
    assert all(rate(matrix, "M", "H") is first for _ in range(5))


def test_rate_level_not_on_axis():
    matrix = default_matrix()
    with pytest.raises(LevelNotOnAxis) as exc:
        rate(matrix, "XX", "C")
    assert exc.value.details["axis"] == "likelihood"
    with pytest.raises(LevelNotOnAxis):
        rate(matrix, "H", "XX")


def test_validate_default_matrix_clean():
    assert validate_matrix(default_matrix()) == ()


def test_validate_flags_lowered_top_cell():
    matrix = default_matrix()
    cells = dict(matrix.cells)
    cells[("VH", "C")] = Rating.LOW
    broken = replace(matrix, cells=cells)
    violations = validate_matrix(broken)
    monotonicity = [v for v in violations if isinstance(v, MonotonicityViolation)]
    assert monotonicity
    assert any(("VH", "C") in (v.lower_cell, v.higher_cell) for v in monotonicity)


def test_validate_flags_missing_cell():
    matrix = default_matrix()
    cells = dict(matrix.cells)
    del cells[("N", "L")]
    violations = validate_matrix(replace(matrix, cells=cells))
    assert len(violations) == 1
    assert isinstance(violations[0], IncompleteGrid)
    assert violations[0].missing == (("N", "L"),)


def test_validate_flags_off_axis_cell():
    matrix = default_matrix()
    cells = dict(matrix.cells)
    cells[("ZZ", "C")] = Rating.LOW
    violations = validate_matrix(replace(matrix, cells=cells))
    assert any(isinstance(v, IncompleteGrid) and v.extra for v in violations)


def test_validate_flags_reordered_standard_levels():
    matrix = default_matrix()
    swapped = replace(matrix, likelihood_axis=("L", "N", "M", "H", "VH"))
    violations = validate_matrix(swapped)
    assert any(v.code == "AxisViolation" for v in violations)


def test_validate_flags_duplicate_axis_level():
    matrix = default_matrix()
    broken = replace(matrix, severity_axis=("L", "M", "M", "C"))
    violations = validate_matrix(broken)
    assert any(v.code == "AxisViolation" for v in violations)


def test_validator_agrees_with_exhaustive_oracle():
    rng = random.Random(1234)
    for trial in range(60):
        matrix = random_monotone_matrix(rng)
        assert monotone_oracle(matrix)
        assert validate_matrix(matrix) == (), trial
        broken = corrupt_monotonicity(rng, matrix)
        assert not monotone_oracle(broken)
        assert any(isinstance(v, MonotonicityViolation) for v in validate_matrix(broken)), trial


def test_rate_monotone_in_both_arguments():
    rng = random.Random(99)
    likelihoods = list(Likelihood)
    severities = list(Severity)
    for _ in range(30):
        matrix = default_matrix() if rng.random() < 0.3 else random_monotone_matrix(rng)
        axis_l = [l for l in likelihoods if l.code in matrix.likelihood_axis]
        axis_s = [s for s in severities if s.code in matrix.severity_axis]
        for l1 in axis_l:
            for l2 in axis_l:
                if l2 < l1:
                    continue
                for s1 in axis_s:
                    for s2 in axis_s:
                        if s2 < s1:
                            continue
                        assert rate(matrix, l1, s1) <= rate(matrix, l2, s2)


# ---------------------------------------------------------------------------
# Recompute


def test_recompute_with_default_matrix_changes_nothing(seed_register):
    updated, changes = recompute_ratings(seed_register, default_matrix())
    assert changes == ()
    assert updated.matrix.version == seed_register.matrix.version + 1
    assert [c.assessment.rating for c in updated.cases] == [
        c.assessment.rating for c in seed_register.cases
    ]


def test_recompute_reports_raised_cell(seed_register):
    matrix = default_matrix()
    cells = dict(matrix.cells)
    cells[("H", "M")] = Rating.CRITICAL
    cells[("VH", "M")] = Rating.CRITICAL  # keep the grid monotone
    candidate = replace(matrix, name="raised", cells=cells)
    assert validate_matrix(candidate) == ()

    # Oracle: recompute every case by direct lookup on the candidate.
    expected = {}
    for case in seed_register.cases:
        a = case.assessment
        new = candidate.cells[(a.likelihood.code, a.severity.code)]
        if new != a.rating:
            expected[case.case_id] = (a.rating, new)

    updated, changes = recompute_ratings(seed_register, candidate)
    assert {c.case_id: (c.old, c.new) for c in changes} == expected
    assert expected[1] == (Rating.HIGH, Rating.CRITICAL)  # case 1 is (H, M)
    for case in updated.cases:
        assert case.assessment.rating == candidate.cells[
            (case.assessment.likelihood.code, case.assessment.severity.code)
        ]


def test_recompute_rejects_invalid_matrix(seed_register):
    matrix = default_matrix()
    cells = dict(matrix.cells)
    cells[("VH", "C")] = Rating.LOW
    with pytest.raises(InvalidMatrix):
        recompute_ratings(seed_register, replace(matrix, cells=cells))


def test_recompute_empty_register_no_changes():
    register = new_register()
    updated, changes = recompute_ratings(register, default_matrix())
    assert changes == ()
    assert updated.cases == ()


def test_recompute_keeps_history_payload_ratings(seed_register):
    matrix = default_matrix()
    cells = dict(matrix.cells)
    cells[("H", "M")] = Rating.CRITICAL
    cells[("VH", "M")] = Rating.CRITICAL
    candidate = replace(matrix, name="raised", cells=cells)
    updated, _ = commit(seed_register, set_matrix(candidate), actor="team")
    case_1 = updated.case(1)
    assert case_1.assessment.rating is Rating.CRITICAL
    # the recorded assessment payload keeps the rating as computed at the time
    recorded = [r for r in case_1.history if r.step.code == "Assessment"][-1]
    assert recorded.payload.rating is Rating.HIGH


def test_set_matrix_rejection_leaves_register_untouched(seed_register):
    matrix = default_matrix()
    cells = dict(matrix.cells)
    cells[("VH", "C")] = Rating.LOW
    candidate = replace(matrix, cells=cells)
    with pytest.raises(InvalidMatrix):
        commit(seed_register, set_matrix(candidate), actor="team")
    # immutable snapshots: the original register is unchanged by construction
    assert seed_register.matrix.version == 1
    assert len(seed_register.audit_log) == 22


def test_drop_level_used_by_assessment_rejected(seed_register):
    # Case 6 sits at likelihood N; a matrix without N cannot be installed.
    rng = random.Random(5)
    while True:
        candidate = random_monotone_matrix(rng)
        if "N" not in candidate.likelihood_axis:
            break
    with pytest.raises(LevelNotOnAxis):
        commit(seed_register, set_matrix(candidate), actor="team")
