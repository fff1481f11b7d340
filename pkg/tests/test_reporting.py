import csv
import io

import pytest

from riskbench.lifecycle import Step, UnknownIteration
from riskbench.register import close_iteration, commit, open_iteration
from riskbench.reporting import (
    assessment_table,
    evaluation_table,
    heatmap,
    heatmap_table,
    iteration_summary,
    profile_table,
    render_csv,
    render_iteration_summary,
    render_markdown,
)

from generators import Clock, add_simple_case, open_register


def csv_rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_profile_table_seed(seed_register):
    table = profile_table(seed_register)
    assert table.columns == (
        "Case #",
        "Where(G/A)",
        "Asset",
        "Risk Type",
        "Risk Description",
        "Consequence",
    )
    assert len(table.rows) == 7
    assert table.rows[0][2] == "All Nodes in the Network"
    assert table.rows[0][1] == "A/G"
    assert table.rows[5][3] == "E/I"  # case 6


def test_profile_table_csv_round_trip(seed_register):
    rows = csv_rows(render_csv(profile_table(seed_register)))
    assert rows[0][1] == "Where(G/A)"
    assert rows[6][3] == "E/I"  # header + case 6
    assert len(rows) == 8


def test_assessment_table_seed_row_7(seed_register):
    table = assessment_table(seed_register)
    row = table.rows[6]
    assert row[4] == "C"  # impact
    assert row[5] == "H"  # likelihood
    assert row[6] == "H"  # severity
    assert row[7] == "C"  # rate


def test_evaluation_table_seed(seed_register):
    table = evaluation_table(seed_register)
    assert table.columns == ("Case #", "Decision", "Solution")
    assert table.rows[1][1] == "Avoid"
    assert [r[1] for r in table.rows] == [
        "Mitigate",
        "Avoid",
        "Avoid",
        "Mitigate",
        "Mitigate",
        "Accept",
        "Avoid",
    ]


def test_unassessed_case_renders_dashes():
    register, clock = open_register()
    register = add_simple_case(register, clock)
    table = assessment_table(register)
    assert table.rows[0] == ("1", "-", "-", "-", "-", "-", "-", "-")
    ev = evaluation_table(register)
    assert ev.rows[0] == ("1", "-", "-")


def test_empty_register_header_only():
    from riskbench.register import new_register

    table = profile_table(new_register())
    assert table.rows == ()
    md = render_markdown(table)
    assert md.count("\n") == 2  # header + separator only


def test_markdown_and_csv_cells_match(seed_register):
    table = assessment_table(seed_register)
    md_lines = render_markdown(table).strip().splitlines()[2:]
    csv_lines = csv_rows(render_csv(table))[1:]
    for md_line, csv_row in zip(md_lines, csv_lines):
        md_cells = [c.strip() for c in md_line.strip("|").split(" | ")]
        assert md_cells == list(csv_row)


def test_markdown_escapes_pipes():
    from riskbench.reporting import Table

    table = Table("t", ("a",), (("x|y",),))
    assert "x\\|y" in render_markdown(table)


def test_heatmap_seed_counts(seed_register):
    grid = heatmap(seed_register)
    assert grid.total == 7
    counts = {
        (cell.likelihood, cell.severity): cell.count for row in grid.cells for cell in row
    }
    expected_nonzero = {
        ("H", "M"): 1,
        ("VH", "M"): 1,
        ("H", "C"): 1,
        ("L", "C"): 1,
        ("L", "M"): 1,
        ("N", "M"): 1,
        ("H", "H"): 1,
    }
    for key, count in counts.items():
        assert count == expected_nonzero.get(key, 0), key
    assert sum(counts.values()) == 7


def test_heatmap_dimensions_match_matrix(seed_register):
    grid = heatmap(seed_register)
    assert grid.likelihoods == ("VH", "H", "M", "L", "N")
    assert grid.severities == ("C", "H", "M", "L")
    assert len(grid.cells) == 5
    assert all(len(row) == 4 for row in grid.cells)
    # every cell is annotated with the matrix rating
    assert grid.cells[0][0].rating.code == "C"  # (VH, C)
    assert grid.cells[4][0].rating.code == "L"  # (N, C)


def test_heatmap_empty_register():
    from riskbench.register import new_register

    grid = heatmap(new_register())
    assert grid.total == 0
    assert all(cell.count == 0 for row in grid.cells for cell in row)


def test_heatmap_table_render(seed_register):
    table = heatmap_table(heatmap(seed_register))
    assert table.columns[0] == "Likelihood \\ Severity"
    assert table.rows[0][0] == "VH"
    md = render_markdown(table)
    assert "1 (C)" in md


def test_iteration_summary_seed(seed_register):
    summary = iteration_summary(seed_register, 1)
    assert summary.iteration.index == 1
    assert len(summary.statuses) == 7
    assert all(s.last_completed is Step.EVALUATION for s in summary.statuses)
    assert all(s.next_step is Step.TREATMENT for s in summary.statuses)
    assert not any(s.complete for s in summary.statuses)
    assert dict(summary.rating_distribution) == {"C": 2, "H": 2, "M": 1, "L": 2}
    assert len(summary.tie_groups) == 1
    assert summary.tie_groups[0].case_ids == (3, 7)
    assert summary.carryover == ()
    text = render_iteration_summary(summary)
    assert "Open tie group at C: 3, 7" in text
    assert "case 3: at Evaluation, next Treatment" in text


def test_iteration_summary_resolved_tie_group_not_open(seed_register):
    from riskbench.register import complete_ahp_session, create_ahp_session, judge_ahp

    register, session = commit(seed_register, create_ahp_session([3, 7], ["urgency"]), actor="t")
    register, _ = commit(register, judge_ahp(session.session_id, "urgency", 0, 1, 3), actor="t")
    register, _ = commit(register, complete_ahp_session(session.session_id), actor="t")
    summary = iteration_summary(register, 1)
    assert summary.tie_groups == ()


def test_iteration_summary_closed_with_overrides():
    register, clock = open_register()
    register = add_simple_case(register, clock)
    register, _ = commit(
        register, close_iteration({1: "awaiting vendor quote"}), actor="team", timestamp=clock.tick()
    )
    summary = iteration_summary(register, 1)
    assert len(summary.carryover) == 1
    assert summary.carryover[0].justification == "awaiting vendor quote"
    text = render_iteration_summary(summary)
    assert "awaiting vendor quote" in text
    assert "closed" in text


def test_iteration_summary_unknown_index(seed_register):
    with pytest.raises(UnknownIteration):
        iteration_summary(seed_register, 99)


def test_row_counts_equal_case_counts(seed_register):
    for build in (profile_table, assessment_table, evaluation_table):
        assert len(build(seed_register).rows) == len(seed_register.cases)
