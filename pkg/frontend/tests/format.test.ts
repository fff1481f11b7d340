import { describe, expect, it } from "vitest";

import {
  RATING_COLORS,
  crBadge,
  formatScore,
  groupCasesByStep,
  judgmentToSlider,
  ratingColor,
  reciprocalOf,
  sliderToJudgment,
} from "../src/format";
import type { CaseDoc } from "../src/types";

describe("slider judgment mapping", () => {
  it("maps the full -8..8 range onto the 1-9 scale", () => {
    expect(sliderToJudgment(0)).toBe("1");
    expect(sliderToJudgment(2)).toBe("3");
    expect(sliderToJudgment(8)).toBe("9");
    expect(sliderToJudgment(-1)).toBe("1/2");
    expect(sliderToJudgment(-8)).toBe("1/9");
  });

  it("round-trips through judgmentToSlider", () => {
    for (let position = -8; position <= 8; position++) {
      expect(judgmentToSlider(sliderToJudgment(position))).toBe(position);
    }
  });

  it("rejects out-of-range positions and values", () => {
    expect(() => sliderToJudgment(9)).toThrow();
    expect(() => sliderToJudgment(0.5)).toThrow();
    expect(() => judgmentToSlider("10")).toThrow();
    expect(() => judgmentToSlider("2/3")).toThrow();
  });
});

describe("reciprocals", () => {
  it("derives the read-only mirror value", () => {
    expect(reciprocalOf("3")).toBe("1/3");
    expect(reciprocalOf("1/3")).toBe("3");
    expect(reciprocalOf("1")).toBe("1");
  });
});

describe("rating colors", () => {
  it("keys the fixed 4-color scale by rating code", () => {
    expect(Object.keys(RATING_COLORS).sort()).toEqual(["C", "H", "L", "M"]);
    expect(ratingColor("C")).toBe(RATING_COLORS.C);
    expect(ratingColor("??")).toBe("#d0d0d0");
  });
});

describe("cr badge", () => {
  it("follows the server's acceptability verdict", () => {
    expect(crBadge(0.05, true).flag).toBe("ok");
    expect(crBadge(0.25, false).flag).toBe("bad");
    expect(crBadge(0.25, false).text).toBe("CR 0.250");
  });
});

describe("score formatting", () => {
  it("prints four decimals", () => {
    expect(formatScore(0.75)).toBe("0.7500");
    expect(formatScore(1 / 3)).toBe("0.3333");
  });
});

function fakeCase(id: number, lastCompleted: CaseDoc["status"]["last_completed"]): CaseDoc {
  return {
    case_id: id,
    profile: {
      locus: "G",
      asset: `asset-${id}`,
      risk_type: "E",
      description: "d",
      consequence: "c",
    },
    assessment: null,
    evaluation: null,
    treatment: null,
    monitoring: null,
    history: [],
    status: {
      text: "",
      iteration: 1,
      last_completed: lastCompleted,
      next_step: null,
      complete: false,
    },
  };
}

describe("board grouping", () => {
  it("groups by last completed step, defaulting to Profile", () => {
    const groups = groupCasesByStep([
      fakeCase(1, "Assessment"),
      fakeCase(2, null),
      fakeCase(3, "Monitoring"),
      fakeCase(4, "Assessment"),
    ]);
    expect(groups.get("Assessment")!.map((c) => c.case_id)).toEqual([1, 4]);
    expect(groups.get("Profile")!.map((c) => c.case_id)).toEqual([2]);
    expect(groups.get("Monitoring")!.map((c) => c.case_id)).toEqual([3]);
    expect(groups.get("Evaluation")).toEqual([]);
  });
});
