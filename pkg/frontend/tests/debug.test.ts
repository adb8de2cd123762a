import { describe, expect, it } from "vitest";

import { debugPaneText, goalBadges } from "../src/debug.js";

describe("goal badges", () => {
  it("renders role, variable and sort", () => {
    expect(goalBadges([{ role: "DepartFrom", var: "s", sort: "Station" }])).toEqual([
      "DepartFrom: s ∈ Station",
    ]);
  });

  it("says so when no goals are open", () => {
    expect(goalBadges([])).toEqual(["no open goals"]);
  });

  it("renders several goals in order", () => {
    const badges = goalBadges([
      { role: "DepartFrom", var: "s", sort: "Station" },
      { role: "Prefers", var: "m", sort: "Meal" },
    ]);
    expect(badges).toEqual(["DepartFrom: s ∈ Station", "Prefers: m ∈ Meal"]);
  });

  it("shows a placeholder sort when the sort is missing", () => {
    expect(goalBadges([{ role: "DepartFrom", var: "s", sort: null }])).toEqual([
      "DepartFrom: s ∈ ?",
    ]);
  });

  it("falls back to raw text on a malformed payload", () => {
    expect(goalBadges("garbage" as unknown)).toEqual(['"garbage"']);
    expect(goalBadges([{ oops: 1 }])).toEqual(['{"oops":1}']);
  });
});

describe("debug pane", () => {
  it("appends the discourse box after the badges", () => {
    const text = debugPaneText(
      [{ role: "DepartFrom", var: "s", sort: "Station" }],
      "lambda x.\nt Rome",
    );
    expect(text).toBe("DepartFrom: s ∈ Station\n\nlambda x.\nt Rome");
  });

  it("omits the box section when there is none", () => {
    expect(debugPaneText([], "")).toBe("no open goals");
  });
});
