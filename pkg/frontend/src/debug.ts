/** Debug pane rendering: open-goal badges plus the last discourse box.
 * Defensive against malformed payloads — anything unexpected is shown as
 * raw text rather than crashing the pane. */

export function goalBadges(goals: unknown): string[] {
  if (!Array.isArray(goals)) {
    return [rawText(goals)];
  }
  if (goals.length === 0) {
    return ["no open goals"];
  }
  return goals.map((goal) => {
    if (
      goal !== null &&
      typeof goal === "object" &&
      typeof (goal as Record<string, unknown>).role === "string" &&
      typeof (goal as Record<string, unknown>).var === "string"
    ) {
      const g = goal as { role: string; var: string; sort?: unknown };
      const sort = typeof g.sort === "string" ? g.sort : "?";
      return `${g.role}: ${g.var} ∈ ${sort}`;
    }
    return rawText(goal);
  });
}

export function debugPaneText(goals: unknown, drsBox: string): string {
  const lines = goalBadges(goals);
  if (drsBox) {
    lines.push("", drsBox);
  }
  return lines.join("\n");
}

function rawText(value: unknown): string {
  try {
    return JSON.stringify(value) ?? String(value);
  } catch {
    return String(value);
  }
}
