// Statement checking against an identifier lexicon, pretty-printing of the
// universally closed form, and a deliberately weak equality test (string
// reflexivity after normalization, which erases hypothesis binder names and
// canonicalizes anonymous instance names).

import { BinderGroup, parseStatement, splitBindersGoal } from "./statement";

export type CheckStatus = "elaborated" | "parsed" | "failed";

export interface CheckOutcome {
  status: CheckStatus;
  normalized?: string;
  diagnostics: string[];
}

export function normalizeWhitespace(text: string): string {
  return text.normalize("NFC").split(/\s+/u).filter(Boolean).join(" ");
}

function renderBinder(group: BinderGroup, instIndex: { value: number }): string {
  if (group.kind === "instance") {
    const name = instIndex.value === 0 ? "inst" : `inst_${instIndex.value}`;
    instIndex.value++;
    if (group.hasColon && group.names.length > 0) {
      return `[${group.names.join(" ")} : ${group.type}]`;
    }
    return `[${name} : ${group.text.slice(1, -1).trim()}]`;
  }
  return group.text;
}

/**
 * Universally closed rendering: implicit and instance binders quantified
 * (anonymous instances named inst, inst_1, ...), explicit binders turned
 * into arrow hypotheses, then the goal.
 */
export function prettyPrint(signature: string): string | null {
  const split = splitBindersGoal(signature);
  if (split === null || split.goal.trim() === "") return null;
  const parsed = parseStatement(signature);
  const quantified: string[] = [];
  const arrows: string[] = [];
  const instIndex = { value: 0 };
  for (const group of parsed.binders) {
    if (group.kind === "explicit" && group.hasColon) {
      arrows.push(group.type.trim());
    } else {
      quantified.push(renderBinder(group, instIndex));
    }
  }
  const chain = [...arrows, split.goal.trim()].join(" → ");
  const body = quantified.length > 0 ? `${quantified.join(" ")}, ${chain}` : chain;
  return normalizeWhitespace(`∀ ${body}`);
}

export class StatementChecker {
  constructor(private readonly lexicon: Set<string>) {}

  check(statement: string): CheckOutcome {
    if (!statement || statement.trim() === "") {
      return { status: "failed", diagnostics: ["empty statement"] };
    }
    const parsed = parseStatement(statement);
    if (!parsed.balanced) {
      return { status: "failed", diagnostics: ["unbalanced delimiters"] };
    }
    const diagnostics: string[] = [];
    const unknown = [...new Set(parsed.candidates.filter((c) => !this.lexicon.has(c)))].sort();
    for (const name of unknown) diagnostics.push(`unknown identifier ${name}`);
    const rendered = prettyPrint(parsed.signature);
    if (rendered === null) diagnostics.push("no top-level goal");
    if (diagnostics.length > 0) {
      const status = rendered === null ? "failed" : "parsed";
      return { status, diagnostics };
    }
    return { status: "elaborated", normalized: rendered as string, diagnostics: [] };
  }

  /** Reflexivity-strength equality on the elaborated normal forms. */
  equal(left: string, right: string): { equal: boolean; outcome: CheckOutcome } {
    const a = this.check(left);
    if (a.status !== "elaborated") return { equal: false, outcome: a };
    const b = this.check(right);
    if (b.status !== "elaborated") {
      return { equal: false, outcome: { status: "failed", diagnostics: b.diagnostics } };
    }
    return { equal: a.normalized === b.normalized, outcome: a };
  }
}

export const DEFAULT_LEXICON: string[] = [
  "DivisionRing",
  "AddCommGroup",
  "Module",
  "Module.rank",
  "FiniteDimensional",
  "FiniteDimensional.finrank",
  "Fintype",
  "Basis",
  "Nontrivial",
  "Subsingleton",
  "Set.inter_subset_left",
  "ConvexOn",
  "Matrix.IsSymm",
];
