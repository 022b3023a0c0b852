// Surface parsing of candidate theorem statements: signature boundary,
// delimiter balance, binder structure, and the identifier tokens that must
// exist in the ambient library for the statement to elaborate.

export type BinderKind = "implicit" | "instance" | "explicit" | "anonymous-ctor";

export interface BinderGroup {
  kind: BinderKind;
  text: string; // full group text, brackets included
  names: string[]; // binder names before the group's top-level colon
  type: string; // text after the colon (whole inner text when anonymous)
  hasColon: boolean;
}

export interface ParsedStatement {
  signature: string;
  balanced: boolean;
  binders: BinderGroup[];
  goal: string; // empty when there is no top-level colon
  candidates: string[]; // identifiers that need lexicon membership
}

const OPEN: Record<string, string> = { "(": ")", "[": "]", "{": "}", "⟨": "⟩" };
const CLOSE: Record<string, string> = { ")": "(", "]": "[", "}": "{", "⟩": "⟨" };

const IDENT_RE =
  /[A-Za-zα-ωΑ-Ω_][A-Za-z0-9α-ωΑ-Ω_'.₀-₉]*/gu;
const SINGLE_LETTER_RE = /^[A-Za-zα-ωΑ-Ω][₀-₉]*'*$/u;

export const RESERVED_WORDS = new Set([
  "theorem", "lemma", "example", "def", "definition", "instance", "structure",
  "class", "abbrev", "axiom", "constant", "variable", "variables", "universe",
  "universes", "namespace", "section", "open", "import", "Type", "Prop",
  "Sort", "fun", "assume", "by", "from", "begin", "end", "sorry", "exact",
  "apply", "intro", "intros", "have", "show", "calc", "let", "in", "if",
  "then", "else", "match", "with", "do", "at", "using", "auto", "this",
  "λ", "Π", "Σ",
]);

export function signatureEnd(text: string): number {
  let depth = 0;
  let inString = false;
  for (let i = 0; i < text.length; i++) {
    const ch = text[i];
    if (inString) {
      if (ch === "\\") i++;
      else if (ch === '"') inString = false;
      continue;
    }
    if (ch === '"') inString = true;
    else if (ch in OPEN) depth++;
    else if (ch in CLOSE) depth = Math.max(0, depth - 1);
    else if (depth === 0 && ch === ":" && text[i + 1] === "=") return i;
  }
  return text.length;
}

export function isBalanced(text: string): boolean {
  const stack: string[] = [];
  for (const ch of text) {
    if (ch in OPEN) stack.push(ch);
    else if (ch in CLOSE) {
      if (stack.length === 0 || stack[stack.length - 1] !== CLOSE[ch]) return false;
      stack.pop();
    }
  }
  return stack.length === 0;
}

/** Split at the first top-level colon (not part of `:=`). */
export function splitBindersGoal(signature: string): { binders: string; goal: string } | null {
  let depth = 0;
  for (let i = 0; i < signature.length; i++) {
    const ch = signature[i];
    if (ch in OPEN) depth++;
    else if (ch in CLOSE) depth = Math.max(0, depth - 1);
    else if (ch === ":" && depth === 0) {
      if (signature[i + 1] === "=") return null;
      return { binders: signature.slice(0, i), goal: signature.slice(i + 1).trim() };
    }
  }
  return null;
}

function binderKind(open: string): BinderKind {
  if (open === "{") return "implicit";
  if (open === "[") return "instance";
  if (open === "(") return "explicit";
  return "anonymous-ctor";
}

/** Top-level bracket groups of the binder section. */
export function binderGroups(binders: string): BinderGroup[] {
  const groups: BinderGroup[] = [];
  let depth = 0;
  let start = -1;
  for (let i = 0; i < binders.length; i++) {
    const ch = binders[i];
    if (ch in OPEN) {
      if (depth === 0) start = i;
      depth++;
    } else if (ch in CLOSE) {
      depth--;
      if (depth === 0 && start >= 0) {
        const text = binders.slice(start, i + 1);
        const inner = text.slice(1, -1);
        const split = splitBindersGoal(inner);
        const names: string[] = [];
        let type = inner.trim();
        let hasColon = false;
        if (split !== null) {
          hasColon = true;
          type = split.goal;
          for (const m of split.binders.matchAll(IDENT_RE)) names.push(m[0]);
        }
        groups.push({ kind: binderKind(text[0]), text, names, type, hasColon });
        start = -1;
      }
    }
  }
  return groups;
}

function boundNames(signature: string, groups: BinderGroup[]): Set<string> {
  const bound = new Set<string>();
  for (const g of groups) if (g.hasColon) for (const n of g.names) bound.add(n);
  // universe parameters: identifiers directly after Type/Sort
  const uni = signature.matchAll(
    /(?:^|[^A-Za-z0-9α-ωΑ-Ω_'.₀-₉])(?:Type|Sort)\s+([A-Za-zα-ωΑ-Ω_][A-Za-z0-9α-ωΑ-Ω_'.₀-₉]*)/gu,
  );
  for (const m of uni) bound.add(m[1]);
  // bare quantifier binders: names between a quantifier and the next comma/colon
  const quant = signature.matchAll(/[∀∃]\s*([^,:⟨⟩()[\]{}]*)[,:]/gu);
  for (const m of quant) {
    for (const t of m[1].matchAll(IDENT_RE)) bound.add(t[0]);
  }
  return bound;
}

export function parseStatement(raw: string): ParsedStatement {
  const signature = raw.slice(0, signatureEnd(raw)).trim();
  const balanced = isBalanced(signature);
  const split = splitBindersGoal(signature);
  const groups = split === null ? binderGroups(signature) : binderGroups(split.binders);
  const goal = split === null ? "" : split.goal;
  const bound = boundNames(signature, groups);

  const candidates: string[] = [];
  for (const m of signature.matchAll(IDENT_RE)) {
    const text = m[0];
    if (RESERVED_WORDS.has(text)) continue;
    if (SINGLE_LETTER_RE.test(text) && bound.has(text)) continue;
    // binder names themselves are not library references
    if (bound.has(text)) continue;
    candidates.push(text);
  }
  return { signature, balanced, binders: groups, goal, candidates };
}
