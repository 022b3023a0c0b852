"""Surface parsing of completions and identifier translation/auto-correction.

This is deliberately not a full language parser: it extracts exactly what the
translation step needs from a raw completion (the statement signature up to
the first top-level ``:=``, delimiter balance, and the identifier tokens),
leaving real syntactic validation to a checker.

Auto-correction resolves an unknown identifier in this order:

1. prebuilt dictionary hit (rule path ``["dictionary"]``, always wins);
2. the name is already in the target lexicon (empty rule path);
3. case variants of the name, then case+segment variants, picking the
   lexicon member with the fewest applied per-segment transformations
   (one per segment whose casing changed, one per ``is``/``has`` prefix
   added or dropped), ties broken lexicographically.
"""
from __future__ import annotations

import enum
import itertools
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources

from .corpus import NameDictionary

IDENT_RE = re.compile(r"[A-Za-zα-ωΑ-Ω_][A-Za-z0-9α-ωΑ-Ω_'.₀-₉]*")
_SINGLE_LETTER_RE = re.compile(r"^[A-Za-zα-ωΑ-Ω][₀-₉]*'*$")
_OPEN = {"(": ")", "[": "]", "{": "}", "⟨": "⟩"}
_CLOSE = {v: k for k, v in _OPEN.items()}
_QUANTIFIERS = ("∀", "∃")   # ∀ ∃


def _load_reserved() -> frozenset[str]:
    text = resources.files("autoform.assets").joinpath("reserved_words.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


_RESERVED: frozenset[str] | None = None


def reserved_words() -> frozenset[str]:
    global _RESERVED
    if _RESERVED is None:
        _RESERVED = _load_reserved()
    return _RESERVED


class TokenKind(enum.Enum):
    CANDIDATE = "candidate"
    RESERVED = "reserved"
    VARIABLE = "variable"


@dataclass(frozen=True)
class IdentifierToken:
    text: str
    span: tuple[int, int]
    kind: TokenKind


@dataclass(frozen=True)
class ParsedCandidate:
    raw: str
    signature: str
    identifiers: tuple[IdentifierToken, ...]
    balanced: bool


class ParseError(ValueError):
    pass


def _signature_end(text: str) -> int:
    """Offset of the first top-level ``:=`` outside brackets and strings."""
    depth = 0
    in_string = False
    i = 0
    while i < len(text):
        ch = text[i]
        if in_string:
            if ch == "\\":
                i += 2
                continue
            if ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
        elif ch in _OPEN:
            depth += 1
        elif ch in _CLOSE:
            depth = max(0, depth - 1)
        elif depth == 0 and ch == ":" and text[i : i + 2] == ":=":
            return i
        i += 1
    return len(text)


def _is_balanced(text: str) -> bool:
    stack: list[str] = []
    for ch in text:
        if ch in _OPEN:
            stack.append(ch)
        elif ch in _CLOSE:
            if not stack or stack[-1] != _CLOSE[ch]:
                return False
            stack.pop()
    return not stack


_SORT_KEYWORD_RE = re.compile(r"(?:^|[^A-Za-z0-9α-ωΑ-Ω_'.₀-₉])(?:Type|Sort)$")


def _ends_with_sort_keyword(prefix: str) -> bool:
    return bool(_SORT_KEYWORD_RE.search(prefix))


def _bound_names(signature: str) -> set[str]:
    """Names introduced by binder groups, bare quantifiers, or universe slots."""
    bound: set[str] = set()
    tokens = [(m.group(0), m.start()) for m in IDENT_RE.finditer(signature)]

    # Bracket groups with a colon at their own level bind the names before it.
    stack: list[tuple[int, list[str], bool]] = []   # (depth marker, names, saw_colon)
    quantifier_pending = False
    tok_iter = {start: text for text, start in tokens}
    i = 0
    while i < len(signature):
        ch = signature[i]
        if ch in _OPEN:
            stack.append((i, [], False))
            i += 1
            continue
        if ch in _CLOSE:
            if stack:
                _, names, saw_colon = stack.pop()
                if saw_colon:
                    bound.update(names)
            i += 1
            continue
        if ch == ":":
            if signature[i : i + 2] == ":=":
                i += 2
                continue
            if stack:
                start, names, _ = stack[-1]
                stack[-1] = (start, names, True)
            quantifier_pending = False
            i += 1
            continue
        if ch in _QUANTIFIERS:
            quantifier_pending = True
            i += 1
            continue
        if ch == ",":
            quantifier_pending = False
            i += 1
            continue
        if i in tok_iter:
            text = tok_iter[i]
            prev = signature[:i].rstrip()
            if _ends_with_sort_keyword(prev):
                bound.add(text)   # universe parameter slot
            elif stack and not stack[-1][2]:
                stack[-1][1].append(text)
            elif quantifier_pending:
                bound.add(text)
            i += len(text)
            continue
        i += 1
    return bound


def parse_completion(raw_text: str) -> ParsedCandidate:
    """Trim the signature, check delimiter balance, and classify identifiers."""
    if not raw_text or not raw_text.strip():
        raise ParseError("empty completion")
    signature = raw_text[: _signature_end(raw_text)].strip()
    balanced = _is_balanced(signature)
    reserved = reserved_words()
    bound = _bound_names(signature)

    identifiers: list[IdentifierToken] = []
    for m in IDENT_RE.finditer(signature):
        text = m.group(0)
        if text in reserved:
            kind = TokenKind.RESERVED
        elif _SINGLE_LETTER_RE.match(text) and text in bound:
            kind = TokenKind.VARIABLE
        else:
            kind = TokenKind.CANDIDATE
        identifiers.append(IdentifierToken(text=text, span=(m.start(), m.end()), kind=kind))
    return ParsedCandidate(
        raw=raw_text, signature=signature, identifiers=tuple(identifiers), balanced=balanced
    )


_CAMEL_WORD_RE = re.compile(
    r"[A-ZΑ-Ω]+(?![a-zα-ω])|[A-ZΑ-Ω][a-z0-9α-ω']*|[a-z0-9α-ω']+"
)


def _words(segment: str) -> list[str]:
    words: list[str] = []
    for part in segment.split("_"):
        words.extend(_CAMEL_WORD_RE.findall(part))
    return words or [segment]


def _segment_case_forms(segment: str) -> set[str]:
    words = _words(segment)
    snake = "_".join(w.lower() for w in words)
    upper = "".join(w[:1].upper() + w[1:].lower() for w in words)
    lower = words[0].lower() + "".join(w[:1].upper() + w[1:].lower() for w in words[1:])
    return {segment, snake, upper, lower}


def case_variants(name: str) -> set[str]:
    """Per dotted segment: original, snake_case, UpperCamelCase, lowerCamelCase."""
    if not name:
        raise ValueError("name must be nonempty")
    per_segment = [_segment_case_forms(seg) for seg in name.split(".")]
    return {".".join(combo) for combo in itertools.product(*(sorted(s) for s in per_segment))}


_PREFIX_SNAKE = ("is_", "has_")
_PREFIX_CAMEL = ("Is", "Has")


def _segment_prefix_forms(segment: str) -> set[str]:
    """Drop a leading is/has marker when present, otherwise add one."""
    forms = {segment}
    prefixed = False
    for pre in _PREFIX_SNAKE:
        if segment.startswith(pre) and len(segment) > len(pre):
            forms.add(segment[len(pre):])
            prefixed = True
    for pre in _PREFIX_CAMEL:
        rest = segment[len(pre):]
        if segment.startswith(pre) and rest[:1].isupper():
            forms.add(rest)
            prefixed = True
    if not prefixed:
        if segment[:1].isupper():
            forms.update(pre + segment for pre in _PREFIX_CAMEL)
        else:
            forms.update(pre + segment for pre in _PREFIX_SNAKE)
    return forms


def segment_variants(name: str) -> set[str]:
    """Per dotted segment: drop a leading is/has marker if present, add one if absent."""
    if not name:
        return {name}
    per_segment = [_segment_prefix_forms(seg) for seg in name.split(".")]
    return {".".join(combo) for combo in itertools.product(*(sorted(s) for s in per_segment))}


@dataclass(frozen=True)
class CorrectionTrace:
    original: str
    chosen: str | None
    variants_tried: int
    rule_path: tuple[str, ...] = ()


def _tagged_variants(name: str, with_segments: bool) -> dict[str, int]:
    """Variant -> fewest per-segment transformation count reaching it."""
    segments = name.split(".")
    per_segment: list[dict[str, int]] = []
    for seg in segments:
        options: dict[str, int] = {}
        for form in _segment_case_forms(seg):
            cost = 0 if form == seg else 1
            options[form] = min(options.get(form, cost), cost)
        if with_segments:
            for case_form, case_cost in list(options.items()):
                for pref_form in _segment_prefix_forms(case_form):
                    cost = case_cost + (0 if pref_form == case_form else 1)
                    if pref_form not in options or options[pref_form] > cost:
                        options[pref_form] = cost
        per_segment.append(options)
    out: dict[str, int] = {}
    for combo in itertools.product(*(sorted(o.items()) for o in per_segment)):
        variant = ".".join(form for form, _ in combo)
        cost = sum(c for _, c in combo)
        if variant not in out or out[variant] > cost:
            out[variant] = cost
    return out


def autocorrect(name: str, lexicon4: frozenset[str] | set[str], dictionary: NameDictionary) -> CorrectionTrace:
    """Resolve a name against the target lexicon; no match is a valid outcome."""
    hit = dictionary.lookup(name)
    if hit is not None:
        return CorrectionTrace(original=name, chosen=hit, variants_tried=0, rule_path=("dictionary",))
    if name in lexicon4:
        return CorrectionTrace(original=name, chosen=name, variants_tried=0, rule_path=())

    case_pool = _tagged_variants(name, with_segments=False)
    case_hits = [(cost, v) for v, cost in case_pool.items() if v in lexicon4 and v != name]
    if case_hits:
        cost, chosen = min(case_hits)
        return CorrectionTrace(
            original=name, chosen=chosen, variants_tried=len(case_pool), rule_path=("case",)
        )

    full_pool = _tagged_variants(name, with_segments=True)
    full_hits = [(cost, v) for v, cost in full_pool.items() if v in lexicon4 and v != name]
    if full_hits:
        cost, chosen = min(full_hits)
        path = ("segment",) if chosen in segment_variants(name) else ("case", "segment")
        return CorrectionTrace(
            original=name,
            chosen=chosen,
            variants_tried=len(case_pool) + len(full_pool),
            rule_path=path,
        )
    return CorrectionTrace(
        original=name, chosen=None, variants_tried=len(case_pool) + len(full_pool), rule_path=()
    )


def rewrite_candidate(
    parsed: ParsedCandidate,
    lexicon4: frozenset[str] | set[str],
    dictionary: NameDictionary,
) -> tuple[str, list[CorrectionTrace]]:
    """Replace every resolvable Candidate token; unknown names stay intact."""
    traces: list[CorrectionTrace] = []
    pieces: list[str] = []
    cursor = 0
    for tok in parsed.identifiers:
        if tok.kind is not TokenKind.CANDIDATE:
            continue
        trace = autocorrect(tok.text, lexicon4, dictionary)
        traces.append(trace)
        if trace.chosen is not None and trace.chosen != tok.text:
            start, end = tok.span
            pieces.append(parsed.signature[cursor:start])
            pieces.append(trace.chosen)
            cursor = end
    pieces.append(parsed.signature[cursor:])
    return "".join(pieces), traces


def normalize_statement(text: str) -> str:
    """NFC-normalize, collapse whitespace runs to single spaces, trim."""
    return " ".join(unicodedata.normalize("NFC", text).split())
