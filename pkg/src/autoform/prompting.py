"""Few-shot prompt assembly for statement translation and proof translation.

Statement prompts follow a fixed template: each example is rendered as a
docstring block followed by its `theorem` line, and the prompt ends with the
target docstring and a dangling ``theorem `` for the model to complete.

Proof prompts prepend one of three embedded few-shot assets (full proof,
proof outline with `sorry` placeholders, outline with premise lists passed
to an `auto` tactic), each available with or without interleaved natural
language comments: six formats in total.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources

from .corpus import Corpus, DeclRecord

DEFAULT_STOP_SEQUENCES = ("/--",)


class PromptError(ValueError):
    pass


@dataclass(frozen=True)
class PromptExample:
    docstring: str
    statement: str

    def __post_init__(self) -> None:
        if not self.docstring or not self.statement:
            raise PromptError("prompt example needs a docstring and a statement")


@dataclass(frozen=True)
class StatementPrompt:
    text: str
    stop_sequences: tuple[str, ...] = DEFAULT_STOP_SEQUENCES


class ProofLevel(enum.Enum):
    FULL_PROOF = "full"
    PROOF_OUTLINE = "outline"
    PROOF_WITH_PREMISES = "premises"


@dataclass(frozen=True)
class ProofFormat:
    level: ProofLevel
    comments: bool = True

    @property
    def slug(self) -> str:
        return f"{self.level.value}{'' if self.comments else '-plain'}"


ALL_PROOF_FORMATS: tuple[ProofFormat, ...] = tuple(
    ProofFormat(level, comments) for level in ProofLevel for comments in (True, False)
)

COMMENTED_PROOF_FORMATS: tuple[ProofFormat, ...] = tuple(
    f for f in ALL_PROOF_FORMATS if f.comments
)


@dataclass(frozen=True)
class ProofPrompt:
    text: str
    format: ProofFormat
    gold_header: str = ""   # set once a fixed formal statement has been injected


def example_from_record(record: DeclRecord) -> PromptExample:
    return PromptExample(docstring=record.docstring, statement=record.statement)


def fixed_examples(corpus: Corpus, ids: tuple[int, ...] | None = None) -> list[PromptExample]:
    """The configurable fixed-example set; defaults to the full seed corpus order."""
    if ids is None:
        return [example_from_record(r) for r in corpus.records]
    return [example_from_record(corpus.record(i)) for i in ids]


def build_statement_prompt(examples: list[PromptExample], target_docstring: str) -> StatementPrompt:
    """Render examples and the target into the completion prompt.

    Each example becomes ``/-- {docstring} -/\\ntheorem {statement}\\n\\n``;
    the target becomes ``/-- {target} -/\\ntheorem `` with a trailing space
    and no newline, so the model continues the statement directly.
    """
    if not target_docstring:
        raise PromptError("target docstring must be nonempty")
    parts = [f"/-- {ex.docstring} -/\ntheorem {ex.statement}\n\n" for ex in examples]
    parts.append(f"/-- {target_docstring} -/\ntheorem ")
    return StatementPrompt(text="".join(parts))


_ASSET_BY_LEVEL = {
    ProofLevel.FULL_PROOF: "full.txt",
    ProofLevel.PROOF_OUTLINE: "outline.txt",
    ProofLevel.PROOF_WITH_PREMISES: "premises.txt",
}


def _load_asset(name: str) -> str:
    path = resources.files("autoform.assets").joinpath("proof_prompts").joinpath(name)
    try:
        return path.read_text("utf-8")
    except FileNotFoundError as exc:
        raise PromptError(f"missing proof prompt asset {name!r}") from exc


def strip_comment_lines(text: str) -> str:
    """Drop lines whose first non-blank characters are `--` (plain-format variant)."""
    kept = [ln for ln in text.split("\n") if not ln.lstrip().startswith("--")]
    return "\n".join(kept)


def proof_examples_text(fmt: ProofFormat) -> str:
    """The embedded few-shot examples for a format, comments kept or removed."""
    text = _load_asset(_ASSET_BY_LEVEL[fmt.level])
    if not fmt.comments:
        text = strip_comment_lines(text)
    return text


def compose_nl_block(nl_statement: str, nl_proof: str) -> str:
    """Target natural-language block in the envelope the examples use."""
    block = f"{nl_statement}\n`proof`\n{nl_proof}"
    if not nl_proof.rstrip().endswith("{{qed}}"):
        block += "\n{{qed}}"
    return block


def build_proof_prompt(fmt: ProofFormat, target_nl: str) -> ProofPrompt:
    """Embedded examples for the format, then the target wrapped in the same
    envelope, ending where the model must continue."""
    if not target_nl:
        raise PromptError("target block must be nonempty")
    text = proof_examples_text(fmt) + "\n" + f"/--`theorem`\n{target_nl}\n-/\ntheorem "
    return ProofPrompt(text=text, format=fmt)


def with_gold_statement(prompt: ProofPrompt, gold_statement: str) -> ProofPrompt:
    """Fix the formal theorem header so the model completes only the proof body."""
    if not gold_statement:
        raise PromptError("gold statement must be nonempty")
    core = gold_statement.strip()
    if core.endswith(":="):
        core = core[:-2].rstrip()
    injection = f"{core} :=\nbegin\n"
    if prompt.gold_header == injection and prompt.text.endswith(injection):
        return prompt
    return ProofPrompt(text=prompt.text + injection, format=prompt.format, gold_header=injection)
