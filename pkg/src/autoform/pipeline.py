"""End-to-end statement translation: prompt, complete, post-process, filter, vote."""
from __future__ import annotations

from dataclasses import dataclass, field

from .completion import CompletionProvider, RawCompletion, SamplingConfig, request_completions
from .corpus import Corpus, NameDictionary
from .elaboration import CheckResult, CheckStatus, check
from .keywords import KeywordIndex
from .postprocess import CorrectionTrace, ParsedCandidate, parse_completion, rewrite_candidate
from .prompting import (
    PromptExample,
    StatementPrompt,
    build_statement_prompt,
    fixed_examples,
)
from .retrieval import EmbeddingIndex, EmbeddingProvider, RetrievalConfig, select_examples
from .selection import group_candidates, select_best


@dataclass
class CompletionCandidate:
    """One raw completion with its parsed, translated, and checked forms."""

    index: int
    raw: RawCompletion
    parsed: ParsedCandidate | None = None
    translated: str | None = None
    traces: list[CorrectionTrace] = field(default_factory=list)
    check: CheckResult | None = None

    @property
    def elaborated(self) -> bool:
        return self.check is not None and self.check.status is CheckStatus.ELABORATED


@dataclass
class TranslationOutcome:
    prompt: StatementPrompt
    candidates: list[CompletionCandidate]
    winner: int | None = None            # candidate index chosen by voting
    infrastructure_failures: int = 0

    @property
    def survivors(self) -> list[CompletionCandidate]:
        return [c for c in self.candidates if c.elaborated]

    @property
    def elaborated(self) -> bool:
        return any(c.elaborated for c in self.candidates)

    @property
    def winner_candidate(self) -> CompletionCandidate | None:
        if self.winner is None:
            return None
        return self.candidates[self.winner]


def process_completion(
    index: int, raw: RawCompletion, corpus: Corpus, dictionary: NameDictionary, checker
) -> CompletionCandidate:
    cand = CompletionCandidate(index=index, raw=raw)
    try:
        cand.parsed = parse_completion(raw.text)
    except ValueError:
        return cand
    cand.translated, cand.traces = rewrite_candidate(cand.parsed, corpus.lexicon4, dictionary)
    cand.check = check(cand.translated, checker)
    return cand


def retrieve_examples(
    docstring: str,
    corpus: Corpus,
    embedding_index: EmbeddingIndex | None,
    keyword_index: KeywordIndex | None,
    retrieval_cfg: RetrievalConfig | None,
    embedder: EmbeddingProvider | None,
) -> list[PromptExample]:
    """Input-dependent example choice when the indexes are given, else fixed."""
    if embedding_index is None or keyword_index is None or retrieval_cfg is None or embedder is None:
        return fixed_examples(corpus)
    records = select_examples(docstring, corpus, embedding_index, keyword_index, retrieval_cfg, embedder)
    return [PromptExample(docstring=r.docstring, statement=r.statement) for r in records]


def translate_statement(
    docstring: str,
    corpus: Corpus,
    dictionary: NameDictionary,
    provider: CompletionProvider,
    checker,
    sampling: SamplingConfig,
    examples: list[PromptExample],
) -> TranslationOutcome:
    """Run the full translation pipeline for one docstring."""
    prompt = build_statement_prompt(examples, docstring)
    cfg = sampling
    if not cfg.stop_sequences:
        cfg = SamplingConfig(
            temperature=sampling.temperature,
            n=sampling.n,
            max_tokens=sampling.max_tokens,
            stop_sequences=prompt.stop_sequences,
            seed=sampling.seed,
        )
    completions = request_completions(prompt.text, cfg, provider)
    outcome = TranslationOutcome(prompt=prompt, candidates=[])
    for i, raw in enumerate(completions):
        outcome.candidates.append(process_completion(i, raw, corpus, dictionary, checker))

    outcome.infrastructure_failures = sum(
        1 for c in outcome.candidates if c.check is not None and c.check.unavailable
    )
    survivors = outcome.survivors
    if survivors:
        normalized = [c.check.normalized or "" for c in survivors]
        groups = group_candidates(normalized)
        winner_pos = select_best(groups)
        outcome.winner = survivors[winner_pos].index
    return outcome
