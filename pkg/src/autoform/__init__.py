"""Retrieval-augmented translation of natural-language mathematics into
formal proof-assistant declarations, plus the evaluation harness around it."""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    DeclRecord,
    Dialect,
    NameDictionary,
    build_name_dictionary,
    ingest_declarations,
    lexicon_contains,
    load_corpus,
    save_corpus,
)
from .keywords import KeywordIndex, KeywordScore, build_keyword_index, extract_keywords, records_for_keyword
from .retrieval import (
    EmbeddingIndex,
    EmbeddingVector,
    LexicalEmbeddingProvider,
    RetrievalConfig,
    SimilarityHit,
    build_embedding_index,
    cosine,
    embed,
    select_examples,
    top_k_similar,
)
from .prompting import (
    ProofFormat,
    ProofLevel,
    ProofPrompt,
    PromptExample,
    StatementPrompt,
    build_proof_prompt,
    build_statement_prompt,
    with_gold_statement,
)
from .completion import (
    HttpCompletionProvider,
    MockCompletionProvider,
    RawCompletion,
    SamplingConfig,
    mock_with_script,
    request_completions,
)
from .postprocess import (
    CorrectionTrace,
    ParsedCandidate,
    autocorrect,
    case_variants,
    normalize_statement,
    parse_completion,
    rewrite_candidate,
    segment_variants,
)
from .elaboration import (
    CheckRequest,
    CheckResult,
    CheckStatus,
    ExternalChecker,
    MockChecker,
    check,
    filter_elaborated,
)
from .selection import VoteGroup, group_candidates, select_best
from .pipeline import CompletionCandidate, TranslationOutcome, translate_statement
from .evalharness import (
    Category,
    CompletionArchive,
    DatasetItem,
    ProofTask,
    ReportFormat,
    RunConfig,
    RunReport,
    emit_report,
    load_dataset,
    load_proof_tasks,
    record_grade,
    run_proof_eval,
    run_statement_eval,
    summarize,
)
