"""Command-line surface binding the pipeline end to end.

Exit codes: 0 success, 1 user error (bad flags, missing files, malformed
input), 2 infrastructure error (provider or checker unavailable).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import config as cfgmod
from .completion import (
    HttpCompletionProvider,
    MockCompletionProvider,
    ProviderError,
    SamplingConfig,
    load_script,
)
from .corpus import (
    CorpusFormatError,
    build_name_dictionary,
    ingest_declarations,
    load_corpus,
    load_keyword_postings,
    save_corpus,
)
from .elaboration import CheckerPool, ExternalChecker, MockChecker
from .evalharness import (
    CompletionArchive,
    EvalEnvironment,
    PRESETS,
    ReportFormat,
    emit_report,
    load_dataset,
    load_proof_tasks,
    load_recorded_outcomes,
    load_recorded_proof_grades,
    merge_reports,
    record_grade,
    render_proof_summary,
    run_default_proof_campaign,
    run_statement_eval,
    summarize,
)
from .keywords import KeywordIndex, build_keyword_index
from .pipeline import retrieve_examples, translate_statement
from .prompting import ProofFormat, ProofLevel, build_proof_prompt, compose_nl_block, with_gold_statement
from .retrieval import (
    LexicalEmbeddingProvider,
    RetrievalConfig,
    build_embedding_index,
    load_embedding_index,
    save_embedding_index,
)

USER_ERROR = 1
INFRA_ERROR = 2


class CliError(Exception):
    def __init__(self, message: str, code: int = USER_ERROR):
        super().__init__(message)
        self.code = code


def _load_app_config(args) -> cfgmod.AppConfig:
    try:
        return cfgmod.AppConfig.from_file(getattr(args, "config", None))
    except cfgmod.ConfigError as exc:
        raise CliError(str(exc)) from exc


def _load_corpus_and_dict(app: cfgmod.AppConfig):
    store = Path(app.corpus_store)
    try:
        if store.exists():
            corpus = load_corpus(store)
        else:
            corpus = ingest_declarations(cfgmod.seed_declarations_path())
        dict_path = app.dictionary_path or cfgmod.default_dictionary_path()
        dictionary = build_name_dictionary(dict_path)
    except (CorpusFormatError, OSError) as exc:
        raise CliError(str(exc)) from exc
    return corpus, dictionary


def _build_provider(app: cfgmod.AppConfig):
    if app.provider_kind == "mock":
        script = load_script(app.provider_script) if app.provider_script else {}
        return MockCompletionProvider(seed=app.provider_seed, script=script), "mock"
    if app.provider_kind == "http":
        if not app.provider_url or not app.provider_model:
            raise CliError("http provider requires provider.url and provider.model")
        return (
            HttpCompletionProvider(url=app.provider_url, model=app.provider_model),
            f"http:{app.provider_model}",
        )
    raise CliError(f"unknown provider kind {app.provider_kind!r}")


def _build_checker(app: cfgmod.AppConfig, corpus):
    if app.checker_kind == "mock":
        return MockChecker(lexicon4=corpus.lexicon4, context=tuple(app.checker_context))
    if app.checker_kind == "external":
        if not app.checker_cmd:
            raise CliError("external checker requires checker.cmd")
        if app.checker_pool > 1:
            return CheckerPool(
                app.checker_cmd,
                size=app.checker_pool,
                context=tuple(app.checker_context),
                timeout=app.checker_timeout,
            )
        return ExternalChecker(
            app.checker_cmd, context=tuple(app.checker_context), timeout=app.checker_timeout
        )
    raise CliError(f"unknown checker kind {app.checker_kind!r}")


def _build_retrieval(app: cfgmod.AppConfig, corpus):
    embedder = LexicalEmbeddingProvider.fit(corpus, dimension=app.embedding_dimension)
    path = Path(app.embeddings_path)
    if path.exists():
        index = load_embedding_index(path)
        if index.provider_tag != embedder.provider_tag:
            index = build_embedding_index(corpus, embedder)
    else:
        index = build_embedding_index(corpus, embedder)
    postings = load_keyword_postings(Path(app.corpus_store)) if Path(app.corpus_store).exists() else None
    if postings:
        kw_index = KeywordIndex(postings={p: tuple(ids) for p, ids in postings.items()})
    else:
        kw_index = build_keyword_index(corpus)
    return embedder, index, kw_index


def cmd_ingest(args) -> int:
    app = _load_app_config(args)
    try:
        corpus = ingest_declarations(args.dump)
    except (CorpusFormatError, OSError) as exc:
        raise CliError(str(exc)) from exc
    save_corpus(corpus, app.corpus_store)
    print(f"ingested {len(corpus)} records -> {app.corpus_store}")
    return 0


def cmd_index(args) -> int:
    app = _load_app_config(args)
    corpus, _ = _load_corpus_and_dict(app)
    embedder = LexicalEmbeddingProvider.fit(corpus, dimension=app.embedding_dimension)
    index = build_embedding_index(corpus, embedder)
    save_embedding_index(index, app.embeddings_path)
    kw_index = build_keyword_index(corpus)
    save_corpus(corpus, app.corpus_store, keyword_postings={p: list(ids) for p, ids in kw_index.postings.items()})
    print(f"indexed {len(corpus)} records: embeddings -> {app.embeddings_path}, keywords -> {app.corpus_store}")
    return 0


def cmd_translate(args) -> int:
    app = _load_app_config(args)
    corpus, dictionary = _load_corpus_and_dict(app)
    provider, _tag = _build_provider(app)
    checker = _build_checker(app, corpus)

    if args.retrieved:
        embedder, emb_index, kw_index = _build_retrieval(app, corpus)
        retrieval_cfg = RetrievalConfig(
            k_sim=args.k_sim if args.k_sim is not None else app.k_sim,
            k_kw=args.k_kw if args.k_kw is not None else app.k_kw,
            per_keyword_cap=app.per_keyword_cap,
        )
        examples = retrieve_examples(
            args.docstring, corpus, emb_index, kw_index, retrieval_cfg, embedder
        )
    else:
        examples = retrieve_examples(args.docstring, corpus, None, None, None, None)

    sampling = SamplingConfig(
        temperature=args.temp if args.temp is not None else app.temperature,
        n=args.n if args.n is not None else app.n_completions,
        max_tokens=app.max_tokens,
        seed=app.provider_seed,
    )
    try:
        outcome = translate_statement(
            args.docstring, corpus, dictionary, provider, checker, sampling, examples
        )
    except ProviderError as exc:
        raise CliError(f"provider failure: {exc}", INFRA_ERROR) from exc

    for cand in outcome.candidates:
        status = cand.check.status.value if cand.check else "unparsed"
        marker = "*" if outcome.winner == cand.index else " "
        print(f"{marker} [{cand.index}] {status}: {cand.translated or cand.raw.text}")
    if outcome.winner_candidate is not None:
        print(f"winner: theorem {outcome.winner_candidate.translated}")
    else:
        print("winner: none (no completion elaborated)")
    if outcome.infrastructure_failures:
        print(f"warning: {outcome.infrastructure_failures} checker-unavailable results", file=sys.stderr)
        return INFRA_ERROR
    return 0


_LEVELS = {
    "full": ProofLevel.FULL_PROOF,
    "outline": ProofLevel.PROOF_OUTLINE,
    "premises": ProofLevel.PROOF_WITH_PREMISES,
}


def cmd_prove(args) -> int:
    app = _load_app_config(args)
    tasks = load_proof_tasks(args.tasks or cfgmod.proof_tasks_path())
    matches = [t for t in tasks if t.id == args.task or t.short_name == args.task]
    if not matches:
        raise CliError(f"unknown proof task {args.task!r}")
    task = matches[0]
    fmt = ProofFormat(level=_LEVELS[args.format], comments=not args.no_comments)
    prompt = build_proof_prompt(fmt, compose_nl_block(task.nl_statement, task.nl_proof))
    if args.gold:
        if not task.gold_statement:
            raise CliError(f"task {task.short_name} has no gold statement")
        prompt = with_gold_statement(prompt, task.gold_statement)

    provider, _tag = _build_provider(app)
    sampling = SamplingConfig(
        temperature=args.temp if args.temp is not None else 0.8,
        n=args.n if args.n is not None else 1,
        max_tokens=app.max_tokens,
        seed=app.provider_seed,
    )
    try:
        completions = provider.complete(prompt.text, sampling)
    except ProviderError as exc:
        raise CliError(f"provider failure: {exc}", INFRA_ERROR) from exc
    for comp in completions:
        print(f"--- completion {comp.index} ({comp.finish_reason})")
        print(comp.text)
    return 0


def cmd_eval_statements(args) -> int:
    app = _load_app_config(args)
    if args.replay:
        report = load_recorded_outcomes(args.replay)
    else:
        corpus, dictionary = _load_corpus_and_dict(app)
        provider, tag = _build_provider(app)
        checker = _build_checker(app, corpus)
        embedder, emb_index, kw_index = _build_retrieval(app, corpus)
        env = EvalEnvironment(
            corpus=corpus,
            dictionary=dictionary,
            provider=provider,
            checker=checker,
            embedding_index=emb_index,
            keyword_index=kw_index,
            embedder=embedder,
            provider_tag=tag,
        )
        dataset = []
        for category in args.categories.split(","):
            path = args.dataset or cfgmod.dataset_path(category.strip())
            dataset.extend(load_dataset(path))
        presets = [PRESETS[name.strip()] for name in args.presets.split(",") if name.strip()]
        reports = [run_statement_eval(dataset, preset, env) for preset in presets]
        report = merge_reports(reports)
    print(emit_report(report, ReportFormat(args.format)))
    return 0


def cmd_eval_proofs(args) -> int:
    app = _load_app_config(args)
    tasks = load_proof_tasks(args.tasks or cfgmod.proof_tasks_path())
    provider, _tag = _build_provider(app)
    archive = CompletionArchive(args.archive)
    run_default_proof_campaign(tasks, provider, archive, seed=app.provider_seed)
    print(f"archived {len(archive)} completions -> {args.archive}")
    return 0


def cmd_grade(args) -> int:
    archive = CompletionArchive(args.archive)
    try:
        record_grade(archive, args.completion, args.score, grader=args.grader, note=args.note)
    except Exception as exc:
        raise CliError(str(exc)) from exc
    print(f"recorded grade {args.score} for {args.completion}")
    return 0


def cmd_report(args) -> int:
    path = Path(args.archive)
    if not path.exists():
        raise CliError(f"archive not found: {path}")
    first_kind = None
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            first_kind = json.loads(line).get("kind")
            break
    if first_kind == "proof_grades":
        summary = summarize(load_recorded_proof_grades(path))
        print(render_proof_summary(summary))
    elif first_kind in ("completion", "grade"):
        summary = summarize(CompletionArchive(path))
        print(render_proof_summary(summary))
    else:
        report = load_recorded_outcomes(path)
        print(emit_report(report, ReportFormat(args.format)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autoform",
        description="Translate natural-language mathematics into proof-assistant declarations.",
    )
    parser.add_argument("--config", help="config file (JSON); defaults to $AUTOFORM_CONFIG")
    # accepted before or after the subcommand; SUPPRESS keeps the subparser
    # from clobbering a value parsed at the top level
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=lambda **kw: argparse.ArgumentParser(parents=[common], **kw))

    p = sub.add_parser("ingest", help="load a declaration dump into the corpus store")
    p.add_argument("dump")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="build embedding and keyword indexes")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("translate", help="translate one docstring")
    p.add_argument("--docstring", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--fixed", action="store_true", help="use the fixed example set (default)")
    mode.add_argument("--retrieved", action="store_true", help="input-dependent example selection")
    p.add_argument("--k-sim", type=int, default=None)
    p.add_argument("--k-kw", type=int, default=None)
    p.add_argument("--temp", type=float, default=None)
    p.add_argument("-n", type=int, default=None)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("prove", help="emit proof-format completions for a task")
    p.add_argument("--task", required=True)
    p.add_argument("--format", choices=sorted(_LEVELS), required=True)
    p.add_argument("--no-comments", action="store_true")
    p.add_argument("--gold", action="store_true", help="fix the formal statement header")
    p.add_argument("--tasks", help="tasks file (JSON-Lines); defaults to the bundled set")
    p.add_argument("--temp", type=float, default=None)
    p.add_argument("-n", type=int, default=None)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("eval-statements", help="run or replay the statement evaluation")
    p.add_argument("--replay", help="recorded-outcome fixture to replay")
    p.add_argument("--dataset", help="dataset file; defaults to the bundled categories")
    p.add_argument("--categories", default="theorems,silly,false")
    p.add_argument("--presets", default="greedy_fixed,filtered_fixed")
    p.add_argument("--format", choices=["md", "csv"], default="md")
    p.set_defaults(func=cmd_eval_statements)

    p = sub.add_parser("eval-proofs", help="archive proof completions for grading")
    p.add_argument("--archive", required=True)
    p.add_argument("--tasks", help="tasks file; defaults to the bundled set")
    p.set_defaults(func=cmd_eval_proofs)

    p = sub.add_parser("grade", help="record a human grade for a completion")
    p.add_argument("--archive", required=True)
    p.add_argument("--completion", required=True)
    p.add_argument("--score", type=int, required=True)
    p.add_argument("--grader", default="")
    p.add_argument("--note", default="")
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("report", help="render an archive or recorded fixture")
    p.add_argument("--in", dest="archive", required=True)
    p.add_argument("--format", choices=["md", "csv"], default="md")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ProviderError, OSError) as exc:
        print(f"infrastructure error: {exc}", file=sys.stderr)
        return INFRA_ERROR


if __name__ == "__main__":
    sys.exit(main())
