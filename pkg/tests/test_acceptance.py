"""Acceptance suite: one test per acceptance criterion, each printing a
pass/fail line and enforcing its runtime budget.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""
import random
import time
from contextlib import contextmanager
from importlib import resources

import numpy as np
import pytest

from test_keywords import make_sentences, oracle_extract
from test_postprocess import build_fixture_lexicon, oracle_autocorrect
from test_retrieval import FixedProvider, brute_force_top_k
from test_selection import all_partitions, oracle_select

from autoform.completion import MockCompletionProvider, script_entry
from autoform.config import (
    dataset_path,
    recorded_proof_grades_path,
    recorded_statement_runs_path,
)
from autoform.corpus import NameDictionary
from autoform.elaboration import MockChecker
from autoform.evalharness import (
    EvalEnvironment,
    PromptMode,
    ReportFormat,
    RunConfig,
    emit_report,
    load_dataset,
    load_recorded_outcomes,
    load_recorded_proof_grades,
    median_cell,
    run_statement_eval,
    summarize,
)
from autoform.keywords import build_keyword_index, extract_keywords
from autoform.postprocess import autocorrect
from autoform.prompting import (
    ALL_PROOF_FORMATS,
    build_statement_prompt,
    fixed_examples,
    proof_examples_text,
)
from autoform.retrieval import (
    EmbeddingIndex,
    EmbeddingVector,
    LexicalEmbeddingProvider,
    build_embedding_index,
    top_k_similar,
)
from autoform.selection import VoteGroup, group_candidates, select_best


@contextmanager
def criterion(name: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    elapsed = time.perf_counter() - start
    print(f"[PASS] {name} ({elapsed:.2f}s)")
    assert elapsed < budget_seconds, f"{name} exceeded {budget_seconds}s budget: {elapsed:.2f}s"


def test_criterion_prompt_fixture(seed_corpus, target_docstring):
    with criterion("prompt fixture reproduced byte-exactly", 1.0):
        prompt = build_statement_prompt(fixed_examples(seed_corpus), target_docstring)
        asset = (
            resources.files("autoform.assets")
            .joinpath("reference_statement_prompt.txt")
            .read_text("utf-8")
            .replace("\r\n", "\n")
        )
        assert prompt.text == asset


def test_criterion_proof_prompt_assets():
    with criterion("proof prompts start with byte-exact assets", 1.0):
        from autoform.prompting import build_proof_prompt, compose_nl_block

        block = compose_nl_block("T\nStatement.", "Proof.")
        for fmt in ALL_PROOF_FORMATS:
            prompt = build_proof_prompt(fmt, block)
            assert prompt.text.startswith(proof_examples_text(fmt)), fmt.slug
            if not fmt.comments:
                lines = proof_examples_text(fmt).splitlines()
                assert not [ln for ln in lines if ln.lstrip().startswith("--")], fmt.slug


def test_criterion_retrieval_oracle():
    with criterion("top-k equals brute-force argsort on 200 random corpora", 30.0):
        rng = random.Random(20240901)
        for trial in range(200):
            n_docs = rng.randrange(900, 1001) if trial % 40 == 0 else rng.randrange(1, 250)
            dim = rng.randrange(64, 1025)
            k = rng.randrange(0, 21)
            npr = np.random.RandomState(trial)
            matrix = npr.standard_normal((n_docs, dim))
            for _ in range(min(n_docs // 3, 10)):   # plant exact ties
                src, dst = rng.randrange(n_docs), rng.randrange(n_docs)
                matrix[dst] = matrix[src] * rng.choice([1.0, 2.0, 4.0, 0.5])
            index = EmbeddingIndex(
                record_ids=tuple(range(1, n_docs + 1)), matrix=matrix, provider_tag="fixed/1"
            )
            query = npr.standard_normal(dim)
            provider = FixedProvider("fixed/1", {"q": query})
            got = top_k_similar("q", index, k, provider)
            want = brute_force_top_k(index, EmbeddingVector.of(query), k)
            assert [(h.record_id, h.score) for h in got] == [(rid, s) for s, rid in want]


def test_criterion_keyword_oracle():
    with criterion("keyword scores match independent scorer on 100 texts", 20.0):
        rng = random.Random(31337)
        for _ in range(100):
            sentences = make_sentences(rng, max_tokens=50)
            text = " ".join(" ".join(words) + "." for words in sentences)
            got = extract_keywords(text, max_ngram=3, top_n=12)
            want = oracle_extract(sentences, max_ngram=3, top_n=12)
            assert len(got) == len(want)
            for kw, (score, _, phrase) in zip(got, want):
                assert kw.phrase == phrase
                assert abs(kw.score - score) <= 1e-9


def test_criterion_autocorrection(seed_corpus):
    with criterion("auto-correction resolves reference names and matches oracle", 10.0):
        empty = NameDictionary()
        expected = {
            "division_ring": "DivisionRing",
            "add_comm_group": "AddCommGroup",
            "module.rank": "Module.rank",
            "finite_dimensional": "FiniteDimensional",
        }
        for old, new in expected.items():
            assert autocorrect(old, seed_corpus.lexicon4, empty).chosen == new

        lexicon, probes = build_fixture_lexicon()
        assert len(lexicon) >= 200
        frozen = frozenset(lexicon)
        for name in probes:
            got = autocorrect(name, frozen, empty).chosen
            assert got == oracle_autocorrect(name, lexicon, {}), name


def test_criterion_voting():
    with criterion("voting equals exhaustive argmax oracle over all partitions <= 5", 10.0):
        for n in range(1, 6):
            for partition in all_partitions(n):
                ordered = sorted([sorted(g) for g in partition], key=lambda g: g[0])
                groups = [VoteGroup(members=tuple(g), key=f"k{g[0]}") for g in ordered]
                assert select_best(groups) == oracle_select(ordered)
        distinct = group_candidates([f"stmt-{i}" for i in range(5)])
        assert select_best(distinct) == 0


def test_criterion_table_replay():
    with criterion("recorded-outcome replay reproduces every reference cell", 10.0):
        report = load_recorded_outcomes(recorded_statement_runs_path())
        table1 = {
            ("theorems", "greedy_fixed"): 20,
            ("theorems", "greedy_t02_fixed"): 18,
            ("theorems", "greedy_input"): 21,
            ("theorems", "filtered_fixed"): 25,
            ("theorems", "filtered_input"): 29,
            ("silly", "greedy_fixed"): 19,
            ("silly", "greedy_t02_fixed"): 21,
            ("silly", "greedy_input"): 28,
            ("silly", "filtered_fixed"): 29,
            ("silly", "filtered_input"): 34,
            ("false", "greedy_fixed"): 15,
            ("false", "greedy_t02_fixed"): 16,
            ("false", "greedy_input"): 23,
            ("false", "filtered_fixed"): 24,
            ("false", "filtered_input"): 30,
        }
        for key, value in table1.items():
            assert report.median(*key) == value, key
        rows = report.grade_rows
        assert (rows["false"].elaborated, rows["silly"].elaborated, rows["theorems"].elaborated) == (32, 34, 33)

        archive = load_recorded_proof_grades(recorded_proof_grades_path())
        summary = summarize(archive)
        assert summary.total_graded == 288
        assert summary.count_scored(3) == 22


def test_criterion_end_to_end_determinism(seed_corpus, name_dict):
    with criterion("seeded pipeline emits byte-identical reports across runs", 60.0):
        items = load_dataset(dataset_path("silly"))[:10] + load_dataset(dataset_path("theorems"))[:10]
        valid = "{K : Type u} [division_ring K] : nontrivial K"
        examples = fixed_examples(seed_corpus)
        script = {}
        for item in items[:12]:
            prompt = build_statement_prompt(examples, item.nl_statement)
            fp, texts = script_entry(prompt.text, [valid])
            script[fp] = texts
        cfg = RunConfig("det", PromptMode.FIXED, 0.8, 5, runs=3, seed=99)
        outputs = []
        for _ in range(2):
            embedder = LexicalEmbeddingProvider.fit(seed_corpus)
            env = EvalEnvironment(
                corpus=seed_corpus,
                dictionary=name_dict,
                provider=MockCompletionProvider(seed=99, script=dict(script)),
                checker=MockChecker(lexicon4=seed_corpus.lexicon4),
                embedding_index=build_embedding_index(seed_corpus, embedder),
                keyword_index=build_keyword_index(seed_corpus),
                embedder=embedder,
                provider_tag="mock:99",
            )
            report = run_statement_eval(items, cfg, env)
            outputs.append(
                (emit_report(report, ReportFormat.MARKDOWN) + emit_report(report, ReportFormat.CSV)).encode()
            )
        assert outputs[0] == outputs[1]


def test_criterion_median_semantics():
    with criterion("reported cell is the middle order statistic on 1000 triples", 5.0):
        rng = random.Random(4242)
        for _ in range(1000):
            triple = [rng.randrange(0, 41) for _ in range(3)]
            assert median_cell(triple) == sorted(triple)[1]
