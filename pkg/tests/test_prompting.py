from importlib import resources

import pytest

from autoform.prompting import (
    ALL_PROOF_FORMATS,
    COMMENTED_PROOF_FORMATS,
    ProofFormat,
    ProofLevel,
    PromptError,
    build_proof_prompt,
    build_statement_prompt,
    compose_nl_block,
    fixed_examples,
    proof_examples_text,
    with_gold_statement,
)


def reference_prompt_text() -> str:
    text = resources.files("autoform.assets").joinpath("reference_statement_prompt.txt").read_text("utf-8")
    return text.replace("\r\n", "\n")   # documented newline normalization


def test_statement_prompt_reproduces_reference(seed_corpus, target_docstring):
    prompt = build_statement_prompt(fixed_examples(seed_corpus), target_docstring)
    assert prompt.text == reference_prompt_text()


def test_statement_prompt_zero_examples():
    prompt = build_statement_prompt([], "X")
    assert prompt.text == "/-- X -/\ntheorem "


def test_statement_prompt_block_count(seed_corpus, target_docstring):
    examples = fixed_examples(seed_corpus)
    for n in range(len(examples) + 1):
        prompt = build_statement_prompt(examples[:n], target_docstring)
        assert prompt.text.count("/--") == n + 1


def test_statement_prompt_ends_with_dangling_theorem(seed_corpus, target_docstring):
    prompt = build_statement_prompt(fixed_examples(seed_corpus), target_docstring)
    assert prompt.text.endswith("theorem ")
    assert not prompt.text.endswith("theorem \n")


def test_statement_prompt_default_stop_sequences(seed_corpus, target_docstring):
    prompt = build_statement_prompt(fixed_examples(seed_corpus), target_docstring)
    assert prompt.stop_sequences == ("/--",)


def test_statement_prompt_rejects_empty_target(seed_corpus):
    with pytest.raises(PromptError):
        build_statement_prompt(fixed_examples(seed_corpus), "")


def test_split_reconstructs_docstrings(seed_corpus, target_docstring):
    examples = fixed_examples(seed_corpus)
    prompt = build_statement_prompt(examples, target_docstring)
    pieces = prompt.text.split("/--")[1:]
    docs = [p[1 : p.index(" -/")] for p in pieces]
    assert docs[:-1] == [ex.docstring for ex in examples]
    assert docs[-1] == target_docstring


def test_template_determinism(seed_corpus, target_docstring):
    a = build_statement_prompt(fixed_examples(seed_corpus), target_docstring)
    b = build_statement_prompt(fixed_examples(seed_corpus), target_docstring)
    assert a.text == b.text


def test_six_distinct_formats():
    assert len(ALL_PROOF_FORMATS) == 6
    assert len(set(ALL_PROOF_FORMATS)) == 6
    assert len(COMMENTED_PROOF_FORMATS) == 3


NL_BLOCK = compose_nl_block(
    "Toy Statement\nEvery even number doubled is even.",
    "Doubling preserves evenness by definition.",
)


@pytest.mark.parametrize("fmt", ALL_PROOF_FORMATS, ids=lambda f: f.slug)
def test_proof_prompt_starts_with_its_asset(fmt):
    prompt = build_proof_prompt(fmt, NL_BLOCK)
    assert prompt.text.startswith(proof_examples_text(fmt))
    assert prompt.text.endswith("theorem ")


def test_full_proof_asset_first_example(proof_tasks):
    text = proof_examples_text(ProofFormat(ProofLevel.FULL_PROOF, comments=True))
    first_example = text.split("/--`theorem`")[1]
    assert "apply set.inter_subset_left" in first_example


def test_outline_proof_steps_are_sorry():
    text = proof_examples_text(ProofFormat(ProofLevel.PROOF_OUTLINE, comments=True))
    # every step body is a sorry placeholder (or opens a sub-block of them);
    # no concrete tactic invocations anywhere
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith(("have ", "show ")) and ", from" in stripped:
            assert stripped.endswith(("from sorry,", "by {")), line
        if stripped.startswith(("calc", "...")) and ": by" in stripped:
            assert stripped.endswith("by sorry") or stripped.endswith("by sorry,"), line
    for tactic in ("apply ", "rw ", "ring", "linarith", "auto ["):
        assert tactic not in text, tactic


def test_premises_use_auto_tactic():
    text = proof_examples_text(ProofFormat(ProofLevel.PROOF_WITH_PREMISES, comments=True))
    assert "from by auto [set.inter_subset_left]" in text
    assert "by auto [sq, mul_comm] using [ring]" in text


@pytest.mark.parametrize("level", list(ProofLevel), ids=lambda l: l.value)
def test_comments_off_variants_have_no_comment_lines(level):
    text = proof_examples_text(ProofFormat(level, comments=False))
    assert not [ln for ln in text.splitlines() if ln.lstrip().startswith("--")]
    # docstring blocks survive comment stripping
    assert text.count("/--`theorem`") == 3


def test_proof_prompt_contains_three_examples_plus_target():
    prompt = build_proof_prompt(ProofFormat(ProofLevel.FULL_PROOF, comments=True), NL_BLOCK)
    assert prompt.text.count("/--`theorem`") == 4
    assert NL_BLOCK in prompt.text


def test_compose_nl_block_appends_qed_once():
    block = compose_nl_block("S", "P {{qed}}")
    assert block.count("{{qed}}") == 1
    block2 = compose_nl_block("S", "P")
    assert block2.endswith("{{qed}}")


def test_with_gold_statement(proof_tasks):
    task = next(t for t in proof_tasks if t.short_name == "nesbitt_ineq")
    prompt = build_proof_prompt(
        ProofFormat(ProofLevel.FULL_PROOF, comments=True),
        compose_nl_block(task.nl_statement, task.nl_proof),
    )
    gold = with_gold_statement(prompt, task.gold_statement)
    assert gold.text.endswith(":=\nbegin\n")
    assert task.gold_statement in gold.text


def test_with_gold_statement_idempotent(proof_tasks):
    task = next(t for t in proof_tasks if t.short_name == "nesbitt_ineq")
    prompt = build_proof_prompt(
        ProofFormat(ProofLevel.PROOF_OUTLINE, comments=True),
        compose_nl_block(task.nl_statement, task.nl_proof),
    )
    once = with_gold_statement(prompt, task.gold_statement)
    twice = with_gold_statement(once, task.gold_statement)
    assert once.text == twice.text


def test_with_gold_statement_length_growth(proof_tasks):
    task = next(t for t in proof_tasks if t.short_name == "bernoulli_polynomial_eval")
    prompt = build_proof_prompt(
        ProofFormat(ProofLevel.PROOF_WITH_PREMISES, comments=True),
        compose_nl_block(task.nl_statement, task.nl_proof),
    )
    gold = with_gold_statement(prompt, task.gold_statement)
    injected = f"{task.gold_statement} :=\nbegin\n"
    assert len(gold.text) == len(prompt.text) + len(injected)


def test_with_gold_strips_trailing_assignment_marker():
    prompt = build_proof_prompt(ProofFormat(ProofLevel.FULL_PROOF, comments=True), NL_BLOCK)
    a = with_gold_statement(prompt, "foo (n : ℕ) : n = n")
    b = with_gold_statement(prompt, "foo (n : ℕ) : n = n :=")
    assert a.text == b.text
