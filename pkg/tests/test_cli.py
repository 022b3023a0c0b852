import json

import pytest

from autoform.cli import main
from autoform.completion import prompt_fingerprint
from autoform.config import recorded_proof_grades_path, recorded_statement_runs_path, seed_declarations_path
from autoform.keywords import build_keyword_index
from autoform.pipeline import retrieve_examples
from autoform.prompting import build_statement_prompt
from autoform.retrieval import LexicalEmbeddingProvider, RetrievalConfig, build_embedding_index


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("AUTOFORM_CONFIG", raising=False)
    return tmp_path


def write_config(tmp_path, **overrides):
    data = {"provider": {"kind": "mock", "seed": 0}, "checker": {"kind": "mock"}}
    for key, value in overrides.items():
        section, _, name = key.partition("__")
        data.setdefault(section, {})[name] = value
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_ingest_and_index_round_trip(workdir, capsys):
    cfg = write_config(workdir)
    assert main(["--config", cfg, "ingest", str(seed_declarations_path())]) == 0
    assert (workdir / "corpus.jsonl").exists()
    assert main(["--config", cfg, "index"]) == 0
    assert (workdir / "embeddings.idx").exists()
    out = capsys.readouterr().out
    assert "indexed 4 records" in out


def test_translate_retrieved_scripted_winner(workdir, seed_corpus, target_docstring, reference_completion, capsys):
    # compute the retrieved prompt exactly as the CLI will, then script it
    embedder = LexicalEmbeddingProvider.fit(seed_corpus, dimension=1024)
    emb_index = build_embedding_index(seed_corpus, embedder)
    kw_index = build_keyword_index(seed_corpus)
    examples = retrieve_examples(
        target_docstring, seed_corpus, emb_index, kw_index, RetrievalConfig(k_sim=10, k_kw=4), embedder
    )
    prompt = build_statement_prompt(examples, target_docstring)
    script_path = workdir / "script.json"
    script_path.write_text(
        json.dumps({prompt_fingerprint(prompt.text): [reference_completion]}), encoding="utf-8"
    )
    cfg = write_config(workdir, provider__script=str(script_path))
    code = main(
        ["--config", cfg, "translate", "--docstring", target_docstring, "--retrieved", "--temp", "0", "-n", "1"]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "winner: theorem" in out
    assert "FiniteDimensional K V" in out


def test_translate_fixed_no_survivors(workdir, capsys):
    cfg = write_config(workdir)
    code = main(["--config", cfg, "translate", "--docstring", "Some docstring.", "--fixed", "-n", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert "winner: none" in out


def test_eval_statements_replay_reproduces_reference_cells(workdir, capsys):
    cfg = write_config(workdir)
    code = main(
        ["--config", cfg, "eval-statements", "--replay", str(recorded_statement_runs_path())]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "Greedy | 20 (18) | 21" in out
    assert "Filtered | 25 | 29 | 29 | 34 | 24 | 30" in out


def test_eval_statements_live_mini(workdir, capsys):
    cfg = write_config(workdir)
    code = main(
        ["--config", cfg, "eval-statements", "--categories", "silly", "--presets", "greedy_fixed"]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "Statement translation results" in out


def test_report_on_empty_archive(workdir, capsys):
    empty = workdir / "empty.jsonl"
    empty.write_text("", encoding="utf-8")
    code = main(["report", "--in", str(empty)])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("# Statement translation results")


def test_report_on_recorded_proof_grades(workdir, capsys):
    code = main(["report", "--in", str(recorded_proof_grades_path())])
    out = capsys.readouterr().out
    assert code == 0
    assert "scored 3: 22" in out


def test_eval_proofs_then_grade_then_report(workdir, capsys):
    cfg = write_config(workdir)
    archive_path = workdir / "archive.jsonl"
    tasks_path = workdir / "tasks.jsonl"
    tasks_path.write_text(
        json.dumps(
            {
                "id": "t1",
                "short_name": "toy_task",
                "nl_statement": "Toy\nEvery toy is small.",
                "nl_proof": "Trivially.",
            }
        )
        + "\n",
        encoding="utf-8",
    )
    code = main(["--config", cfg, "eval-proofs", "--archive", str(archive_path), "--tasks", str(tasks_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "archived 18 completions" in out

    completion_id = "toy_task:full:T0.4:O1"
    code = main(["grade", "--archive", str(archive_path), "--completion", completion_id, "--score", "3"])
    assert code == 0

    code = main(["report", "--in", str(archive_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "## toy_task" in out
    assert "scored 3: 1" in out


def test_prove_outputs_completion(workdir, capsys):
    cfg = write_config(workdir)
    code = main(["--config", cfg, "prove", "--task", "abs_convex", "--format", "outline", "-n", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert "--- completion 0" in out


def test_prove_unknown_task_is_user_error(workdir, capsys):
    cfg = write_config(workdir)
    code = main(["--config", cfg, "prove", "--task", "nope", "--format", "full"])
    assert code == 1
    assert "unknown proof task" in capsys.readouterr().err


def test_grade_out_of_range_is_user_error(workdir, capsys):
    cfg = write_config(workdir)
    archive_path = workdir / "archive.jsonl"
    tasks_path = workdir / "tasks.jsonl"
    tasks_path.write_text(
        json.dumps({"id": "t", "short_name": "t", "nl_statement": "S", "nl_proof": "P"}) + "\n",
        encoding="utf-8",
    )
    main(["--config", cfg, "eval-proofs", "--archive", str(archive_path), "--tasks", str(tasks_path)])
    capsys.readouterr()
    code = main(["grade", "--archive", str(archive_path), "--completion", "t:full:T0.4:O1", "--score", "5"])
    assert code == 1
    assert "out of range" in capsys.readouterr().err


def test_missing_config_file_is_user_error(workdir, capsys):
    code = main(["--config", "nope.json", "index"])
    assert code == 1
    assert "config file not found" in capsys.readouterr().err


def test_config_env_variable(workdir, monkeypatch, capsys):
    cfg = write_config(workdir)
    monkeypatch.setenv("AUTOFORM_CONFIG", cfg)
    code = main(["eval-statements", "--replay", str(recorded_statement_runs_path())])
    assert code == 0


def test_subcommands_are_golden_deterministic(workdir, capsys):
    # thin-adapter contract: identical invocations produce identical bytes
    cfg = write_config(workdir)
    outputs = []
    for _ in range(2):
        assert main(["--config", cfg, "eval-statements", "--replay", str(recorded_statement_runs_path())]) == 0
        outputs.append(capsys.readouterr().out.encode())
    assert outputs[0] == outputs[1]

    outputs = []
    for _ in range(2):
        assert main(["report", "--in", str(recorded_proof_grades_path())]) == 0
        outputs.append(capsys.readouterr().out.encode())
    assert outputs[0] == outputs[1]

    outputs = []
    for _ in range(2):
        assert (
            main(["--config", cfg, "translate", "--docstring", "Some docstring.", "--fixed", "-n", "3", "--temp", "0.8"])
            == 0
        )
        outputs.append(capsys.readouterr().out.encode())
    assert outputs[0] == outputs[1]
