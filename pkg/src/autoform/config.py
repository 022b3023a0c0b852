"""Application configuration: one JSON file, environment overrides, flag wins.

Documented key paths (all optional, defaults shown):

    corpus.store            path of the saved corpus ("corpus.jsonl")
    corpus.dictionary       tab-separated name-translation file (bundled default)
    index.embeddings        path of the embedding index ("embeddings.idx")
    index.dimension         built-in embedder dimension (1024)
    provider.kind           "mock" | "http"
    provider.url/.model     HTTP completions endpoint and model name
    provider.seed           mock seed (0)
    provider.script         path of a scripted-mock JSON file
    checker.kind            "mock" | "external"
    checker.cmd             argv list of the external checker worker
    checker.timeout         seconds per check (30)
    checker.pool            worker count (1)
    checker.context         import list sent with each request
    retrieval.k_sim/.k_kw/.per_keyword_cap
    sampling.temperature/.n/.max_tokens

Environment: ``AUTOFORM_CONFIG`` points at the config file and
``AUTOFORM_API_KEY`` carries the HTTP provider token.  Precedence is
flag > environment > file > default.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

CONFIG_ENV = "AUTOFORM_CONFIG"
API_KEY_ENV = "AUTOFORM_API_KEY"


class ConfigError(ValueError):
    pass


@dataclass
class AppConfig:
    corpus_store: str = "corpus.jsonl"
    dictionary_path: str | None = None        # None = bundled default
    embeddings_path: str = "embeddings.idx"
    embedding_dimension: int = 1024
    provider_kind: str = "mock"
    provider_url: str = ""
    provider_model: str = ""
    provider_seed: int = 0
    provider_script: str | None = None
    checker_kind: str = "mock"
    checker_cmd: list[str] = field(default_factory=list)
    checker_timeout: float = 30.0
    checker_pool: int = 1
    checker_context: list[str] = field(default_factory=list)
    k_sim: int = 10
    k_kw: int = 4
    per_keyword_cap: int = 2
    temperature: float = 0.8
    n_completions: int = 15
    max_tokens: int = 2000
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path | None = None) -> "AppConfig":
        cfg = cls()
        if path is None:
            env_path = os.environ.get(CONFIG_ENV)
            path = Path(env_path) if env_path else None
        if path is not None:
            try:
                data = json.loads(Path(path).read_text(encoding="utf-8"))
            except FileNotFoundError as exc:
                raise ConfigError(f"config file not found: {path}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
            cfg._apply(data)
            cfg.raw = data
        return cfg

    def _apply(self, data: dict) -> None:
        corpus = data.get("corpus", {})
        self.corpus_store = corpus.get("store", self.corpus_store)
        self.dictionary_path = corpus.get("dictionary", self.dictionary_path)
        index = data.get("index", {})
        self.embeddings_path = index.get("embeddings", self.embeddings_path)
        self.embedding_dimension = int(index.get("dimension", self.embedding_dimension))
        provider = data.get("provider", {})
        self.provider_kind = provider.get("kind", self.provider_kind)
        self.provider_url = provider.get("url", self.provider_url)
        self.provider_model = provider.get("model", self.provider_model)
        self.provider_seed = int(provider.get("seed", self.provider_seed))
        self.provider_script = provider.get("script", self.provider_script)
        checker = data.get("checker", {})
        self.checker_kind = checker.get("kind", self.checker_kind)
        self.checker_cmd = list(checker.get("cmd", self.checker_cmd))
        self.checker_timeout = float(checker.get("timeout", self.checker_timeout))
        self.checker_pool = int(checker.get("pool", self.checker_pool))
        self.checker_context = list(checker.get("context", self.checker_context))
        retrieval = data.get("retrieval", {})
        self.k_sim = int(retrieval.get("k_sim", self.k_sim))
        self.k_kw = int(retrieval.get("k_kw", self.k_kw))
        self.per_keyword_cap = int(retrieval.get("per_keyword_cap", self.per_keyword_cap))
        sampling = data.get("sampling", {})
        self.temperature = float(sampling.get("temperature", self.temperature))
        self.n_completions = int(sampling.get("n", self.n_completions))
        self.max_tokens = int(sampling.get("max_tokens", self.max_tokens))


def bundled_asset(name: str) -> Path:
    """Filesystem path of a bundled data asset."""
    return Path(str(resources.files("autoform.assets").joinpath(name)))


def default_dictionary_path() -> Path:
    return bundled_asset("name_dictionary.tsv")


def seed_declarations_path() -> Path:
    return bundled_asset("seed_declarations.jsonl")


def dataset_path(category: str) -> Path:
    return bundled_asset(f"datasets/{category}.jsonl")


def proof_tasks_path() -> Path:
    return bundled_asset("datasets/proof_tasks.jsonl")


def recorded_statement_runs_path() -> Path:
    return bundled_asset("recorded/statement_runs.jsonl")


def recorded_proof_grades_path() -> Path:
    return bundled_asset("recorded/proof_grades.jsonl")
