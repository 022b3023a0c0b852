"""Declaration corpus: aligned (docstring, formal statement) pairs plus identifier lexicons.

The corpus is the retrieval substrate for few-shot prompting.  It is loaded
from a JSON-Lines dump (one declaration per line, optional lexicon lines),
is immutable after construction, and round-trips bytewise through
save/load.
"""
from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

SCHEMA_VERSION = "decl-corpus/1"


class CorpusFormatError(ValueError):
    """Raised when a declaration dump or dictionary file is malformed."""


class Dialect(enum.Enum):
    LEAN3 = "lean3"
    LEAN4 = "lean4"


@dataclass(frozen=True)
class DeclRecord:
    """One corpus declaration: a docstring aligned with its formal statement."""

    id: int
    name: str
    docstring: str
    statement: str
    dialect: Dialect
    source: str = ""

    def __post_init__(self) -> None:
        if not self.docstring:
            raise CorpusFormatError(f"record {self.id}: empty docstring")
        if not self.statement:
            raise CorpusFormatError(f"record {self.id}: empty statement")
        if not self.name or any(c.isspace() for c in self.name):
            raise CorpusFormatError(f"record {self.id}: bad name {self.name!r}")


@dataclass(frozen=True)
class Corpus:
    """Immutable ordered collection of declarations with per-dialect lexicons.

    Every record name is guaranteed to be a member of its dialect's lexicon;
    the lexicons may carry extra names (identifiers that exist in the target
    library but have no docstring) so auto-correction can resolve against
    more than the documented declarations.
    """

    records: tuple[DeclRecord, ...]
    lexicon3: frozenset[str] = frozenset()
    lexicon4: frozenset[str] = frozenset()
    _by_id: dict[int, DeclRecord] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        lex3 = set(self.lexicon3)
        lex4 = set(self.lexicon4)
        by_id: dict[int, DeclRecord] = {}
        for rec in self.records:
            if rec.id in by_id:
                raise CorpusFormatError(f"duplicate record id {rec.id}")
            by_id[rec.id] = rec
            (lex3 if rec.dialect is Dialect.LEAN3 else lex4).add(rec.name)
        object.__setattr__(self, "lexicon3", frozenset(lex3))
        object.__setattr__(self, "lexicon4", frozenset(lex4))
        object.__setattr__(self, "_by_id", by_id)

    def __len__(self) -> int:
        return len(self.records)

    def record(self, record_id: int) -> DeclRecord:
        return self._by_id[record_id]

    def lexicon(self, dialect: Dialect) -> frozenset[str]:
        return self.lexicon3 if dialect is Dialect.LEAN3 else self.lexicon4


@dataclass(frozen=True)
class NameDictionary:
    """Prebuilt identifier translation map from the old dialect to the new one."""

    entries: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for k, v in self.entries.items():
            if not k or not v:
                raise CorpusFormatError(f"empty dictionary entry {k!r} -> {v!r}")

    def lookup(self, name: str) -> str | None:
        return self.entries.get(name)

    def __len__(self) -> int:
        return len(self.entries)

    def check_against(self, corpus: Corpus) -> list[str]:
        """Return dictionary values missing from the corpus's new-dialect lexicon."""
        return sorted(v for v in self.entries.values() if v not in corpus.lexicon4)


def _record_from_obj(obj: dict, lineno: int) -> DeclRecord:
    try:
        dialect = Dialect(obj.get("dialect", "lean3"))
        return DeclRecord(
            id=int(obj["id"]),
            name=str(obj["name"]),
            docstring=str(obj["docstring"]),
            statement=str(obj["statement"]),
            dialect=dialect,
            source=str(obj.get("source", "")),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise CorpusFormatError(f"line {lineno}: {exc}") from exc


def _parse_lines(lines: list[str], *, expect_header: bool) -> tuple[Corpus, dict[str, list[int]] | None]:
    records: list[DeclRecord] = []
    seen_ids: set[int] = set()
    lex3: set[str] = set()
    lex4: set[str] = set()
    postings: dict[str, list[int]] | None = None

    start = 0
    if expect_header:
        if not lines:
            raise CorpusFormatError("empty store: missing schema header")
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"line 1: bad header: {exc}") from exc
        if header.get("schema") != SCHEMA_VERSION:
            raise CorpusFormatError(
                f"unsupported schema version {header.get('schema')!r}, expected {SCHEMA_VERSION!r}"
            )
        start = 1

    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise CorpusFormatError(f"line {lineno}: expected an object")
        if "lexicon" in obj:
            try:
                dialect = Dialect(obj["lexicon"])
                names = [str(n) for n in obj["names"]]
            except (KeyError, ValueError, TypeError) as exc:
                raise CorpusFormatError(f"line {lineno}: bad lexicon line: {exc}") from exc
            (lex3 if dialect is Dialect.LEAN3 else lex4).update(names)
            continue
        if "posting" in obj:
            if postings is None:
                postings = {}
            try:
                postings[str(obj["posting"])] = [int(i) for i in obj["ids"]]
            except (KeyError, ValueError, TypeError) as exc:
                raise CorpusFormatError(f"line {lineno}: bad posting line: {exc}") from exc
            continue
        rec = _record_from_obj(obj, lineno)
        if rec.id in seen_ids:
            raise CorpusFormatError(f"line {lineno}: duplicate record id {rec.id}")
        seen_ids.add(rec.id)
        records.append(rec)

    corpus = Corpus(records=tuple(records), lexicon3=frozenset(lex3), lexicon4=frozenset(lex4))
    return corpus, postings


def ingest_declarations(export_file: str | Path) -> Corpus:
    """Load a declaration dump (JSON-Lines, one record per line) into a Corpus.

    Record order is preserved; lexicons are populated from record names plus
    any `{"lexicon": ..., "names": [...]}` lines in the file.
    """
    text = Path(export_file).read_text(encoding="utf-8")
    corpus, _ = _parse_lines(text.splitlines(), expect_header=False)
    return corpus


def save_corpus(corpus: Corpus, path: str | Path, keyword_postings: dict[str, list[int]] | None = None) -> None:
    """Persist a corpus (and optionally a keyword-index section) deterministically."""
    out: list[str] = [json.dumps({"schema": SCHEMA_VERSION})]
    for rec in corpus.records:
        out.append(
            json.dumps(
                {
                    "id": rec.id,
                    "name": rec.name,
                    "docstring": rec.docstring,
                    "statement": rec.statement,
                    "dialect": rec.dialect.value,
                    "source": rec.source,
                },
                ensure_ascii=False,
            )
        )
    for dialect, names in (("lean3", corpus.lexicon3), ("lean4", corpus.lexicon4)):
        out.append(json.dumps({"lexicon": dialect, "names": sorted(names)}, ensure_ascii=False))
    if keyword_postings is not None:
        for phrase in sorted(keyword_postings):
            out.append(
                json.dumps({"posting": phrase, "ids": keyword_postings[phrase]}, ensure_ascii=False)
            )
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def load_corpus(path: str | Path) -> Corpus:
    text = Path(path).read_text(encoding="utf-8")
    corpus, _ = _parse_lines(text.splitlines(), expect_header=True)
    return corpus


def load_keyword_postings(path: str | Path) -> dict[str, list[int]] | None:
    """Read back the keyword-index section of a corpus store, if present."""
    text = Path(path).read_text(encoding="utf-8")
    _, postings = _parse_lines(text.splitlines(), expect_header=True)
    return postings


def build_name_dictionary(pairs_file: str | Path) -> NameDictionary:
    """Read a tab-separated (old_name, new_name) file; later duplicates win."""
    entries: dict[str, str] = {}
    for lineno, line in enumerate(Path(pairs_file).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise CorpusFormatError(f"line {lineno}: expected 'old<TAB>new', got {line!r}")
        key, value = parts
        if key in entries:
            log.warning("dictionary line %d: duplicate key %r overrides earlier entry", lineno, key)
        entries[key] = value
    return NameDictionary(entries=entries)


def lexicon_contains(corpus: Corpus, name: str, dialect: Dialect) -> bool:
    return name in corpus.lexicon(dialect)
