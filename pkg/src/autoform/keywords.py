"""Unsupervised statistical keyword extraction and an inverted keyword index.

Scoring follows the YAKE family of features computed from a single document,
lower score = more important.  The exact formulas implemented here (and
pinned by the test oracle):

Per lowercased term t, with sentences indexed from 0:

    tf(t)       = number of occurrences
    casing(t)   = max(n_upper, n_acronym) / (1 + ln(tf))
                  n_upper: occurrences whose raw token starts uppercase and is
                  not sentence-initial; n_acronym: all-uppercase tokens, len>=2
    position(t) = mean sentence index over occurrences        (stored stat)
    pos_score   = ln(ln(3 + position))
    tf_norm(t)  = tf / (mean_tf + std_tf)      over all terms, population std
    relatedness = 1 + (DL + DR) * tf / max_tf
                  DL = |distinct left neighbours| / #occurrences with a left
                  neighbour in the same sentence (0 when none), DR mirrored
    spread(t)   = |sentences containing t| / |sentences|

    S(t) = (relatedness * pos_score) / (casing + tf_norm/relatedness
                                         + spread/relatedness)

Candidate phrases are n-grams of tokens that stay inside one punctuation-free
chunk of a sentence, carry no stopword at either boundary, and score

    S(p) = prod(S(t_i)) / (tf(p) * (1 + sum(S(t_i))))

Tokenization treats backtick-quoted code spans as atomic tokens; phrase
normalization is lowercase, surrounding backticks stripped, internal
whitespace collapsed.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources

from .corpus import Corpus

_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:'[A-Za-z0-9]+)*")
_SENTENCE_END = ".!?;"


def _load_stopwords() -> frozenset[str]:
    text = resources.files("autoform.assets").joinpath("stopwords_en.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


_STOPWORDS: frozenset[str] | None = None


def stopwords() -> frozenset[str]:
    global _STOPWORDS
    if _STOPWORDS is None:
        _STOPWORDS = _load_stopwords()
    return _STOPWORDS


def normalize_phrase(phrase: str) -> str:
    """Lowercase, strip surrounding backticks, collapse internal whitespace."""
    p = phrase.strip()
    if p.startswith("`") and p.endswith("`") and len(p) >= 2:
        p = p[1:-1]
    return " ".join(p.lower().split())


@dataclass(frozen=True)
class Token:
    """One token occurrence: raw surface form plus stream coordinates."""

    raw: str
    term: str            # normalized form used for statistics
    sentence: int
    index: int           # position in the global token stream
    chunk: int           # punctuation-free chunk id within the document
    sentence_initial: bool


def split_sentences(text: str) -> list[str]:
    """Split on newlines and sentence punctuation outside backtick spans."""
    sentences: list[str] = []
    buf: list[str] = []
    in_code = False
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "`":
            in_code = not in_code
            buf.append(ch)
        elif not in_code and ch in _SENTENCE_END:
            nxt = text[i + 1] if i + 1 < len(text) else ""
            if nxt == "" or nxt.isspace():
                sentence = "".join(buf).strip()
                if sentence:
                    sentences.append(sentence)
                buf = []
            else:
                buf.append(ch)
        elif not in_code and ch == "\n":
            sentence = "".join(buf).strip()
            if sentence:
                sentences.append(sentence)
            buf = []
        else:
            buf.append(ch)
        i += 1
    tail = "".join(buf).strip()
    if tail:
        sentences.append(tail)
    return sentences


def tokenize(text: str) -> list[Token]:
    """Token stream over sentences; backtick spans are atomic tokens.

    Any character that is neither part of a word nor inside a backtick span
    ends the current chunk, so candidate n-grams never cross punctuation.
    """
    tokens: list[Token] = []
    chunk = 0
    index = 0
    for s_idx, sentence in enumerate(split_sentences(text)):
        first_in_sentence = True
        pos = 0
        fresh_chunk = True
        while pos < len(sentence):
            ch = sentence[pos]
            if ch == "`":
                end = sentence.find("`", pos + 1)
                if end == -1:
                    end = len(sentence)
                raw = sentence[pos : min(end + 1, len(sentence))]
                term = normalize_phrase(raw)
                if term:
                    if fresh_chunk:
                        chunk += 1
                        fresh_chunk = False
                    tokens.append(Token(raw, term, s_idx, index, chunk, first_in_sentence))
                    index += 1
                    first_in_sentence = False
                pos = end + 1
                continue
            m = _WORD_RE.match(sentence, pos)
            if m:
                raw = m.group(0)
                if fresh_chunk:
                    chunk += 1
                    fresh_chunk = False
                tokens.append(Token(raw, raw.lower(), s_idx, index, chunk, first_in_sentence))
                index += 1
                first_in_sentence = False
                pos = m.end()
                continue
            if not ch.isspace():
                fresh_chunk = True   # punctuation closes the chunk
            pos += 1
        chunk += 1
    return tokens


@dataclass(frozen=True)
class TermStats:
    """Single-term statistics feeding the combined score."""

    term: str
    tf: int
    casing: float
    position: float      # mean sentence index of occurrences
    relatedness: float
    spread: float


@dataclass(frozen=True)
class KeywordScore:
    phrase: str
    score: float


def compute_term_stats(tokens: list[Token], n_sentences: int) -> dict[str, TermStats]:
    """Document-level statistics for every distinct term, stopwords included."""
    if not tokens:
        return {}
    occurrences: dict[str, list[Token]] = {}
    for tok in tokens:
        occurrences.setdefault(tok.term, []).append(tok)
    max_tf = max(len(occ) for occ in occurrences.values())

    stats: dict[str, TermStats] = {}
    for term, occ in occurrences.items():
        tf = len(occ)
        n_upper = sum(
            1 for t in occ if t.raw[:1].isupper() and not t.raw.isupper() and not t.sentence_initial
        )
        n_acronym = sum(1 for t in occ if len(t.raw) >= 2 and t.raw.isalpha() and t.raw.isupper())
        casing = max(n_upper, n_acronym) / (1.0 + math.log(tf))
        position = sum(t.sentence for t in occ) / tf

        left: set[str] = set()
        right: set[str] = set()
        n_left = 0
        n_right = 0
        for t in occ:
            if t.index > 0 and tokens[t.index - 1].sentence == t.sentence:
                left.add(tokens[t.index - 1].term)
                n_left += 1
            if t.index + 1 < len(tokens) and tokens[t.index + 1].sentence == t.sentence:
                right.add(tokens[t.index + 1].term)
                n_right += 1
        dl = len(left) / n_left if n_left else 0.0
        dr = len(right) / n_right if n_right else 0.0
        relatedness = 1.0 + (dl + dr) * tf / max_tf

        spread = len({t.sentence for t in occ}) / n_sentences
        stats[term] = TermStats(
            term=term,
            tf=tf,
            casing=casing,
            position=position,
            relatedness=relatedness,
            spread=spread,
        )
    return stats


def term_score(s: TermStats, mean_tf: float, std_tf: float) -> float:
    """Combined single-term score; lower = more important."""
    pos_score = math.log(math.log(3.0 + s.position))
    tf_norm = s.tf / (mean_tf + std_tf) if (mean_tf + std_tf) > 0 else float(s.tf)
    return (s.relatedness * pos_score) / (
        s.casing + tf_norm / s.relatedness + s.spread / s.relatedness
    )


def _tf_aggregates(stats: dict[str, TermStats]) -> tuple[float, float]:
    tfs = [s.tf for s in stats.values()]
    mean_tf = sum(tfs) / len(tfs)
    var = sum((v - mean_tf) ** 2 for v in tfs) / len(tfs)
    return mean_tf, math.sqrt(var)


def extract_keywords(text: str, max_ngram: int = 3, top_n: int = 10) -> list[KeywordScore]:
    """Rank candidate phrases ascending by score (lower = more important).

    Ties are broken by first occurrence position in the token stream, then
    lexicographically.  Deterministic; empty text yields an empty list.
    """
    if max_ngram < 1:
        raise ValueError("max_ngram must be >= 1")
    if top_n < 0:
        raise ValueError("top_n must be >= 0")
    tokens = tokenize(text)
    if not tokens or top_n == 0:
        return []
    n_sentences = max(t.sentence for t in tokens) + 1
    stats = compute_term_stats(tokens, n_sentences)
    mean_tf, std_tf = _tf_aggregates(stats)

    stop = stopwords()
    # phrase -> (occurrence count, first stream position, term tuple)
    candidates: dict[str, tuple[int, int, tuple[str, ...]]] = {}
    for start in range(len(tokens)):
        for n in range(1, max_ngram + 1):
            end = start + n
            if end > len(tokens):
                break
            window = tokens[start:end]
            if any(w.chunk != window[0].chunk for w in window):
                break
            if window[0].term in stop or window[-1].term in stop:
                continue
            phrase = normalize_phrase(" ".join(w.term for w in window))
            if not phrase:
                continue
            terms = tuple(w.term for w in window)
            count, first, _ = candidates.get(phrase, (0, window[0].index, terms))
            candidates[phrase] = (count + 1, min(first, window[0].index), terms)

    scored: list[tuple[float, int, str]] = []
    for phrase, (tf_p, first, terms) in candidates.items():
        term_scores = [term_score(stats[t], mean_tf, std_tf) for t in terms]
        prod = math.prod(term_scores)
        score = prod / (tf_p * (1.0 + sum(term_scores)))
        scored.append((score, first, phrase))
    scored.sort(key=lambda item: (item[0], item[1], item[2]))
    return [KeywordScore(phrase=p, score=s) for s, _, p in scored[:top_n]]


@dataclass(frozen=True)
class KeywordIndex:
    """Inverted index: keyword phrase -> ascending list of record ids."""

    postings: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def lookup(self, phrase: str) -> tuple[int, ...]:
        return self.postings.get(normalize_phrase(phrase), ())


def build_keyword_index(corpus: Corpus, per_doc_top: int = 5, max_ngram: int = 3) -> KeywordIndex:
    """Index each record's top keywords; posting lists sorted, no duplicates."""
    if per_doc_top < 1:
        raise ValueError("per_doc_top must be >= 1")
    acc: dict[str, set[int]] = {}
    for rec in corpus.records:
        for kw in extract_keywords(rec.docstring, max_ngram=max_ngram, top_n=per_doc_top):
            acc.setdefault(kw.phrase, set()).add(rec.id)
    return KeywordIndex(postings={p: tuple(sorted(ids)) for p, ids in acc.items()})


def records_for_keyword(index: KeywordIndex, phrase: str, limit: int) -> list[int]:
    if limit < 0:
        raise ValueError("limit must be >= 0")
    return list(index.lookup(phrase)[:limit])
