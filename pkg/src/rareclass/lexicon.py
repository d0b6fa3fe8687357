"""Term-lexicon compilation and corpus scanning.

A lexicon maps canonical terms to surface variants.  Compiled matchers
are case-insensitive and word-boundary anchored, where a boundary is any
transition between [a-z0-9] and everything else after lowercasing.
Separators inside multi-word terms (spaces or hyphens) match any run of
whitespace and hyphens, so ``club foot`` also matches ``Club-Foot``.

Matching always runs over the raw tweet text, because the resulting
spans index the original bytes (span normalization needs them).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Corpus, Label, LABELS, Tweet, char_span_to_bytes, byte_span_to_chars
from .errors import DataError
from .normalize import URL_RE, USERNAME_RE

_SEPARATOR_RE = re.compile(r"[\s\-]+")
_BOUNDARY_CLASS = "[a-zA-Z0-9]"


@dataclass(frozen=True)
class Lexicon:
    """Canonical terms with their surface variants."""

    terms: tuple[tuple[str, tuple[str, ...]], ...]

    def canonical_terms(self) -> list[str]:
        return [term for term, _ in self.terms]

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class MatcherSet:
    """Compiled surface patterns, each mapped back to its canonical term."""

    patterns: tuple[tuple[re.Pattern, str], ...]


@dataclass(frozen=True)
class MatchResult:
    """One lexicon hit: canonical term plus the byte span it covers."""

    tweet_id: str
    term: str
    span: tuple[int, int]
    surface: str


def load_lexicon(path: str | Path) -> Lexicon:
    """Read a lexicon file: one canonical term per line, variants appended
    after ``|`` separators; ``#`` starts a comment line."""
    path = Path(path)
    terms: list[tuple[str, tuple[str, ...]]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in stripped.split("|")]
        canonical = fields[0]
        if not canonical:
            raise DataError(f"{path}: empty canonical term at line {lineno}")
        key = canonical.lower()
        if key in seen:
            raise DataError(f"{path}: duplicate canonical term {canonical!r} at line {lineno}")
        seen.add(key)
        variants = tuple(v for v in fields[1:] if v)
        terms.append((canonical, variants))
    if not terms:
        raise DataError(f"{path}: no terms found")
    return Lexicon(tuple(terms))


def _surface_pattern(surface: str) -> str:
    chunks = [c for c in _SEPARATOR_RE.split(surface) if c]
    if not chunks:
        raise ValueError(f"term {surface!r} compiles to an empty pattern")
    body = r"[\s\-]+".join(re.escape(chunk) for chunk in chunks)
    return f"(?<!{_BOUNDARY_CLASS})(?:{body})(?!{_BOUNDARY_CLASS})"


def compile_matchers(lexicon: Lexicon) -> MatcherSet:
    """Compile every canonical term and variant into an anchored pattern."""
    if not len(lexicon):
        raise ValueError("empty lexicon")
    patterns: list[tuple[re.Pattern, str]] = []
    for canonical, variants in lexicon.terms:
        for surface in (canonical, *variants):
            patterns.append(
                (re.compile(_surface_pattern(surface), re.IGNORECASE), canonical)
            )
    return MatcherSet(tuple(patterns))


def match_text(tweet: Tweet, matchers: MatcherSet) -> list[MatchResult]:
    """Non-overlapping matches in one tweet, left to right, longest first.

    Candidates from all patterns are pooled; at each position the longest
    match wins (ties broken by canonical term, then pattern order), and
    overlapping later candidates are discarded.
    """
    candidates: list[tuple[int, int, int, str, int]] = []
    for order, (pattern, canonical) in enumerate(matchers.patterns):
        for m in pattern.finditer(tweet.text):
            candidates.append((m.start(), -(m.end() - m.start()), order, canonical, m.end()))
    candidates.sort(key=lambda c: (c[0], c[1], c[3], c[2]))
    results: list[MatchResult] = []
    last_end = 0
    for start, _neg_len, _order, canonical, end in candidates:
        if start < last_end:
            continue
        span = char_span_to_bytes(tweet.text, (start, end))
        results.append(MatchResult(tweet.id, canonical, span, tweet.text[start:end]))
        last_end = end
    return results


def match_corpus(tweets: Sequence[Tweet], matchers: MatcherSet) -> list[MatchResult]:
    """Scan tweets in order; tweets without matches contribute nothing."""
    results: list[MatchResult] = []
    for tweet in tweets:
        results.extend(match_text(tweet, matchers))
    return results


RETWEET_PREFIX = "RT @"


def _token_spans(text: str) -> list[tuple[int, int]]:
    spans = [m.span() for m in USERNAME_RE.finditer(text)]
    spans.extend(m.span() for m in URL_RE.finditer(text))
    return spans


def post_filter(tweets: Sequence[Tweet], matches: Sequence[MatchResult]) -> list[MatchResult]:
    """Drop matches in retweets and matches inside username or URL tokens.

    A retweet is any tweet whose text starts with ``RT @``.  A match is
    dropped when its span lies entirely inside an ``@name`` or http(s) URL
    token.  The output is always a subset of the input, in input order.
    """
    by_id = {tweet.id: tweet for tweet in tweets}
    kept: list[MatchResult] = []
    for match in matches:
        tweet = by_id.get(match.tweet_id)
        if tweet is None:
            continue
        if tweet.text.startswith(RETWEET_PREFIX):
            continue
        start, end = byte_span_to_chars(tweet.text, match.span)
        inside = any(ts <= start and end <= te for ts, te in _token_spans(tweet.text))
        if not inside:
            kept.append(match)
    return kept


def term_class_frequency_report(
    corpus: Corpus, lexicon: Lexicon
) -> list[tuple[str, dict[Label, int]]]:
    """Tweets per class mentioning each canonical term (once per term).

    Rows follow lexicon order; every canonical term gets a row even when
    all its counts are zero.
    """
    matchers = compile_matchers(lexicon)
    counts: dict[str, dict[Label, int]] = {
        term: {label: 0 for label in LABELS} for term in lexicon.canonical_terms()
    }
    for item in corpus:
        hit_terms = {m.term for m in match_text(item.tweet, matchers)}
        for term in hit_terms:
            counts[term][item.label] += 1
    return [(term, counts[term]) for term in lexicon.canonical_terms()]
