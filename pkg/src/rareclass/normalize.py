"""Tweet pre-processing pipelines.

Two normalizers are provided:

* `classic_normalize` feeds the bag-of-words classifiers.  Rule order:
  matched-span replacement, username/URL replacement, given-name
  replacement (capitalized tokens only), lowercasing, removal of
  non-alphabetic characters, pronoun/child-word replacement, and Porter
  stemming.  Placeholder tokens are atomic throughout: they are split out
  first, so the character strip never touches them, and a placeholder
  already present in the input survives a second pass unchanged (both
  pipelines are idempotent on their own output).

* `embedding_normalize` mirrors the pre-processing used for social-media
  word-vector training: username/URL placeholders, space-padded slashes,
  digit runs to ``<number>``, collapsed punctuation runs marked
  ``<repeat>``, elongated words trimmed and marked ``<elong>``, and
  ``#`` replaced by a ``<hashtag>`` token.  Non-ASCII symbol characters
  (emoji and the like) are padded into their own tokens; non-ASCII
  letters stay inside words.

Both functions are pure and deterministic.
"""

from __future__ import annotations

import re
import string
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .corpus import Tweet, byte_span_to_chars
from .errors import DataError
from .porter import porter_stem

USERNAME_RE = re.compile(r"@[A-Za-z0-9_]+")
URL_RE = re.compile(r"https?://\S+")
_ALPHA_RUN_RE = re.compile(r"[A-Za-z]+")
_NON_LOWER_RE = re.compile(r"[^a-z]+")


@dataclass(frozen=True)
class NameLexicon:
    """Lowercased set of given names used for name normalization."""

    names: frozenset[str]

    def __post_init__(self):
        if not self.names:
            raise ValueError("name lexicon must be non-empty")
        for name in self.names:
            if not name or any(ch.isspace() for ch in name):
                raise ValueError(f"name entries must be single tokens, got {name!r}")

    def __contains__(self, token: str) -> bool:
        return token in self.names


def load_name_lexicon(path: str | Path) -> NameLexicon:
    """Read a one-name-per-line file (``#`` starts a comment line)."""
    path = Path(path)
    names: set[str] = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if any(ch.isspace() for ch in stripped):
            raise DataError(f"{path}: name with whitespace at line {lineno}")
        names.add(stripped.lower())
    if not names:
        raise DataError(f"{path}: no names found")
    return NameLexicon(frozenset(names))


DEFAULT_POSSESSIVE = frozenset({"my", "our"})
DEFAULT_CHILD = frozenset(
    {"son", "daughter", "child", "baby", "kid", "boy", "girl", "twins",
     "toddler", "newborn"}
)
DEFAULT_THIRD_PERSON = frozenset({"she", "he", "her", "him", "his", "hers"})


@dataclass(frozen=True)
class NormalizationConfig:
    """Token sets and placeholder spellings for the classic pipeline.

    Placeholders must be pairwise distinct, non-empty, and contain no
    whitespace; the pipeline treats them as indivisible tokens.
    """

    possessive_pronouns: frozenset[str] = DEFAULT_POSSESSIVE
    child_terms: frozenset[str] = DEFAULT_CHILD
    third_person_pronouns: frozenset[str] = DEFAULT_THIRD_PERSON
    user_placeholder: str = "<user>"
    url_placeholder: str = "<url>"
    name_placeholder: str = "<name>"
    term_placeholder: str = "<bdterm>"
    possessive_placeholder: str = "<poss>"
    child_placeholder: str = "<child>"
    third_person_placeholder: str = "<thirdperson>"

    def __post_init__(self):
        placeholders = self.placeholders()
        if len(set(placeholders)) != len(placeholders):
            raise ValueError("placeholder strings must be pairwise distinct")
        for ph in placeholders:
            if not ph or any(ch.isspace() for ch in ph):
                raise ValueError(f"bad placeholder {ph!r}")

    def placeholders(self) -> tuple[str, ...]:
        return (
            self.user_placeholder,
            self.url_placeholder,
            self.name_placeholder,
            self.term_placeholder,
            self.possessive_placeholder,
            self.child_placeholder,
            self.third_person_placeholder,
        )


@dataclass(frozen=True)
class NormalizedText:
    """Whitespace-free token sequence produced by a normalizer."""

    tokens: tuple[str, ...]
    tweet_id: str

    def joined(self) -> str:
        return " ".join(self.tokens)


# Internal representation while rules run: (is_atom, content).  Atoms are
# placeholder tokens that later passes must not rewrite.
_Parts = list[tuple[bool, str]]


def _split_atoms(parts: _Parts, literal: str, atom: str) -> _Parts:
    out: _Parts = []
    for is_atom, content in parts:
        if is_atom or literal not in content:
            out.append((is_atom, content))
            continue
        pieces = content.split(literal)
        for i, piece in enumerate(pieces):
            if i:
                out.append((True, atom))
            if piece:
                out.append((False, piece))
    return out


def _sub_atoms(parts: _Parts, pattern: re.Pattern, atom: str) -> _Parts:
    out: _Parts = []
    for is_atom, content in parts:
        if is_atom:
            out.append((is_atom, content))
            continue
        pos = 0
        for match in pattern.finditer(content):
            if match.start() > pos:
                out.append((False, content[pos : match.start()]))
            out.append((True, atom))
            pos = match.end()
        if pos < len(content):
            out.append((False, content[pos:]))
    return out


def classic_normalize(
    tweet: Tweet,
    match_span: tuple[int, int] | None,
    names: NameLexicon,
    config: NormalizationConfig | None = None,
) -> NormalizedText:
    """Normalize a tweet for the bag-of-words classifiers.

    `match_span` is the (start, end) UTF-8 byte span of the lexicon match
    to collapse into the term placeholder; pass None when there is none.
    """
    config = config or NormalizationConfig()
    text = tweet.text
    parts: _Parts
    if match_span is not None:
        start, end = byte_span_to_chars(text, match_span)
        parts = []
        if text[:start]:
            parts.append((False, text[:start]))
        parts.append((True, config.term_placeholder))
        if text[end:]:
            parts.append((False, text[end:]))
    else:
        parts = [(False, text)] if text else []

    # Protect placeholder spellings already present (idempotency on
    # re-processed output); longest first so no placeholder nests in another.
    for ph in sorted(config.placeholders(), key=len, reverse=True):
        parts = _split_atoms(parts, ph, ph)

    parts = _sub_atoms(parts, URL_RE, config.url_placeholder)
    parts = _sub_atoms(parts, USERNAME_RE, config.user_placeholder)

    # Given names: capitalized alphabetic runs only, before lowercasing,
    # so common lowercase words ("will", "grace") are never eaten.
    replaced: _Parts = []
    for is_atom, content in parts:
        if is_atom:
            replaced.append((is_atom, content))
            continue
        pos = 0
        for match in _ALPHA_RUN_RE.finditer(content):
            run = match.group()
            if run[0].isupper() and run.lower() in names:
                if match.start() > pos:
                    replaced.append((False, content[pos : match.start()]))
                replaced.append((True, config.name_placeholder))
                pos = match.end()
        if pos < len(content):
            replaced.append((False, content[pos:]))
    parts = replaced

    token_map = {}
    for token in config.possessive_pronouns:
        token_map[token] = config.possessive_placeholder
    for token in config.child_terms:
        token_map[token] = config.child_placeholder
    for token in config.third_person_pronouns:
        token_map[token] = config.third_person_placeholder

    tokens: list[str] = []
    for is_atom, content in parts:
        if is_atom:
            tokens.append(content)
            continue
        for word in _NON_LOWER_RE.sub(" ", content.lower()).split():
            mapped = token_map.get(word)
            tokens.append(mapped if mapped else porter_stem(word))
    return NormalizedText(tuple(tokens), tweet.id)


_PUNCT_RUN_RE = re.compile(
    "([" + re.escape(string.punctuation) + r"])\1+"
)
_DIGIT_RUN_RE = re.compile(r"[0-9]+")
_ELONG_RE = re.compile(r"([A-Za-z])\1{3,}")


def _pad_symbols(text: str) -> str:
    out: list[str] = []
    for ch in text:
        if ord(ch) > 127 and unicodedata.category(ch)[0] in "SP":
            out.append(f" {ch} ")
        else:
            out.append(ch)
    return "".join(out)


def embedding_normalize(tweet: Tweet) -> NormalizedText:
    """Normalize a tweet the way word-vector training corpora are cleaned.

    Tokenization is plain whitespace splitting after the rules run; no
    external treebank-style tokenizer is involved, which keeps the
    pipeline dependency-free at the cost of slightly coarser tokens.
    """
    text = URL_RE.sub(" <url> ", tweet.text)
    text = USERNAME_RE.sub(" <user> ", text)
    text = _pad_symbols(text)
    text = text.replace("/", " / ")
    text = _DIGIT_RUN_RE.sub(" <number> ", text)
    text = _PUNCT_RUN_RE.sub(r" \1 <repeat> ", text)
    words: list[str] = []
    for word in text.split():
        if _ELONG_RE.search(word):
            words.append(_ELONG_RE.sub(r"\1\1", word))
            words.append("<elong>")
        else:
            words.append(word)
    text = " ".join(words).replace("#", " <hashtag> ")
    return NormalizedText(tuple(tok.lower() for tok in text.split()), tweet.id)
