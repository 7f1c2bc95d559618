"""Tokenization, stopword handling, and labeled-dataset I/O.

The tokenizer is deliberately language-agnostic: tokens are maximal runs of
non-whitespace, with leading and trailing punctuation characters split off
as their own tokens. Interior punctuation (hyphens, apostrophes, decimal
points) stays inside the token. Detokenization joins tokens with single
spaces and re-attaches punctuation-only tokens to the preceding token, so
re-tokenizing a detokenized sentence always reproduces the same surface
sequence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DuplicateId, IoError, MalformedRow, TabInText

# Header lines written by the CLI in front of generated files. The loaders
# skip them so every generated dataset loads back unchanged.
META_PREFIX = "#meta "

DATASET_FORMATS = ("tsv", "jsonl")


@dataclass(frozen=True)
class Token:
    """One surface token plus the lookup metadata the perturbations need."""

    surface: str
    lookup_form: str
    is_stopword: bool = False
    pos_tag: str | None = None
    is_alphabetic: bool = False


@dataclass(frozen=True)
class Sentence:
    """An ordered token sequence together with the string it came from."""

    tokens: tuple[Token, ...]
    raw: str

    def __len__(self) -> int:
        return len(self.tokens)

    def surfaces(self) -> tuple[str, ...]:
        return tuple(t.surface for t in self.tokens)


@dataclass(frozen=True)
class LabeledRecord:
    """One classification example: unique id, text, and a non-empty label."""

    id: str
    text: str
    label: str


@dataclass(frozen=True)
class StopwordSet:
    """Case-insensitive stopword membership."""

    words: frozenset[str]

    def contains(self, word: str) -> bool:
        return word.lower() in self.words

    def __contains__(self, word: str) -> bool:
        return self.contains(word)

    def __len__(self) -> int:
        return len(self.words)


EMPTY_STOPWORDS = StopwordSet(frozenset())


def _is_punct_char(ch: str) -> bool:
    return not ch.isalnum() and not ch.isspace()


def _is_punct_only(surface: str) -> bool:
    return all(_is_punct_char(ch) for ch in surface)


def make_token(surface: str, stopwords: StopwordSet | None = None, pos_tag: str | None = None) -> Token:
    """Build a token, deriving lookup form and eligibility flags."""
    if not surface:
        raise ValueError("token surface must be non-empty")
    lookup = surface.lower()
    return Token(
        surface=surface,
        lookup_form=lookup,
        is_stopword=stopwords.contains(lookup) if stopwords else False,
        pos_tag=pos_tag,
        is_alphabetic=surface.isalpha(),
    )


def tokenize(text: str, stopwords: StopwordSet | None = None) -> Sentence:
    """Split ``text`` into tokens; whitespace never survives inside a token."""
    tokens: list[Token] = []
    for chunk in text.split():
        leading: list[str] = []
        trailing: list[str] = []
        core = chunk
        while core and _is_punct_char(core[0]):
            leading.append(core[0])
            core = core[1:]
        while core and _is_punct_char(core[-1]):
            trailing.append(core[-1])
            core = core[:-1]
        parts = leading + ([core] if core else []) + trailing[::-1]
        tokens.extend(make_token(part, stopwords) for part in parts)
    return Sentence(tuple(tokens), raw=text)


def join_surfaces(surfaces: Iterable[str]) -> str:
    """Join token surfaces, attaching punctuation-only tokens to the left."""
    out = ""
    for surface in surfaces:
        if out and _is_punct_only(surface):
            out += surface
        elif out:
            out += " " + surface
        else:
            out = surface
    return out


def detokenize(sentence: Sentence) -> str:
    return join_surfaces(sentence.surfaces())


def from_tokens(tokens: Sequence[Token]) -> Sentence:
    """Build a sentence from tokens, rendering its raw text canonically."""
    tokens = tuple(tokens)
    return Sentence(tokens, raw=join_surfaces(t.surface for t in tokens))


def _read_lines(path: str | Path) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return text.split("\n")


def load_dataset(path: str | Path, format: str = "tsv") -> list[LabeledRecord]:
    """Load a labeled dataset; ids default to the zero-based record index."""
    if format not in DATASET_FORMATS:
        raise ValueError(f"unknown dataset format {format!r}")
    records: list[LabeledRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip() or line.startswith(META_PREFIX):
            continue
        if format == "tsv":
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedRow(f"{path} line {lineno}: expected 2 tab-separated fields, got {len(fields)}")
            text, label = fields
            rid = str(len(records))
        else:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRow(f"{path} line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("text"), str) or not isinstance(obj.get("label"), str):
                raise MalformedRow(f"{path} line {lineno}: object needs string fields 'text' and 'label'")
            rid = obj.get("id", str(len(records)))
            if not isinstance(rid, str):
                raise MalformedRow(f"{path} line {lineno}: 'id' must be a string")
            text, label = obj["text"], obj["label"]
        if not label:
            raise MalformedRow(f"{path} line {lineno}: empty label")
        if rid in seen:
            raise DuplicateId(f"{path} line {lineno}: duplicate id {rid!r}")
        seen.add(rid)
        records.append(LabeledRecord(rid, text, label))
    return records


def dataset_lines(records: Iterable[LabeledRecord], format: str) -> list[str]:
    """Serialize records to the lines ``write_dataset`` would emit."""
    if format not in DATASET_FORMATS:
        raise ValueError(f"unknown dataset format {format!r}")
    lines = []
    for record in records:
        if format == "tsv":
            if any("\t" in field or "\n" in field for field in (record.text, record.label)):
                raise TabInText(f"record {record.id!r} contains a tab or newline; TSV would be lossy")
            lines.append(f"{record.text}\t{record.label}")
        else:
            lines.append(json.dumps({"id": record.id, "text": record.text, "label": record.label}, ensure_ascii=False))
    return lines


def write_dataset(records: Iterable[LabeledRecord], path: str | Path, format: str = "tsv") -> None:
    """Write records so that ``load_dataset`` reads back the same dataset."""
    lines = dataset_lines(records, format)
    try:
        Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_stopwords(path: str | Path) -> StopwordSet:
    """Read one stopword per line; '#' comments and blank lines are ignored."""
    words = set()
    for line in _read_lines(path):
        word = line.strip()
        if not word or word.startswith("#"):
            continue
        words.add(word.lower())
    return StopwordSet(frozenset(words))
