"""POS tags from a lexicon lookup or from pre-tagged input files.

No statistical tagger: a plain word -> tag lexicon keeps the module free of
language-specific models, and the pre-tagged format covers corpora tagged
by an external tool. Tags are opaque symbols; UNK marks unknown words.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import LabeledRecord, Sentence, Token, from_tokens, make_token, _read_lines
from .errors import MalformedRow, MissingLabel

UNK_TAG = "UNK"

_LABEL_COMMENT = re.compile(r"#\s*label\s*=\s*(.+?)\s*$")


@dataclass(frozen=True)
class PosLexicon:
    """Case-insensitive word -> tag map plus the tag inventory it uses."""

    entries: dict[str, str]
    tagset: frozenset[str]

    def lookup(self, word: str) -> str:
        return self.entries.get(word.lower(), UNK_TAG)

    def __len__(self) -> int:
        return len(self.entries)


EMPTY_LEXICON = PosLexicon({}, frozenset())


def load_lexicon(path: str | Path) -> PosLexicon:
    """Load a `word<TAB>tag` lexicon; first occurrence wins, tags uppercased."""
    entries: dict[str, str] = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1].strip():
            raise MalformedRow(f"{path} line {lineno}: expected 'word<TAB>tag'")
        word, tag = fields[0].lower(), fields[1].strip().upper()
        entries.setdefault(word, tag)
    return PosLexicon(entries=entries, tagset=frozenset(entries.values()))


def tag_sentence(sentence: Sentence, lexicon: PosLexicon) -> Sentence:
    """Attach a tag to every token (UNK when the lexicon has no entry)."""
    tokens = tuple(replace(t, pos_tag=lexicon.lookup(t.lookup_form)) for t in sentence.tokens)
    return Sentence(tokens, sentence.raw)


def parse_pretagged(path: str | Path) -> list[tuple[str, Sentence, str]]:
    """Parse a CoNLL-style file of `form<TAB>tag` lines.

    Sentences are separated by blank lines and each must be preceded by a
    `# label = X` comment. Tags are carried verbatim. Returns
    (id, sentence, label) triples with zero-based ids.
    """
    results: list[tuple[str, Sentence, str]] = []
    label: str | None = None
    tokens: list[Token] = []

    def flush(lineno: int) -> None:
        nonlocal label, tokens
        if not tokens:
            label = None
            return
        if label is None:
            raise MissingLabel(f"{path}: sentence ending at line {lineno} has no '# label = ...' comment")
        results.append((str(len(results)), from_tokens(tokens), label))
        label = None
        tokens = []

    lines = _read_lines(path)
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            flush(lineno)
            continue
        if line.startswith("#"):
            match = _LABEL_COMMENT.match(line)
            if match:
                label = match.group(1)
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise MalformedRow(f"{path} line {lineno}: expected 'form<TAB>tag'")
        tokens.append(make_token(fields[0], pos_tag=fields[1]))
    flush(len(lines))
    return results


def pretagged_records(triples: list[tuple[str, Sentence, str]]) -> list[LabeledRecord]:
    """Project pre-tagged triples onto plain labeled records."""
    return [LabeledRecord(rid, sentence.raw, label) for rid, sentence, label in triples]
