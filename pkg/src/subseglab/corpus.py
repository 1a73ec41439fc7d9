"""Verse-aligned corpora: loading, block splitting and rare-character UNKing."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

_logger = logging.getLogger(__name__)

UNK_CHAR = "⁇"  # ⁇
BLOCK_SIZE = 30
DEV_SLOTS = range(0, 5)
TEST_SLOTS = range(5, 10)


class CorpusError(ValueError):
    """Raised for malformed corpus files or invariant violations."""


@dataclass(frozen=True)
class VerseRecord:
    verse_id: str
    tokens: tuple[str, ...]

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class ParallelCorpus:
    language_code: str
    verses: tuple[VerseRecord, ...] = ()

    def __post_init__(self):
        seen = set()
        for v in self.verses:
            if v.verse_id in seen:
                raise CorpusError(f"duplicate verse id {v.verse_id!r}")
            seen.add(v.verse_id)

    def __len__(self):
        return len(self.verses)

    @property
    def verse_ids(self) -> list[str]:
        return [v.verse_id for v in self.verses]


@dataclass(frozen=True)
class DataSplit:
    train: tuple[VerseRecord, ...] = ()
    dev: tuple[VerseRecord, ...] = ()
    test: tuple[VerseRecord, ...] = ()
    language_code: str = field(default="", compare=False)

    def parts(self) -> dict[str, tuple[VerseRecord, ...]]:
        return {"train": self.train, "dev": self.dev, "test": self.test}


def parse_corpus_lines(lines: Iterable[str], language_code: str,
                       source: str = "<input>",
                       preprocessed: bool = False) -> ParallelCorpus:
    verses = []
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            continue
        if "\t" not in line:
            raise CorpusError(f"{source}:{lineno}: missing TAB between verse id and text")
        verse_id, text = line.split("\t", 1)
        if not verse_id:
            raise CorpusError(f"{source}:{lineno}: empty verse id")
        if verse_id in seen:
            raise CorpusError(
                f"{source}:{lineno}: duplicate verse id {verse_id!r} "
                f"(first seen on line {seen[verse_id]})")
        if not preprocessed and UNK_CHAR in text:
            raise CorpusError(f"{source}:{lineno}: reserved symbol {UNK_CHAR!r} in input")
        tokens = tuple(t for t in text.split(" ") if t)
        if not tokens:
            raise CorpusError(f"{source}:{lineno}: verse {verse_id!r} has no tokens")
        seen[verse_id] = lineno
        verses.append(VerseRecord(verse_id, tokens))
    return ParallelCorpus(language_code, tuple(verses))


def load_corpus(path, language_code: str, preprocessed: bool = False) -> ParallelCorpus:
    """Read a ``verse_id<TAB>tok tok ...`` file into a corpus, keeping file order.

    Raw input may not contain ``UNK_CHAR``; pass ``preprocessed=True`` when
    reading files written after UNKing.
    """
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        corpus = parse_corpus_lines(fh, language_code, source=str(path),
                                    preprocessed=preprocessed)
    _logger.info("loaded %d verses for %s from %s", len(corpus), language_code, path)
    return corpus


def write_verses(path, verses: Iterable[VerseRecord]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for v in verses:
            fh.write(f"{v.verse_id}\t{v.text}\n")


def split_corpus(corpus: ParallelCorpus) -> DataSplit:
    """Assign verses by position within consecutive blocks of 30.

    Slots 0-4 of every complete block go to dev, 5-9 to test and the rest to
    train. A trailing incomplete block goes to train in full, which is what
    makes 25,376 verses come out as 16,926 / 4,225 / 4,225.
    """
    if not corpus.verses:
        raise CorpusError("cannot split an empty corpus")
    n_full = len(corpus.verses) // BLOCK_SIZE * BLOCK_SIZE
    train, dev, test = [], [], []
    for i, verse in enumerate(corpus.verses):
        slot = i % BLOCK_SIZE
        if i >= n_full:
            train.append(verse)
        elif slot in DEV_SLOTS:
            dev.append(verse)
        elif slot in TEST_SLOTS:
            test.append(verse)
        else:
            train.append(verse)
    return DataSplit(tuple(train), tuple(dev), tuple(test), corpus.language_code)


def char_counts(verses: Iterable[VerseRecord]) -> Counter:
    counts: Counter = Counter()
    for v in verses:
        for tok in v.tokens:
            counts.update(tok)
    return counts


def _unk_verse(verse: VerseRecord, keep: set[str]) -> VerseRecord:
    tokens = tuple(
        "".join(ch if ch in keep else UNK_CHAR for ch in tok) for tok in verse.tokens)
    return VerseRecord(verse.verse_id, tokens)


def unk_singleton_chars(split: DataSplit) -> DataSplit:
    """Replace characters seen at most once in train with ``UNK_CHAR`` in every part.

    Counting happens on train only; characters that never occur in train are
    replaced as well. The UNK symbol itself is always kept, so applying this
    twice is the same as applying it once.
    """
    counts = char_counts(split.train)
    keep = {ch for ch, c in counts.items() if c >= 2}
    keep.add(UNK_CHAR)
    return DataSplit(
        tuple(_unk_verse(v, keep) for v in split.train),
        tuple(_unk_verse(v, keep) for v in split.dev),
        tuple(_unk_verse(v, keep) for v in split.test),
        split.language_code,
    )
