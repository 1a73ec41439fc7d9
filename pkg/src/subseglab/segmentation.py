"""Shared segmented-text representation, character segmentation and BPE."""

from __future__ import annotations

import enum
import heapq
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .corpus import VerseRecord

_logger = logging.getLogger(__name__)

CONT = "@@"
SPACE = "_"
EOW = "</w>"
MERGE_FRACTION = 0.4


class Method(str, enum.Enum):
    CHAR = "char"
    BPE = "bpe"
    MORFESSOR = "morfessor"
    FST_BPE = "fst_bpe"
    FST_MORFESSOR = "fst_morfessor"

    @property
    def uses_fst(self) -> bool:
        return self in (Method.FST_BPE, Method.FST_MORFESSOR)


class SegmentationError(ValueError):
    pass


@dataclass(frozen=True)
class SegmentedVerse:
    verse_id: str
    units: tuple[str, ...]
    method: Method


def mark_pieces(pieces: Sequence[str]) -> list[str]:
    """Suffix every non-final piece of one word with the continuation marker."""
    if not pieces or any(not p for p in pieces):
        raise SegmentationError(f"invalid pieces {pieces!r}")
    return [p + CONT for p in pieces[:-1]] + [pieces[-1]]


def segment_verse(verse: VerseRecord, split_word: Callable[[str], Sequence[str]],
                  method: Method) -> SegmentedVerse:
    units: list[str] = []
    for tok in verse.tokens:
        units.extend(mark_pieces(split_word(tok)))
    return SegmentedVerse(verse.verse_id, tuple(units), method)


def char_segment(verse: VerseRecord) -> SegmentedVerse:
    units: list[str] = []
    for i, tok in enumerate(verse.tokens):
        if i:
            units.append(SPACE)
        units.extend(tok)
    return SegmentedVerse(verse.verse_id, tuple(units), Method.CHAR)


def desegment(sv: SegmentedVerse) -> list[str]:
    """Invert a segmentation back to the word tokens."""
    if sv.method is Method.CHAR:
        if not sv.units:
            return []
        words, cur = [], []
        for u in sv.units:
            if u == SPACE:
                words.append("".join(cur))
                cur = []
            else:
                cur.append(u)
        words.append("".join(cur))
        if any(not w for w in words):
            raise SegmentationError(f"{sv.verse_id}: empty word between boundary units")
        return words

    words, cur = [], []
    for u in sv.units:
        if u.endswith(CONT):
            stem = u[: -len(CONT)]
            if not stem:
                raise SegmentationError(f"{sv.verse_id}: bare continuation marker")
            cur.append(stem)
        else:
            if not u:
                raise SegmentationError(f"{sv.verse_id}: empty unit")
            cur.append(u)
            words.append("".join(cur))
            cur = []
    if cur:
        raise SegmentationError(f"{sv.verse_id}: dangling {CONT} on the final unit")
    return words


# -- BPE -------------------------------------------------------------------

def merge_count_for(types: int, fraction: float = MERGE_FRACTION) -> int:
    """``round(fraction * types)`` with halves rounded up."""
    if types < 0:
        raise ValueError("types must be non-negative")
    return int(fraction * types + 0.5)


@dataclass
class MergeTable:
    merges: list[tuple[str, str]]
    alphabet: frozenset[str] = frozenset()
    _ranks: dict = field(default=None, init=False, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @property
    def vocab(self) -> set[str]:
        return set(self.alphabet) | {a + b for a, b in self.merges}

    @property
    def ranks(self) -> dict[tuple[str, str], int]:
        if self._ranks is None:
            ranks = {}
            for i, pair in enumerate(self.merges):
                ranks.setdefault(pair, i)
            self._ranks = ranks
        return self._ranks

    def split_word(self, word: str) -> list[str]:
        pieces = self._cache.get(word)
        if pieces is None:
            pieces = _apply_merges(self.merges, self.ranks, word)
            self._cache[word] = pieces
        return list(pieces)

    def save(self, path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
            for a, b in self.merges:
                fh.write(f"{a} {b}\n")

    @classmethod
    def load(cls, path) -> "MergeTable":
        merges = []
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#version"):
                    continue
                parts = line.split(" ")
                if len(parts) != 2 or not all(parts):
                    raise SegmentationError(f"{path}:{lineno}: expected 'left right'")
                merges.append((parts[0], parts[1]))
        alphabet = set()
        for a, b in merges:
            for sym in (a, b):
                base = sym[: -len(EOW)] if sym.endswith(EOW) else sym
                alphabet.update(base)
        return cls(merges, frozenset(alphabet))


def _word_symbols(word: str) -> list[str]:
    return list(word[:-1]) + [word[-1] + EOW]


def _merge_pair(symbols: list[str], a: str, b: str) -> list[str]:
    out, i, n = [], 0, len(symbols)
    while i < n:
        if i < n - 1 and symbols[i] == a and symbols[i + 1] == b:
            out.append(a + b)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def _apply_merges(merges, ranks, word: str) -> tuple[str, ...]:
    if not word:
        raise SegmentationError("cannot segment an empty word")
    symbols = _word_symbols(word)
    # Equivalent to applying every merge in table order: jump to the
    # lowest-ranked applicable merge not yet passed.
    next_rank = 0
    while len(symbols) > 1:
        best = None
        for pair in zip(symbols, symbols[1:]):
            r = ranks.get(pair)
            if r is not None and r >= next_rank and (best is None or r < best):
                best = r
        if best is None:
            break
        symbols = _merge_pair(symbols, *merges[best])
        next_rank = best + 1
    last = symbols[-1][: -len(EOW)]
    symbols = symbols[:-1] + ([last] if last else [])
    return tuple(symbols)


def word_frequencies(verses: Iterable[VerseRecord]) -> Counter:
    freq: Counter = Counter()
    for v in verses:
        freq.update(v.tokens)
    return freq


def bpe_train(train: Sequence[VerseRecord], merge_count: int) -> MergeTable:
    """Learn up to ``merge_count`` merges by greedy pair frequency.

    Words start as character sequences whose last character carries the
    end-of-word sentinel, so merges never cross word boundaries. Equal pair
    frequencies are broken by the smaller ``(left, right)`` pair. Training
    stops early once no pair occurs at least twice.
    """
    if not train:
        raise ValueError("cannot train BPE on an empty training set")
    if merge_count < 0:
        raise ValueError("merge_count must be >= 0")
    freq = word_frequencies(train)
    words = sorted(freq)
    symbols = [_word_symbols(w) for w in words]
    counts = [freq[w] for w in words]
    alphabet = frozenset(ch for w in words for ch in w)

    stats: Counter = Counter()
    where: dict[tuple[str, str], set[int]] = defaultdict(set)
    for idx, syms in enumerate(symbols):
        for pair in zip(syms, syms[1:]):
            stats[pair] += counts[idx]
            where[pair].add(idx)
    heap = [(-c, pair) for pair, c in stats.items()]
    heapq.heapify(heap)

    merges: list[tuple[str, str]] = []
    while len(merges) < merge_count and heap:
        negc, pair = heapq.heappop(heap)
        if stats.get(pair, 0) != -negc:
            continue  # stale entry
        if -negc < 2:
            break
        merges.append(pair)
        touched = set()
        for idx in sorted(where.pop(pair, ())):
            old = symbols[idx]
            if len(old) < 2:
                continue
            c = counts[idx]
            for p in zip(old, old[1:]):
                stats[p] -= c
                touched.add(p)
                if p != pair:
                    where[p].discard(idx)
            new = _merge_pair(old, *pair)
            symbols[idx] = new
            for p in zip(new, new[1:]):
                stats[p] += c
                where[p].add(idx)
                touched.add(p)
        for p in touched:
            c = stats[p]
            if c <= 0:
                stats.pop(p, None)
            else:
                heapq.heappush(heap, (-c, p))
        stats.pop(pair, None)
    _logger.debug("learned %d/%d merges", len(merges), merge_count)
    return MergeTable(merges, alphabet)


def bpe_apply(table: MergeTable, verse: VerseRecord) -> SegmentedVerse:
    return segment_verse(verse, table.split_word, Method.BPE)


# -- segmented corpus files -------------------------------------------------

def write_segmented(path, verses: Iterable[SegmentedVerse]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for sv in verses:
            fh.write(f"{sv.verse_id}\t{' '.join(sv.units)}\n")


def read_segmented(path, method: Method) -> list[SegmentedVerse]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise SegmentationError(f"{path}:{lineno}: missing TAB")
            vid, text = line.split("\t", 1)
            out.append(SegmentedVerse(vid, tuple(u for u in text.split(" ") if u), method))
    return out
