"""Morfessor-baseline style unsupervised morph segmentation.

The model cost is a two-part code length in bits:

* corpus cost ``-sum_m c(m) * log2(c(m) / N)`` over morph counts ``c``
  with ``N = sum_m c(m)``;
* lexicon cost, summed over distinct morphs, of spelling each morph out
  character by character (``-log2`` of the training character frequency)
  followed by an end-of-morph symbol.

Training is the baseline's local search: every word type is re-analysed in
turn by recursive binary splitting, keeping whichever analysis gives the
lowest total cost.
"""

from __future__ import annotations

import logging
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import VerseRecord
from .segmentation import Method, SegmentedVerse, segment_verse

_logger = logging.getLogger(__name__)


@dataclass
class MorfessorConfig:
    count_mode: str = "types"  # "types" or "tokens"
    seed: int = 42
    finish_threshold: float = 0.005
    max_epochs: int = 50
    # Restart 0 starts from unsplit words; the others from seeded random
    # splits with this per-position cut probability. Lowest final cost wins.
    restarts: int = 8
    init_split_prob: float = 0.5
    oov_char_penalty: float | None = None  # bits per char; None -> log2(alphabet + 1)

    def __post_init__(self):
        if self.count_mode not in ("types", "tokens"):
            raise ValueError(f"unknown count_mode {self.count_mode!r}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


def _xlog2x(c: float) -> float:
    return c * math.log2(c) if c > 0 else 0.0


@dataclass
class CharModel:
    """Character code lengths taken from training word frequencies."""

    char_bits: dict[str, float]
    end_bits: float

    @classmethod
    def from_words(cls, words: Counter) -> "CharModel":
        chars: Counter = Counter()
        n_words = 0
        for w, c in words.items():
            for ch in w:
                chars[ch] += c
            n_words += c
        total = sum(chars.values())
        char_bits = {ch: -math.log2(c / total) for ch, c in chars.items()}
        end_bits = -math.log2(n_words / (n_words + total)) if total else 0.0
        return cls(char_bits, end_bits)

    def morph_bits(self, morph: str) -> float:
        return sum(self.char_bits[ch] for ch in morph) + self.end_bits


@dataclass
class MorphLexicon:
    """Morph counts plus, for trained models, the analysis of every word type."""

    morphs: Counter
    chars: CharModel
    constructions: dict[str, tuple[str, ...]] = field(default_factory=dict)
    word_counts: Counter = field(default_factory=Counter)
    oov_char_penalty: float | None = None
    cost_history: list[float] = field(default_factory=list)

    def __post_init__(self):
        self._segment_cache: dict[str, list[str]] = {}

    @property
    def total_count(self) -> int:
        return sum(self.morphs.values())

    @property
    def alphabet(self) -> set[str]:
        return set(self.chars.char_bits)

    @property
    def char_penalty(self) -> float:
        if self.oov_char_penalty is not None:
            return self.oov_char_penalty
        return math.log2(len(self.alphabet) + 1)

    def split_word(self, word: str) -> list[str]:
        return morfessor_segment(self, word)

    def save(self, path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
            for m in sorted(self.morphs):
                fh.write(f"{m}\t{self.morphs[m]}\n")

    @classmethod
    def load(cls, path, oov_char_penalty: float | None = None) -> "MorphLexicon":
        morphs: Counter = Counter()
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    m, c = line.split("\t")
                    count = int(c)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: expected 'morph<TAB>count'") from None
                if not m or count <= 0:
                    raise ValueError(f"{path}:{lineno}: invalid lexicon entry")
                morphs[m] = count
        # Character code lengths are recovered from the morph inventory.
        return cls(morphs, CharModel.from_words(morphs), oov_char_penalty=oov_char_penalty)


def corpus_cost(lex: MorphLexicon) -> float:
    n = lex.total_count
    if n == 0:
        return 0.0
    return _xlog2x(n) - sum(_xlog2x(c) for c in lex.morphs.values())


def lexicon_cost(lex: MorphLexicon) -> float:
    return sum(lex.chars.morph_bits(m) for m in lex.morphs)


def total_cost(lex: MorphLexicon) -> float:
    return corpus_cost(lex) + lexicon_cost(lex)


class _CostState:
    """Incrementally maintained code length for the training search."""

    def __init__(self, chars: CharModel):
        self.chars = chars
        self.counts: Counter = Counter()
        self.n = 0
        self.sum_xlogx = 0.0
        self.lex_bits = 0.0
        self._bits: dict[str, float] = {}

    def _morph_bits(self, morph: str) -> float:
        bits = self._bits.get(morph)
        if bits is None:
            bits = self._bits[morph] = self.chars.morph_bits(morph)
        return bits

    def cost(self) -> float:
        return _xlog2x(self.n) - self.sum_xlogx + self.lex_bits

    def exact_cost(self) -> float:
        """Recompute from scratch, free of incremental rounding drift."""
        self.sum_xlogx = math.fsum(_xlog2x(c) for c in self.counts.values())
        self.lex_bits = math.fsum(self.chars.morph_bits(m) for m in self.counts)
        return self.cost()

    def add(self, morph: str, delta: int) -> None:
        old = self.counts.get(morph, 0)
        new = old + delta
        if new < 0:
            raise AssertionError(f"negative count for {morph!r}")
        self.sum_xlogx += (new * math.log2(new) if new else 0.0) - (old * math.log2(old) if old else 0.0)
        self.n += delta
        if old == 0 and new > 0:
            self.lex_bits += self._morph_bits(morph)
        elif old > 0 and new == 0:
            self.lex_bits -= self._morph_bits(morph)
        if new:
            self.counts[morph] = new
        else:
            del self.counts[morph]

    def cost_with(self, parts: Sequence[str], count: int) -> float:
        for p in parts:
            self.add(p, count)
        c = self.cost()
        for p in parts:
            self.add(p, -count)
        return c


class _Model:
    """Hierarchical analyses as in the baseline's recursive algorithm.

    Every construction (word or substring) is a node holding its count and a
    split point; 0 marks a leaf, i.e. a morph in the lexicon. Counts of a
    split node propagate to its two children, so re-splitting a substring
    shared by several words changes all of them at once. Changes are
    journaled so a move that raises the cost can be rolled back.
    """

    def __init__(self, chars: CharModel):
        self.coding = _CostState(chars)
        self.nodes: dict[str, list[int]] = {}
        self.journal: list | None = None

    def _save(self, c: str) -> None:
        if self.journal is not None:
            node = self.nodes.get(c)
            self.journal.append(("node", c, None if node is None else tuple(node)))

    def _leaf(self, c: str, delta: int) -> None:
        self.coding.add(c, delta)
        if self.journal is not None:
            self.journal.append(("leaf", c, delta))

    def modify(self, c: str, delta: int) -> None:
        self._save(c)
        node = self.nodes.setdefault(c, [0, 0])
        node[0] += delta
        split = node[1]
        if node[0] == 0:
            del self.nodes[c]
        elif node[0] < 0:
            raise AssertionError(f"negative count for {c!r}")
        if split:
            self.modify(c[:split], delta)
            self.modify(c[split:], delta)
        else:
            self._leaf(c, delta)

    def set_split(self, c: str, split: int) -> None:
        self._save(c)
        self.nodes[c] = [self.nodes[c][0] if c in self.nodes else 0, split]

    def rollback(self) -> None:
        for kind, c, value in reversed(self.journal):
            if kind == "leaf":
                self.coding.add(c, -value)
            elif value is None:
                self.nodes.pop(c, None)
            else:
                self.nodes[c] = list(value)
        self.journal = []

    def recursive_split(self, c: str) -> None:
        if len(c) == 1:
            return
        count = self.nodes[c][0]
        self.modify(c, -count)
        self.modify(c, count)
        best_cost, best_split = self.coding.cost(), 0
        self.modify(c, -count)
        for i in range(1, len(c)):
            self.modify(c[:i], count)
            self.modify(c[i:], count)
            cost = self.coding.cost()
            self.modify(c[:i], -count)
            self.modify(c[i:], -count)
            if cost < best_cost - 1e-9:
                best_cost, best_split = cost, i
        self.set_split(c, best_split)
        if best_split:
            # children carry the count; the split node itself is virtual
            self.nodes[c][0] = count
            self.modify(c[:best_split], count)
            self.modify(c[best_split:], count)
            self.recursive_split(c[:best_split])
            if c[best_split:] != c[:best_split]:
                self.recursive_split(c[best_split:])
        else:
            del self.nodes[c]
            self.modify(c, count)

    def add_word(self, word: str, count: int, cuts: Sequence[int] = ()) -> None:
        """Add a word, pre-splitting it at ``cuts`` unless its node already exists."""
        cur, offset = word, 0
        for cut in sorted(cuts):
            if cur in self.nodes:
                break
            self.nodes[cur] = [0, cut - offset]
            cur, offset = cur[cut - offset:], cut
        self.modify(word, count)

    def leaves(self, c: str) -> tuple[str, ...]:
        split = self.nodes[c][1]
        if not split:
            return (c,)
        return self.leaves(c[:split]) + self.leaves(c[split:])


def _train_once(words: Counter, chars: CharModel, config: MorfessorConfig,
                rng: random.Random, random_init: bool) -> tuple[_Model, list[float]]:
    model = _Model(chars)
    for w in sorted(words):
        cuts = ()
        if random_init:
            cuts = [i for i in range(1, len(w)) if rng.random() < config.init_split_prob]
        model.add_word(w, words[w], cuts)
    history = [model.coding.exact_cost()]
    order = sorted(words)
    for _ in range(config.max_epochs):
        rng.shuffle(order)
        for w in order:
            before = model.coding.cost()
            model.journal = []
            model.recursive_split(w)
            if model.coding.cost() > before + 1e-9:
                model.rollback()
            model.journal = None
        history.append(model.coding.exact_cost())
        prev, cur = history[-2], history[-1]
        if prev - cur < config.finish_threshold * abs(prev):
            break
    return model, history


def morfessor_train(train: Iterable[VerseRecord], config: MorfessorConfig | None = None) -> MorphLexicon:
    """Fit a morph lexicon on the training words.

    Each epoch visits word types in a seeded shuffled order and re-splits
    the word's node recursively: the node is kept whole or cut at the binary
    split point giving the lowest total cost, and both halves are processed
    the same way. A move that raises the total cost is rolled back. Training
    stops when an epoch improves the cost by less than ``finish_threshold``
    (relative) or after ``max_epochs``.

    Greedy splitting cannot introduce the first shared morph when no word
    occurs bare, so training is repeated from seeded random initial splits
    and the run with the lowest final cost is kept.
    """
    config = config or MorfessorConfig()
    tokens: Counter = Counter()
    for v in train:
        tokens.update(v.tokens)
    if not tokens:
        raise ValueError("cannot train on an empty training set")
    words = Counter({w: 1 for w in tokens}) if config.count_mode == "types" else tokens
    chars = CharModel.from_words(tokens)

    best = None
    for restart in range(config.restarts):
        rng = random.Random(f"{config.seed}:{restart}")
        model, history = _train_once(words, chars, config, rng, random_init=restart > 0)
        _logger.debug("restart %d: cost %.3f -> %.3f bits in %d epochs",
                      restart, history[0], history[-1], len(history) - 1)
        if best is None or history[-1] < best[1][-1] - 1e-9:
            best = (model, history)
    model, history = best

    analyses = {w: model.leaves(w) for w in sorted(words)}
    return MorphLexicon(Counter(model.coding.counts), chars, analyses, words,
                        oov_char_penalty=config.oov_char_penalty, cost_history=history)


def morfessor_segment(lex: MorphLexicon, word: str) -> list[str]:
    """Viterbi split maximising the summed morph log-probabilities.

    Substrings outside the lexicon can be emitted at ``char_penalty`` bits
    per character, so every word has a segmentation. Equal-cost paths
    prefer fewer segments.
    """
    if not word:
        raise ValueError("cannot segment an empty word")
    cached = lex._segment_cache.get(word)
    if cached is not None:
        return list(cached)
    n_total = lex.total_count
    log_n = math.log2(n_total) if n_total else 0.0
    penalty = lex.char_penalty
    n = len(word)
    # best[i] = (bits, segments, start of last segment)
    best: list[tuple[float, int, int] | None] = [None] * (n + 1)
    best[0] = (0.0, 0, 0)
    for end in range(1, n + 1):
        cand = None
        for start in range(end):
            prev = best[start]
            piece = word[start:end]
            c = lex.morphs.get(piece, 0)
            if c:
                bits = log_n - math.log2(c)
            else:
                bits = penalty * (end - start)
            score = (prev[0] + bits, prev[1] + 1, start)
            if (cand is None or score[0] < cand[0] - 1e-12
                    or (score[0] <= cand[0] + 1e-12 and score[1] < cand[1])):
                cand = score
        best[end] = cand
    pieces = []
    end = n
    while end > 0:
        start = best[end][2]
        pieces.append(word[start:end])
        end = start
    pieces.reverse()
    lex._segment_cache[word] = pieces
    return list(pieces)


def morfessor_segment_verse(lex: MorphLexicon, verse: VerseRecord) -> SegmentedVerse:
    return segment_verse(verse, lex.split_word, Method.MORFESSOR)
