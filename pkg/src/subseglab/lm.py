"""Open-vocabulary segment n-gram model and per-verse surprisal.

Interpolated absolute discounting with Kneser-Ney continuation counts for
the lower orders. Each verse is an independent sequence: ``order - 1``
BOS symbols are prepended and one EOV symbol is predicted at the end.
The unigram level reserves ``d * T / (N + d * T)`` of its mass for UNK,
where ``N`` and ``T`` are the token and type totals at that level, so
unseen segments always get a positive probability.
"""

from __future__ import annotations

import csv
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .segmentation import SegmentedVerse

BOS = "<s>"
EOV = "</v>"
UNK_SEG = "<unk>"


@dataclass
class _Level:
    """Counts for one order: context -> next-unit counts."""

    counts: dict[tuple, Counter] = field(default_factory=lambda: defaultdict(Counter))
    totals: dict[tuple, int] = field(default_factory=dict)
    distinct: dict[tuple, int] = field(default_factory=dict)

    def finish(self) -> None:
        self.counts = dict(self.counts)
        for ctx, nxt in self.counts.items():
            self.totals[ctx] = sum(nxt.values())
            self.distinct[ctx] = len(nxt)


class LanguageModel:
    def __init__(self, order: int = 5, discount: float = 0.75):
        if order < 1:
            raise ValueError("order must be >= 1")
        if not 0 < discount < 1:
            raise ValueError("discount must lie in (0, 1)")
        self.order = order
        self.discount = discount
        self.levels: list[_Level] = []  # levels[k] holds (k+1)-grams
        self.vocab: set[str] = set()

    # -- estimation --------------------------------------------------------

    def fit(self, verses: Iterable[SegmentedVerse]) -> "LanguageModel":
        n = self.order
        top: dict[tuple, Counter] = defaultdict(Counter)
        for sv in verses:
            seq = [BOS] * (n - 1) + list(sv.units) + [EOV]
            for i in range(n - 1, len(seq)):
                top[tuple(seq[i - n + 1:i])][seq[i]] += 1
        return self._build(top)

    def _build(self, top: dict[tuple, Counter]) -> "LanguageModel":
        n = self.order
        if not top:
            raise ValueError("cannot train on an empty training set")
        levels = [_Level() for _ in range(n)]
        levels[n - 1].counts = top
        # Lower orders use continuation counts: the number of distinct
        # one-unit-longer left extensions of each n-gram.
        for k in range(n - 1, 0, -1):
            lower = levels[k - 1].counts
            for ctx, nxt in levels[k].counts.items():
                short = ctx[1:]
                for w in nxt:
                    lower[short][w] += 1
        for lvl in levels:
            lvl.finish()
        self.levels = levels
        self.vocab = set(levels[0].counts[()]) | {UNK_SEG}
        return self

    def save(self, path) -> None:
        """Store the top-order counts; lower orders are rebuilt on load."""
        top = self.levels[-1].counts
        with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"#order\t{self.order}\n#discount\t{self.discount!r}\n")
            for ctx in sorted(top):
                for w, c in sorted(top[ctx].items()):
                    fh.write(f"{' '.join(ctx)}\t{w}\t{c}\n")

    @classmethod
    def load(cls, path) -> "LanguageModel":
        header: dict[str, str] = {}
        top: dict[tuple, Counter] = defaultdict(Counter)
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                fields = line.rstrip("\n").split("\t")
                if fields[0].startswith("#"):
                    header[fields[0][1:]] = fields[1]
                    continue
                if len(fields) != 3:
                    raise ValueError(f"{path}:{lineno}: expected context, unit and count")
                ctx = tuple(fields[0].split(" ")) if fields[0] else ()
                top[ctx][fields[1]] += int(fields[2])
        try:
            lm = cls(int(header["order"]), float(header["discount"]))
        except KeyError as exc:
            raise ValueError(f"{path}: missing #{exc.args[0]} header") from None
        return lm._build(top)

    # -- probabilities -----------------------------------------------------

    def _unigram(self, w: str) -> float:
        lvl = self.levels[0]
        n_tok = lvl.totals[()]
        n_types = lvl.distinct[()]
        reserve = self.discount * n_types
        if w == UNK_SEG:
            return reserve / (n_tok + reserve)
        return lvl.counts[()].get(w, 0) / (n_tok + reserve)

    def prob(self, w: str, context: Sequence[str] = ()) -> float:
        """p(w | context); ``w`` outside the vocabulary is scored as UNK."""
        if w not in self.vocab:
            w = UNK_SEG
        ctx = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        if len(ctx) < self.order - 1:
            ctx = (BOS,) * (self.order - 1 - len(ctx)) + ctx
        p = self._unigram(w)
        d = self.discount
        for k in range(1, self.order):
            h = ctx[len(ctx) - k:]
            lvl = self.levels[k]
            total = lvl.totals.get(h)
            if not total:
                continue
            c = lvl.counts[h].get(w, 0)
            p = max(c - d, 0.0) / total + d * lvl.distinct[h] / total * p
        return p

    def contexts(self, k: int) -> list[tuple]:
        """Observed contexts of the ``k+1``-gram level (for diagnostics and tests)."""
        return sorted(self.levels[k].counts)

    # -- scoring -----------------------------------------------------------

    def verse_nll(self, sv: SegmentedVerse) -> float:
        """Bits needed to encode the verse's units plus the end-of-verse event."""
        seq = [BOS] * (self.order - 1) + list(sv.units) + [EOV]
        bits = []
        for i in range(self.order - 1, len(seq)):
            ctx = seq[i - self.order + 1:i] if self.order > 1 else ()
            bits.append(-math.log2(self.prob(seq[i], ctx)))
        return math.fsum(bits)


def train_lm(train: Sequence[SegmentedVerse], order: int = 5, discount: float = 0.75) -> LanguageModel:
    if not train:
        raise ValueError("cannot train on an empty training set")
    return LanguageModel(order, discount).fit(train)


def verse_nll(lm: LanguageModel, sv: SegmentedVerse) -> float:
    return lm.verse_nll(sv)


@dataclass
class SurprisalReport:
    language_code: str
    method: str
    nll: dict[str, float]  # verse_id -> bits, in test order

    @property
    def mean_bits(self) -> float:
        if not self.nll:
            raise ValueError("empty report")
        return math.fsum(self.nll.values()) / len(self.nll)

    @property
    def n_verses(self) -> int:
        return len(self.nll)


def surprisal_per_verse(lm: LanguageModel, test: Sequence[SegmentedVerse],
                        language_code: str = "", method: str = "") -> SurprisalReport:
    if not test:
        raise ValueError("surprisal needs at least one test verse")
    nll = {}
    for sv in test:
        if sv.verse_id in nll:
            raise ValueError(f"duplicate verse id {sv.verse_id!r} in test set")
        nll[sv.verse_id] = lm.verse_nll(sv)
    return SurprisalReport(language_code, method, nll)


VERSE_FIELDS = ["language_code", "method", "verse_id", "nll_bits"]
SUMMARY_FIELDS = ["language_code", "method", "L_bits", "n_verses"]


def write_verse_report(path, reports: Iterable[SurprisalReport]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(VERSE_FIELDS)
        for r in reports:
            for vid, bits in r.nll.items():
                w.writerow([r.language_code, r.method, vid, repr(bits)])


def write_summary(path, reports: Iterable[SurprisalReport]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for r in reports:
            w.writerow([r.language_code, r.method, repr(r.mean_bits), r.n_verses])


def read_summary(path) -> dict[tuple[str, str], float]:
    """(language_code, method) -> L in bits."""
    out = {}
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out[(row["language_code"], row["method"])] = float(row["L_bits"])
    return out


def read_verse_report(path) -> list[SurprisalReport]:
    grouped: dict[tuple[str, str], dict[str, float]] = {}
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["language_code"], row["method"])
            grouped.setdefault(key, {})[row["verse_id"]] = float(row["nll_bits"])
    return [SurprisalReport(lang, method, nll) for (lang, method), nll in grouped.items()]
