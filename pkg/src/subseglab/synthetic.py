"""Toy morphological grammars that render one shared verse meaning set.

Every synthetic language expresses exactly the same meanings; languages
differ only in how many grammatical categories are bound to the stem as
affixes (the rest surface as free particles), whether bound categories are
fused into one portmanteau affix, and affix position. Information content
per verse is therefore constant while word-level sparsity (TTR) grows with
the amount of bound morphology.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from pathlib import Path

from .corpus import ParallelCorpus, VerseRecord, write_verses

# category -> (part of speech, number of values); value 0 is zero-marked
CATEGORIES = {
    "num": ("noun", 2),
    "case": ("noun", 5),
    "def": ("noun", 2),
    "tense": ("verb", 3),
    "agr": ("verb", 6),
    "asp": ("verb", 2),
    "mood": ("verb", 2),
}
BIND_ORDER = ["num", "tense", "case", "agr", "def", "asp", "mood"]

N_NOUNS = 300
N_VERBS = 120


@dataclass(frozen=True)
class Word:
    pos: str
    lexeme: int
    feats: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Grammar:
    code: str
    bound: tuple[str, ...]
    fused: bool
    prefixing: bool
    seed: int
    # the next category in BIND_ORDER is bound for this fraction of lexemes
    partial: float = 0.0


def meanings(n_verses: int, seed: int = 7) -> list[list[Word]]:
    """Language-independent verse contents (shared by every grammar)."""
    rng = random.Random(seed)
    noun_w = [1.0 / (i + 1) for i in range(N_NOUNS)]
    verb_w = [1.0 / (i + 1) for i in range(N_VERBS)]

    def feats(pos, forced=()):
        out = []
        for cat, (p, nvals) in CATEGORIES.items():
            if p == pos:
                out.append((cat, dict(forced).get(cat, rng.randrange(nvals))))
        return tuple(out)

    verses = []
    for _ in range(n_verses):
        words: list[Word] = []
        for _ in range(rng.randint(1, 3)):
            words.append(Word("noun", rng.choices(range(N_NOUNS), noun_w)[0], feats("noun", [("case", 0)])))
            words.append(Word("verb", rng.choices(range(N_VERBS), verb_w)[0], feats("verb")))
            if rng.random() < 0.7:
                words.append(Word("noun", rng.choices(range(N_NOUNS), noun_w)[0], feats("noun", [("case", 1)])))
            if rng.random() < 0.4:
                words.append(Word("noun", rng.choices(range(N_NOUNS), noun_w)[0],
                                  feats("noun", [("case", rng.randrange(2, 5))])))
        verses.append(words)
    return verses


class Realizer:
    def __init__(self, grammar: Grammar):
        self.g = grammar
        rng = random.Random(f"grammar:{grammar.seed}")
        letters = "ptkbdgmnslrwjhfvzcxq"
        vowels = "aeiouy"
        cons = rng.sample(letters, 10)
        vows = rng.sample(vowels, 4)
        self._rng = rng
        self._cons, self._vows = cons, vows
        used: set[str] = set()
        self.nouns = [self._fresh(rng.randint(2, 3), used) for _ in range(N_NOUNS)]
        self.verbs = [self._fresh(rng.randint(2, 3), used) for _ in range(N_VERBS)]
        # one marker per non-zero category value, bound or free
        self.markers = {(cat, v): self._fresh(1, used)
                        for cat, (_, nvals) in CATEGORIES.items() for v in range(1, nvals)}
        self.portmanteau: dict[tuple, str] = {}
        self._fused_arity = set()
        if grammar.fused:
            for pos in ("noun", "verb"):
                cats = [c for c in grammar.bound if CATEGORIES[c][0] == pos]
                self._fused_arity.add((pos, len(cats)))
                for combo in itertools.product(*(range(CATEGORIES[c][1]) for c in cats)):
                    if any(combo):
                        self.portmanteau[(pos, combo)] = self._fresh(rng.randint(1, 2), used)

    def _syllable(self) -> str:
        s = self._rng.choice(self._cons) + self._rng.choice(self._vows)
        if self._rng.random() < 0.3:
            s += self._rng.choice(self._cons)
        return s

    def _fresh(self, n_syll: int, used: set[str]) -> str:
        while True:
            w = "".join(self._syllable() for _ in range(n_syll))
            if w not in used:
                used.add(w)
                return w

    def word(self, w: Word) -> list[str]:
        stem = (self.nouns if w.pos == "noun" else self.verbs)[w.lexeme]
        feats = dict(w.feats)
        cats = list(self.g.bound)
        k = len(cats)
        if k < len(BIND_ORDER) and (w.lexeme * 0.618034) % 1.0 < self.g.partial:
            cats.append(BIND_ORDER[k])
        bound = [c for c in cats if c in feats]
        free = [c for c in BIND_ORDER if c in feats and c not in bound]
        if self.g.fused and bound and (w.pos, len(bound)) in self._fused_arity:
            combo = tuple(feats[c] for c in bound)
            affixes = [self.portmanteau[(w.pos, combo)]] if any(combo) else []
        else:
            affixes = [self.markers[(c, feats[c])] for c in bound if feats[c]]
        form = "".join(affixes) + stem if self.g.prefixing else stem + "".join(affixes)
        particles = [self.markers[(c, feats[c])] for c in free if feats[c]]
        return particles + [form]

    def verse(self, words: list[Word]) -> tuple[str, ...]:
        out: list[str] = []
        for w in words:
            out.extend(self.word(w))
        out.append(".")
        return tuple(out)


def default_grammars(n_languages: int = 12) -> list[Grammar]:
    """Languages ordered from isolating to highly synthetic."""
    grammars = []
    for i in range(n_languages):
        level = i * len(BIND_ORDER) / max(1, n_languages - 1)
        k = int(level)
        grammars.append(Grammar(
            code=f"syn{i + 1:02d}",
            bound=tuple(BIND_ORDER[:k]),
            fused=(i % 3 == 2 and k >= 2),
            prefixing=(i % 4 == 1 and k > 0),
            seed=100 + i,
            partial=round(level - k, 6),
        ))
    return grammars


def generate_corpus(grammar: Grammar, n_verses: int = 1200, meaning_seed: int = 7) -> ParallelCorpus:
    realizer = Realizer(grammar)
    verses = tuple(
        VerseRecord(f"V{i + 1:05d}", realizer.verse(m))
        for i, m in enumerate(meanings(n_verses, meaning_seed)))
    return ParallelCorpus(grammar.code, verses)


def typology_rows(grammar: Grammar) -> dict[str, str]:
    """Illustrative feature values implied by a toy grammar."""
    k = len(grammar.bound)
    bound = set(grammar.bound)
    verb_bound = len(bound & {"tense", "agr", "asp", "mood"})
    rows = {
        "20A": "Exclusively isolating" if k == 0 else "Exclusively concatenative",
        "21A": "No case" if "case" not in bound else
               ("Case + number" if grammar.fused and "num" in bound else "Monoexponential case"),
        "21B": "No TAM" if "tense" not in bound else
               ("TAM+agreement" if grammar.fused and "agr" in bound else "Monoexponential TAM"),
        "22A": ["0-1 category per word", "2-3 categories per word",
                "4-5 categories per word"][min(2, (verb_bound + 1) // 2)],
        "23A": "No marking" if k == 0 else ("Double marking" if {"case", "agr"} <= bound
                                            else ("Dependent marking" if "case" in bound else "Head marking")),
        "24A": "No marking" if "case" not in bound else "Dependent marking",
        "25A": "Zero-marking" if k == 0 else ("Double-marking" if {"case", "agr"} <= bound
                                              else ("Dependent-marking" if "case" in bound else "Head-marking")),
        "25B": "Zero-marking" if not ({"case", "agr"} & bound) else "Non-zero marking",
        "26A": "Little affixation" if k == 0 else
               ("Strongly prefixing" if grammar.prefixing else "Strongly suffixing"),
        "27A": "No productive reduplication",
        "28A": "No case marking" if "case" not in bound else
               ("Core cases only syncretism" if grammar.fused else "Inflectional case marking is absent or minimal"),
        "29A": "No subject person/number marking" if "agr" not in bound else
               ("Syncretic" if grammar.fused else "Not syncretic"),
    }
    return rows


def write_typology(path, grammars: list[Grammar]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for g in grammars:
            for fid, value in sorted(typology_rows(g).items()):
                fh.write(f"{g.code}\t{fid}\t{value}\n")


def write_synthetic_suite(out_dir, n_languages: int = 12, n_verses: int = 1200) -> dict[str, Path]:
    """Write one corpus TSV per toy language plus ``typology.tsv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grammars = default_grammars(n_languages)
    paths = {}
    for g in grammars:
        corpus = generate_corpus(g, n_verses)
        path = out_dir / f"{g.code}.tsv"
        write_verses(path, corpus.verses)
        paths[g.code] = path
    write_typology(out_dir / "typology.tsv", grammars)
    return paths
