"""A small finite-state transducer runtime and the analyzer-to-segmenter adapter.

Transducers are read from AT&T text format with separate input and output
symbol tables. Segmenter transducers copy the surface form and insert the
boundary symbol ``<B>`` between morphs; :func:`segment_word` picks one
analysis and :func:`fst_backoff_segment` falls back to a statistical
segmenter for words the transducer does not cover.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .corpus import VerseRecord
from .segmentation import Method, MergeTable, SegmentedVerse, segment_verse

_logger = logging.getLogger(__name__)

EPSILON = "<eps>"
BOUND = "<B>"


class FstError(ValueError):
    pass


@dataclass
class SymbolTable:
    symbols: dict[int, str]

    def __post_init__(self):
        if self.symbols.get(0) is None:
            raise FstError("symbol id 0 must be defined (epsilon)")
        self.ids = {s: i for i, s in self.symbols.items()}
        if len(self.ids) != len(self.symbols):
            raise FstError("symbol table maps one symbol to several ids")

    @property
    def epsilon(self) -> str:
        return self.symbols[0]

    @classmethod
    def from_symbols(cls, symbols: Iterable[str], epsilon: str = EPSILON) -> "SymbolTable":
        table = {0: epsilon}
        for s in sorted(set(symbols) - {epsilon}):
            table[len(table)] = s
        return cls(table)

    @classmethod
    def load(cls, path) -> "SymbolTable":
        table: dict[int, str] = {}
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise FstError(f"{path}:{lineno}: expected 'symbol<TAB>id'")
                try:
                    sid = int(parts[1])
                except ValueError:
                    raise FstError(f"{path}:{lineno}: non-integer id {parts[1]!r}") from None
                if sid in table:
                    raise FstError(f"{path}:{lineno}: id {sid} defined twice")
                table[sid] = parts[0]
        return cls(table)

    def save(self, path) -> None:
        with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
            for sid in sorted(self.symbols):
                fh.write(f"{self.symbols[sid]}\t{sid}\n")


@dataclass
class Fst:
    isyms: SymbolTable
    osyms: SymbolTable
    start: int
    arcs: dict[int, list[tuple[int, int, int]]]  # state -> [(ilabel, olabel, next)]
    finals: set[int]
    _sorted: dict = field(default=None, init=False, repr=False)

    @property
    def states(self) -> set[int]:
        out = {self.start} | set(self.finals) | set(self.arcs)
        for arcs in self.arcs.values():
            out.update(dst for _, _, dst in arcs)
        return out

    def _arcs_sorted(self, state: int):
        if self._sorted is None:
            self._sorted = {
                s: sorted(arcs, key=lambda a: (self.isyms.symbols[a[0]], self.osyms.symbols[a[1]], a[2]))
                for s, arcs in self.arcs.items()
            }
        return self._sorted.get(state, ())

    def accepts_nothing(self) -> bool:
        """True when no final state is reachable from the start state."""
        seen, stack = {self.start}, [self.start]
        while stack:
            s = stack.pop()
            if s in self.finals:
                return False
            for _, _, dst in self.arcs.get(s, ()):
                if dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        return True

    def apply(self, surface: str, max_outputs: int = 64) -> list[str]:
        return apply(self, surface, max_outputs)

    def save(self, arcs_path, isyms_path, osyms_path) -> None:
        with Path(arcs_path).open("w", encoding="utf-8", newline="\n") as fh:
            order = [self.start] + sorted(s for s in self.arcs if s != self.start)
            for s in order:
                for il, ol, dst in self._arcs_sorted(s):
                    fh.write(f"{s}\t{dst}\t{self.isyms.symbols[il]}\t{self.osyms.symbols[ol]}\n")
            for f in sorted(self.finals):
                fh.write(f"{f}\n")
        self.isyms.save(isyms_path)
        self.osyms.save(osyms_path)


def load_fst(arcs_path, isyms_path, osyms_path) -> Fst:
    """Read an AT&T-format transducer.

    Arc lines are ``src dst isym osym [weight]`` and final-state lines are
    ``state [weight]``, all TAB-separated; weights are ignored. The start
    state is the source of the first arc line. Input symbols other than
    epsilon must be single characters.
    """
    isyms = SymbolTable.load(isyms_path)
    osyms = SymbolTable.load(osyms_path)
    for sid, sym in isyms.symbols.items():
        if sid != 0 and len(sym) != 1:
            raise FstError(f"{isyms_path}: input symbol {sym!r} is not a single character")

    arcs: dict[int, list[tuple[int, int, int]]] = {}
    finals: set[int] = set()
    targets: list[tuple[int, int]] = []  # (state, lineno)
    start = None
    with Path(arcs_path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            try:
                if len(parts) in (1, 2):
                    state = int(parts[0])
                    finals.add(state)
                    if start is None:
                        start = state
                    continue
                if len(parts) not in (4, 5):
                    raise FstError(f"{arcs_path}:{lineno}: expected 1, 2, 4 or 5 fields")
                src, dst = int(parts[0]), int(parts[1])
            except ValueError:
                raise FstError(f"{arcs_path}:{lineno}: state ids must be integers") from None
            isym, osym = parts[2], parts[3]
            if isym not in isyms.ids:
                raise FstError(f"{arcs_path}:{lineno}: unknown input symbol {isym!r}")
            if osym not in osyms.ids:
                raise FstError(f"{arcs_path}:{lineno}: unknown output symbol {osym!r}")
            if start is None:
                start = src
            arcs.setdefault(src, []).append((isyms.ids[isym], osyms.ids[osym], dst))
            targets.append((dst, lineno))
    if start is None:
        raise FstError(f"{arcs_path}: no arcs or final states")
    defined = set(arcs) | finals
    for dst, lineno in targets:
        if dst not in defined:
            raise FstError(f"{arcs_path}:{lineno}: arc target {dst} is not a defined state")
    fst = Fst(isyms, osyms, start, arcs, finals)
    if fst.accepts_nothing():
        _logger.warning("%s: no final state reachable; transducer accepts nothing", arcs_path)
    return fst


def apply(fst: Fst, surface: str, max_outputs: int = 64) -> list[str]:
    """All outputs of accepting paths that consume exactly ``surface``.

    Paths are explored depth first with arcs in lexicographic label order,
    so the result order is deterministic; duplicates are dropped and at most
    ``max_outputs`` strings are returned. A path may not revisit a
    (state, input position) pair, which cuts epsilon cycles.
    """
    if max_outputs < 1:
        raise ValueError("max_outputs must be >= 1")
    try:
        labels = [fst.isyms.ids[ch] for ch in surface]
    except KeyError:
        return []
    if any(label == 0 for label in labels):
        return []
    outputs: dict[str, None] = {}
    osyms = fst.osyms.symbols
    n = len(labels)

    def walk(state, pos, out, on_path):
        if len(outputs) >= max_outputs:
            return
        if pos == n and state in fst.finals:
            outputs.setdefault("".join(out), None)
        for il, ol, dst in fst._arcs_sorted(state):
            if il == 0:
                npos = pos
            elif pos < n and il == labels[pos]:
                npos = pos + 1
            else:
                continue
            key = (dst, npos)
            if key in on_path:
                continue
            on_path.add(key)
            if ol != 0:
                out.append(osyms[ol])
            walk(dst, npos, out, on_path)
            if ol != 0:
                out.pop()
            on_path.discard(key)

    walk(fst.start, 0, [], {(fst.start, 0)})
    return list(outputs)[:max_outputs]


@dataclass(frozen=True)
class SegmenterPolicy:
    exclude_identity: bool = False
    max_outputs: int = 64
    boundary: str = BOUND

    def __post_init__(self):
        if self.max_outputs < 1:
            raise ValueError("max_outputs must be >= 1")


def candidate_segmentations(fst: Fst, policy: SegmenterPolicy, word: str) -> list[tuple[str, ...]]:
    out = []
    for analysis in apply(fst, word, policy.max_outputs):
        pieces = tuple(p for p in analysis.split(policy.boundary) if p)
        # canonical (non-surface) morphs cannot be used as segments
        if pieces and "".join(pieces) == word and pieces not in out:
            out.append(pieces)
    return out


def segment_word(fst: Fst, policy: SegmenterPolicy, word: str) -> list[str] | None:
    """Pick the candidate with the fewest segments, or None without analyses."""
    cands = candidate_segmentations(fst, policy, word)
    if policy.exclude_identity and len(cands) > 1:
        cands = [c for c in cands if c != (word,)]
    if not cands:
        return None
    return list(min(cands, key=lambda c: (len(c), c)))


def fallback_splitter(fallback) -> tuple[Callable[[str], Sequence[str]], Method]:
    if isinstance(fallback, MergeTable):
        return fallback.split_word, Method.FST_BPE
    # duck-typed so the morfessor module is not imported here
    if hasattr(fallback, "morphs") and hasattr(fallback, "split_word"):
        return fallback.split_word, Method.FST_MORFESSOR
    raise TypeError(f"unsupported fallback segmenter {type(fallback).__name__}")


def fst_backoff_segment(fst: Fst, policy: SegmenterPolicy, fallback, verse: VerseRecord) -> SegmentedVerse:
    """Segment with the transducer where it has an analysis, else with ``fallback``.

    ``fallback`` is a trained BPE :class:`MergeTable` (giving FST+BPE) or a
    Morfessor lexicon (giving FST+Morfessor).
    """
    split_fallback, method = fallback_splitter(fallback)
    cache: dict[str, Sequence[str]] = {}

    def split(word):
        if word not in cache:
            pieces = segment_word(fst, policy, word)
            cache[word] = pieces if pieces is not None else split_fallback(word)
        return cache[word]

    return segment_verse(verse, split, method)


# -- building toy segmenters ------------------------------------------------

def build_segmenter_fst(analyses: Iterable[str], boundary: str = BOUND) -> Fst:
    """Compile segmented surface forms such as ``"walk<B>s"`` into a trie transducer.

    Each character becomes a ``c:c`` arc and each boundary an ``<eps>:<B>``
    arc. Several analyses of the same word make the transducer ambiguous.
    """
    arcs: dict[int, list[tuple[str, str, int]]] = {}
    finals: set[int] = set()
    next_state = 1
    for analysis in analyses:
        state = 0
        for piece_idx, piece in enumerate(analysis.split(boundary)):
            steps = ([(EPSILON, boundary)] if piece_idx else []) + [(ch, ch) for ch in piece]
            for isym, osym in steps:
                for il, ol, dst in arcs.get(state, ()):
                    if (il, ol) == (isym, osym):
                        state = dst
                        break
                else:
                    arcs.setdefault(state, []).append((isym, osym, next_state))
                    state = next_state
                    next_state += 1
        finals.add(state)
    isyms = SymbolTable.from_symbols(i for al in arcs.values() for i, _, _ in al)
    osyms = SymbolTable.from_symbols([o for al in arcs.values() for _, o, _ in al] + [boundary])
    int_arcs = {s: [(isyms.ids[i], osyms.ids[o], d) for i, o, d in al] for s, al in arcs.items()}
    return Fst(isyms, osyms, 0, int_arcs, finals)


TOY_FSTS = ("eng", "tur")


def toy_fst_paths(name: str) -> tuple[Path, Path, Path]:
    if name not in TOY_FSTS:
        raise KeyError(f"no toy transducer named {name!r}")
    base = resources.files("subseglab") / "data" / "fst" / name
    return (Path(str(base / "arcs.att")), Path(str(base / "isyms.txt")),
            Path(str(base / "osyms.txt")))


def load_toy_fst(name: str) -> Fst:
    return load_fst(*toy_fst_paths(name))
