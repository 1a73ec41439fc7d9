"""Corpus-based morphological complexity measures (Types, TTR, MATTR, MLW)."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import VerseRecord

MATTR_WINDOW = 500


@dataclass(frozen=True)
class ComplexityProfile:
    token_count: int
    types: int
    ttr: float
    mattr: float
    mlw: float


def _require_tokens(tokens: Sequence[str]) -> None:
    if len(tokens) == 0:
        raise ValueError("measure is undefined for an empty token sequence")


def count_types(tokens: Iterable[str]) -> int:
    return len(set(tokens))


def ttr(tokens: Sequence[str]) -> float:
    _require_tokens(tokens)
    return count_types(tokens) / len(tokens)


def mattr(tokens: Sequence[str], window: int = MATTR_WINDOW) -> float:
    """Mean TTR over every full window of ``window`` consecutive tokens (stride 1).

    Texts shorter than the window fall back to their whole-text TTR.
    """
    _require_tokens(tokens)
    if window < 1:
        raise ValueError("window must be >= 1")
    n = len(tokens)
    if n < window:
        return ttr(tokens)
    counts = Counter(tokens[:window])
    distinct = len(counts)
    total = distinct
    for i in range(window, n):
        out, inc = tokens[i - window], tokens[i]
        counts[out] -= 1
        if counts[out] == 0:
            del counts[out]
            distinct -= 1
        if counts[inc] == 0:
            distinct += 1
        counts[inc] += 1
        total += distinct
    # integer sum of type counts keeps the mean exact up to one division
    return total / ((n - window + 1) * window)


def mlw(tokens: Sequence[str]) -> float:
    _require_tokens(tokens)
    return sum(len(t) for t in tokens) / len(tokens)


def token_stream(verses: Iterable[VerseRecord]) -> list[str]:
    return [tok for v in verses for tok in v.tokens]


def complexity_profile(train: Iterable[VerseRecord], window: int = MATTR_WINDOW) -> ComplexityProfile:
    """All four measures over the concatenated train tokens, in corpus order."""
    tokens = token_stream(train)
    _require_tokens(tokens)
    return ComplexityProfile(
        token_count=len(tokens),
        types=count_types(tokens),
        ttr=ttr(tokens),
        mattr=mattr(tokens, window),
        mlw=mlw(tokens),
    )


PROFILE_FIELDS = ["language_code", "token_count", "types", "ttr", "mattr", "mlw"]


def write_profiles(path, profiles: dict[str, ComplexityProfile]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=PROFILE_FIELDS, lineterminator="\n")
        writer.writeheader()
        for lang in sorted(profiles):
            row = {"language_code": lang, **asdict(profiles[lang])}
            for key in ("ttr", "mattr", "mlw"):
                row[key] = repr(row[key])
            writer.writerow(row)


def read_profiles(path) -> dict[str, ComplexityProfile]:
    profiles = {}
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            profiles[row["language_code"]] = ComplexityProfile(
                token_count=int(row["token_count"]),
                types=int(row["types"]),
                ttr=float(row["ttr"]),
                mattr=float(row["mattr"]),
                mlw=float(row["mlw"]),
            )
    return profiles
