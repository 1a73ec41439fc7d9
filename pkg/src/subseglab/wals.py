"""Typological feature tables and their join with per-language surprisal."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .stats import GroupedSample

FEATURES = {
    "20A": "Fusion of Selected Inflectional Formatives",
    "21A": "Exponence of Selected Inflectional Formatives",
    "21B": "Exponence of Tense-Aspect-Mood Inflection",
    "22A": "Inflectional Synthesis of the Verb",
    "23A": "Locus of Marking in the Clause",
    "24A": "Locus of Marking in Possessive Noun Phrases",
    "25A": "Locus of Marking: Whole-language Typology",
    "25B": "Zero Marking of A and P Arguments",
    "26A": "Prefixing vs. Suffixing in Inflectional Morphology",
    "27A": "Reduplication",
    "28A": "Case Syncretism",
    "29A": "Syncretism in Verbal Person/Number Marking",
}


class TypologyError(ValueError):
    pass


@dataclass
class TypologyTable:
    rows: dict[str, dict[str, str]] = field(default_factory=dict)
    catalog: dict[str, str] = field(default_factory=lambda: dict(FEATURES))

    @property
    def languages(self) -> list[str]:
        return sorted(self.rows)

    def value(self, language: str, feature_id: str) -> str | None:
        if feature_id not in self.catalog:
            raise TypologyError(f"unknown feature id {feature_id!r}")
        return self.rows.get(language, {}).get(feature_id)


def load_typology(path) -> TypologyTable:
    """Read ``language<TAB>feature_id<TAB>value`` rows.

    Feature ids must belong to the catalog, values must be non-empty and a
    (language, feature) pair may appear only once.
    """
    table = TypologyTable()
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise TypologyError(f"{path}:{lineno}: expected 3 TAB-separated fields")
            lang, fid, value = parts
            if fid not in table.catalog:
                raise TypologyError(f"{path}:{lineno}: feature {fid!r} is not one of the 12 morphology features")
            if not value:
                raise TypologyError(f"{path}:{lineno}: empty value; omit the row for missing data")
            row = table.rows.setdefault(lang, {})
            if fid in row:
                raise TypologyError(f"{path}:{lineno}: duplicate entry for ({lang}, {fid})")
            row[fid] = value
    return table


@dataclass
class JoinAccounting:
    feature_id: str
    included: list[str]
    missing_feature: list[str]
    missing_surprisal: list[str]


def group_by_feature(table: TypologyTable, feature_id: str,
                     surprisals: Mapping[str, float]) -> tuple[GroupedSample, JoinAccounting]:
    """Group per-language surprisal by the language's value for ``feature_id``.

    Every language known to either side lands in exactly one of: included,
    missing the feature value, or missing surprisal.
    """
    if feature_id not in table.catalog:
        raise TypologyError(f"unknown feature id {feature_id!r}")
    groups: dict[str, list[float]] = {}
    acct = JoinAccounting(feature_id, [], [], [])
    for lang in sorted(set(table.rows) | set(surprisals)):
        value = table.rows.get(lang, {}).get(feature_id)
        if value is None:
            acct.missing_feature.append(lang)
        elif lang not in surprisals:
            acct.missing_surprisal.append(lang)
        else:
            groups.setdefault(value, []).append(surprisals[lang])
            acct.included.append(lang)
    return GroupedSample(feature_id, dict(sorted(groups.items()))), acct


def fixture_table_path() -> Path:
    return Path(str(resources.files("subseglab") / "data" / "wals_fixture.tsv"))
