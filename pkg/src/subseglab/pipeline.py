"""Per-language cells (segment, train LM, score) and the cross-language analysis."""

from __future__ import annotations

import configparser
import csv
import itertools
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import DataSplit, load_corpus, split_corpus, unk_singleton_chars
from .fst import Fst, SegmenterPolicy, fst_backoff_segment, load_fst
from .lm import SurprisalReport, surprisal_per_verse, train_lm, write_summary, write_verse_report
from .metrics import MATTR_WINDOW, ComplexityProfile, complexity_profile, write_profiles
from .morfessor import MorfessorConfig, MorphLexicon, morfessor_segment_verse, morfessor_train
from .segmentation import (MERGE_FRACTION, MergeTable, Method, SegmentedVerse, bpe_apply,
                           bpe_train, char_segment, merge_count_for)
from .stats import (OK, SKIPPED, StatResult, benjamini_hochberg, bh_adjust, delta,
                    dunn_posthoc, filter_small_groups, kruskal_wallis, spearman)
from .wals import FEATURES, TypologyTable, group_by_feature, load_typology

_logger = logging.getLogger(__name__)

OUTPUT_ENV = "SUBSEGLAB_OUTPUT_DIR"
ERROR = "ERROR"
MEASURES = ("types", "ttr", "mattr", "mlw")
FAMILIES = ("wals", "complexity", "delta")
FST_FILES = ("arcs.att", "isyms.txt", "osyms.txt")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    corpora: dict[str, Path]
    output_dir: Path
    methods: tuple[Method, ...] = tuple(Method)
    languages: tuple[str, ...] = ()
    fst_dirs: dict[str, Path] = field(default_factory=dict)
    typology: Path | None = None
    merge_fraction: float = MERGE_FRACTION
    lm_order: int = 5
    lm_discount: float = 0.75
    mattr_window: int = MATTR_WINDOW
    alpha: float = 0.05
    fdr_families: tuple[str, ...] = FAMILIES
    min_group_size: int = 5
    seed: int = 42
    morfessor_restarts: int = 8

    def __post_init__(self):
        self.methods = tuple(Method(m) for m in self.methods)
        if not self.languages:
            self.languages = tuple(sorted(self.corpora))
        self.validate()

    def validate(self) -> None:
        if not self.languages:
            raise ConfigError("at least one language is required")
        if not self.methods:
            raise ConfigError("at least one method is required")
        missing = [lang for lang in self.languages if lang not in self.corpora]
        if missing:
            raise ConfigError(f"no corpus path for {', '.join(missing)}")
        if not 0 < self.merge_fraction <= 1:
            raise ConfigError("merge_fraction must lie in (0, 1]")
        if not 0 < self.alpha <= 1:
            raise ConfigError("alpha must lie in (0, 1]")
        if not 0 < self.lm_discount < 1:
            raise ConfigError("lm_discount must lie in (0, 1)")
        if self.mattr_window < 1:
            raise ConfigError("mattr_window must be >= 1")
        if self.lm_order < 1:
            raise ConfigError("lm_order must be >= 1")
        unknown = set(self.fdr_families) - set(FAMILIES)
        if unknown:
            raise ConfigError(f"unknown test families: {', '.join(sorted(unknown))}")

    @classmethod
    def from_ini(cls, path, output_dir=None) -> "RunConfig":
        """Read an INI file with ``[run]``, ``[corpora]`` and optional ``[fst]`` sections.

        Relative paths are resolved against the file's directory. The output
        directory is taken from ``output_dir``, then ``$SUBSEGLAB_OUTPUT_DIR``,
        then the file.
        """
        path = Path(path)
        parser = configparser.ConfigParser(inline_comment_prefixes=(";",))
        if not parser.read(path, encoding="utf-8"):
            raise ConfigError(f"cannot read config {path}")
        base = path.parent

        def resolve(p: str) -> Path:
            q = Path(p).expanduser()
            return q if q.is_absolute() else base / q

        if not parser.has_section("corpora"):
            raise ConfigError(f"{path}: missing [corpora] section")
        run = parser["run"] if parser.has_section("run") else {}
        corpora = {k: resolve(v) for k, v in parser["corpora"].items()}
        fst_dirs = ({k: resolve(v) for k, v in parser["fst"].items()}
                    if parser.has_section("fst") else {})
        override = output_dir or os.environ.get(OUTPUT_ENV)
        out = Path(override) if override else resolve(run.get("output_dir", "out"))

        def listing(key, default):
            raw = run.get(key)
            return tuple(x.strip() for x in raw.split(",") if x.strip()) if raw else default

        try:
            return cls(
                corpora=corpora,
                output_dir=out,
                methods=listing("methods", tuple(Method)),
                languages=listing("languages", ()),
                fst_dirs=fst_dirs,
                typology=resolve(run["typology"]) if run.get("typology") else None,
                merge_fraction=float(run.get("merge_fraction", MERGE_FRACTION)),
                lm_order=int(run.get("lm_order", 5)),
                lm_discount=float(run.get("lm_discount", 0.75)),
                mattr_window=int(run.get("mattr_window", MATTR_WINDOW)),
                alpha=float(run.get("alpha", 0.05)),
                fdr_families=listing("fdr_families", FAMILIES),
                min_group_size=int(run.get("min_group_size", 5)),
                seed=int(run.get("seed", 42)),
                morfessor_restarts=int(run.get("morfessor_restarts", 8)),
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{path}: {exc}") from exc


# -- cells -------------------------------------------------------------------

@dataclass
class CellStatus:
    language_code: str
    method: str
    status: str
    message: str = ""


class _LanguageState:
    """Segmenters trained for one language, shared by the cells that need them."""

    def __init__(self, split: DataSplit, profile: ComplexityProfile, config: RunConfig):
        self.split = split
        self.profile = profile
        self.config = config
        self._bpe: MergeTable | None = None
        self._morf: MorphLexicon | None = None
        self._fst: Fst | None = None

    def bpe(self) -> MergeTable:
        if self._bpe is None:
            n = merge_count_for(self.profile.types, self.config.merge_fraction)
            self._bpe = bpe_train(self.split.train, n)
        return self._bpe

    def morfessor(self) -> MorphLexicon:
        if self._morf is None:
            cfg = MorfessorConfig(seed=self.config.seed, restarts=self.config.morfessor_restarts)
            self._morf = morfessor_train(self.split.train, cfg)
        return self._morf

    def fst(self) -> Fst | None:
        if self._fst is None:
            d = self.config.fst_dirs.get(self.split.language_code)
            if d is None:
                return None
            self._fst = load_fst(*(Path(d) / name for name in FST_FILES))
        return self._fst


def segment_split(state: _LanguageState, method: Method) -> tuple[list[SegmentedVerse], list[SegmentedVerse]] | None:
    """Train/test segmentations for one method; None when the method cannot apply."""
    if method is Method.CHAR:
        seg = char_segment
    elif method is Method.BPE:
        table = state.bpe()
        seg = lambda v: bpe_apply(table, v)  # noqa: E731
    elif method is Method.MORFESSOR:
        lex = state.morfessor()
        seg = lambda v: morfessor_segment_verse(lex, v)  # noqa: E731
    else:
        fst = state.fst()
        if fst is None:
            return None
        fallback = state.bpe() if method is Method.FST_BPE else state.morfessor()
        policy = SegmenterPolicy()
        seg = lambda v: fst_backoff_segment(fst, policy, fallback, v)  # noqa: E731
    return [seg(v) for v in state.split.train], [seg(v) for v in state.split.test]


def run_cell(state: _LanguageState, method: Method) -> tuple[CellStatus, SurprisalReport | None]:
    lang = state.split.language_code
    try:
        segmented = segment_split(state, method)
        if segmented is None:
            return CellStatus(lang, method.value, SKIPPED, "no FST for this language"), None
        train, test = segmented
        lm = train_lm(train, state.config.lm_order, state.config.lm_discount)
        report = surprisal_per_verse(lm, test, lang, method.value)
    except Exception as exc:  # one failing cell must not stop the others
        _logger.exception("cell %s/%s failed", lang, method.value)
        return CellStatus(lang, method.value, ERROR, f"{type(exc).__name__}: {exc}"), None
    return CellStatus(lang, method.value, OK), report


def prepare_language(config: RunConfig, lang: str) -> _LanguageState:
    corpus = load_corpus(config.corpora[lang], lang)
    split = unk_singleton_chars(split_corpus(corpus))
    return _LanguageState(split, complexity_profile(split.train, config.mattr_window), config)


# -- analysis ----------------------------------------------------------------

@dataclass
class Analysis:
    wals: list[dict] = field(default_factory=list)
    posthoc: list[dict] = field(default_factory=list)
    complexity: list[dict] = field(default_factory=list)
    deltas: list[dict] = field(default_factory=list)
    delta_correlations: list[dict] = field(default_factory=list)


def _stat_row(res: StatResult, **keys) -> dict:
    return {**keys, "statistic": res.statistic, "p_value": res.p_value, "n": res.n,
            "status": res.status, "note": res.note}


def _apply_bh(rows: list[dict], alpha: float, by: str) -> None:
    """BH within each value of ``by``; rows without a p-value get no flag."""
    for _, grp in itertools.groupby(sorted(range(len(rows)), key=lambda i: rows[i][by]),
                                    key=lambda i: rows[i][by]):
        idx = [i for i in grp if rows[i]["p_value"] is not None]
        if not idx:
            continue
        pvals = [rows[i]["p_value"] for i in idx]
        flags, cutoff = benjamini_hochberg(pvals, alpha)
        for i, flag, adj in zip(idx, flags, bh_adjust(pvals)):
            rows[i].update(p_adjusted=adj, bh_significant=flag, bh_cutoff=cutoff)


def analyze(L: Mapping[tuple[str, str], float], profiles: Mapping[str, ComplexityProfile],
            methods: Sequence[str], typology: TypologyTable | None = None,
            alpha: float = 0.05, families: Iterable[str] = FAMILIES,
            min_group_size: int = 5) -> Analysis:
    """Cross-language tests over the mean surprisal ``L[(language, method)]``."""
    families = set(families)
    out = Analysis()
    samples = []  # filtered GroupedSample per wals row, for the post-hoc step
    for method in methods:
        per_lang = {lang: v for (lang, m), v in sorted(L.items()) if m == method}
        langs = [lang for lang in sorted(per_lang) if lang in profiles]
        if typology is not None:
            for fid in FEATURES:
                gs, acct = group_by_feature(typology, fid, per_lang)
                gs = filter_small_groups(gs, min_group_size)
                res = kruskal_wallis(gs)
                out.wals.append(_stat_row(
                    res, method=method, feature_id=fid,
                    eta_squared=res.effect_size, effect=res.label,
                    groups=";".join(f"{k}={n}" for k, n in gs.sizes.items()),
                    missing_feature=len(acct.missing_feature),
                    missing_surprisal=len(acct.missing_surprisal)))
                samples.append(gs)
        for measure in MEASURES:
            xs = [getattr(profiles[lang], measure) for lang in langs]
            res = spearman(xs, [per_lang[lang] for lang in langs])
            out.complexity.append(_stat_row(res, method=method, measure=measure))
    for a, b in itertools.combinations(methods, 2):
        pair = f"{a}-{b}"
        langs = sorted(lang for lang in profiles
                       if (lang, a) in L and (lang, b) in L)
        ds = {lang: delta(L[(lang, a)], L[(lang, b)]) for lang in langs}
        for lang in langs:
            out.deltas.append({"pair": pair, "language_code": lang, "delta": ds[lang]})
        for measure in MEASURES:
            xs = [getattr(profiles[lang], measure) for lang in langs]
            res = spearman(xs, [ds[lang] for lang in langs]) if langs else \
                StatResult("spearman", status=SKIPPED, note="no languages")
            out.delta_correlations.append(_stat_row(res, pair=pair, measure=measure))
    if "wals" in families:
        _apply_bh(out.wals, alpha, "method")
    # post-hoc comparisons only for features with a significant omnibus test
    for row, gs in zip(out.wals, samples):
        significant = row.get("bh_significant") if "wals" in families else \
            (row["p_value"] is not None and row["p_value"] <= alpha)
        if not significant:
            continue
        for d in dunn_posthoc(gs):
            out.posthoc.append({"method": row["method"], "feature_id": row["feature_id"],
                                "comparison": d.label, "z": d.statistic, "p_adjusted": d.p_value,
                                "p_raw": float(d.note.split("=", 1)[1])})
    if "complexity" in families:
        _apply_bh(out.complexity, alpha, "method")
    if "delta" in families:
        _apply_bh(out.delta_correlations, alpha, "pair")
    return out


# -- writing -----------------------------------------------------------------

WALS_FIELDS = ["method", "feature_id", "statistic", "p_value", "p_adjusted", "bh_significant",
               "bh_cutoff", "eta_squared", "effect", "n", "groups", "missing_feature",
               "missing_surprisal", "status", "note"]
POSTHOC_FIELDS = ["method", "feature_id", "comparison", "z", "p_raw", "p_adjusted"]
CORR_FIELDS = ["method", "measure", "statistic", "p_value", "p_adjusted", "bh_significant",
               "bh_cutoff", "n", "status", "note"]
DELTA_FIELDS = ["pair", "language_code", "delta"]
DELTA_CORR_FIELDS = ["pair"] + CORR_FIELDS[1:]
CELL_FIELDS = ["language_code", "method", "status", "message"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows(path, fields: Sequence[str], rows: Iterable[Mapping]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for row in rows:
            w.writerow([_fmt(row.get(f)) for f in fields])


def write_analysis(out_dir, analysis: Analysis) -> None:
    out_dir = Path(out_dir)
    write_rows(out_dir / "wals_tests.csv", WALS_FIELDS, analysis.wals)
    write_rows(out_dir / "wals_posthoc.csv", POSTHOC_FIELDS, analysis.posthoc)
    write_rows(out_dir / "complexity_correlations.csv", CORR_FIELDS, analysis.complexity)
    write_rows(out_dir / "deltas.csv", DELTA_FIELDS, analysis.deltas)
    write_rows(out_dir / "delta_correlations.csv", DELTA_CORR_FIELDS, analysis.delta_correlations)


@dataclass
class RunResult:
    output_dir: Path
    cells: list[CellStatus]
    reports: list[SurprisalReport]
    profiles: dict[str, ComplexityProfile]
    analysis: Analysis

    @property
    def ok(self) -> bool:
        return all(c.status != ERROR for c in self.cells)


def run_pipeline(config: RunConfig, plots: bool = True) -> RunResult:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    methods = [m.value for m in config.methods]
    cells: list[CellStatus] = []
    reports: list[SurprisalReport] = []
    profiles: dict[str, ComplexityProfile] = {}
    for lang in config.languages:
        try:
            state = prepare_language(config, lang)
        except Exception as exc:
            _logger.exception("preparing %s failed", lang)
            cells.extend(CellStatus(lang, m, ERROR, f"{type(exc).__name__}: {exc}") for m in methods)
            continue
        profiles[lang] = state.profile
        for method in config.methods:
            status, report = run_cell(state, method)
            cells.append(status)
            if report is not None:
                reports.append(report)
        _logger.info("finished %s", lang)

    write_rows(out / "cells.csv", CELL_FIELDS, (vars(c) for c in cells))
    write_profiles(out / "profiles.csv", profiles)
    write_verse_report(out / "surprisal_verses.csv", reports)
    write_summary(out / "surprisal_summary.csv", reports)

    typology = load_typology(config.typology) if config.typology else None
    L = {(r.language_code, r.method): r.mean_bits for r in reports}
    analysis = analyze(L, profiles, methods, typology, config.alpha,
                       config.fdr_families, config.min_group_size)
    write_analysis(out, analysis)
    if plots:
        from .plots import emit_plots
        emit_plots(out, L, profiles, methods)
    return RunResult(out, cells, reports, profiles, analysis)
