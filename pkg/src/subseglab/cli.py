"""Command-line entry point: ``subseglab <subcommand>``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .corpus import DataSplit, load_corpus, split_corpus, unk_singleton_chars, write_verses
from .fst import SegmenterPolicy, fst_backoff_segment, load_fst
from .lm import LanguageModel, read_summary, surprisal_per_verse, train_lm, write_verse_report
from .metrics import MATTR_WINDOW, complexity_profile, read_profiles, write_profiles
from .morfessor import MorfessorConfig, MorphLexicon, morfessor_segment_verse, morfessor_train
from .pipeline import (FST_FILES, ConfigError, RunConfig, analyze, run_pipeline,
                       write_analysis)
from .segmentation import (MERGE_FRACTION, MergeTable, Method, bpe_apply, bpe_train,
                           char_segment, merge_count_for, read_segmented, write_segmented)
from .wals import load_typology

_logger = logging.getLogger("subseglab")

PARTS = ("train", "dev", "test")


def _read_parts(directory: Path, lang: str) -> DataSplit:
    parts = {p: load_corpus(directory / f"{p}.tsv", lang, preprocessed=True).verses for p in PARTS}
    return DataSplit(parts["train"], parts["dev"], parts["test"], lang)


def _write_parts(directory: Path, split: DataSplit) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for name, verses in split.parts().items():
        write_verses(directory / f"{name}.tsv", verses)


def _lang_pairs(items: list[str]) -> dict[str, Path]:
    out = {}
    for item in items:
        lang, sep, path = item.partition("=")
        if not sep or not lang or not path:
            raise ValueError(f"expected LANG=PATH, got {item!r}")
        out[lang] = Path(path)
    return out


def cmd_split(args) -> int:
    split = split_corpus(load_corpus(args.corpus, args.lang))
    _write_parts(Path(args.out), split)
    print(f"{args.lang}: train={len(split.train)} dev={len(split.dev)} test={len(split.test)}")
    return 0


def cmd_preprocess(args) -> int:
    split = unk_singleton_chars(_read_parts(Path(args.split_dir), args.lang))
    _write_parts(Path(args.out), split)
    return 0


def cmd_complexity(args) -> int:
    profiles = {}
    for lang, path in sorted(_lang_pairs(args.train).items()):
        profiles[lang] = complexity_profile(load_corpus(path, lang, preprocessed=True).verses,
                                            args.window)
    write_profiles(args.out, profiles)
    return 0


def cmd_train_seg(args) -> int:
    train = load_corpus(args.train, "", preprocessed=True).verses
    if args.method == "bpe":
        types = complexity_profile(train).types
        table = bpe_train(train, merge_count_for(types, args.merge_fraction))
        table.save(args.out)
        print(f"{len(table.merges)} merges")
    else:
        lex = morfessor_train(train, MorfessorConfig(seed=args.seed, restarts=args.restarts))
        lex.save(args.out)
        print(f"{len(lex.morphs)} morphs")
    return 0


def _load_model(path: str):
    """A merge table or a Morfessor lexicon, told apart by file layout."""
    with open(path, encoding="utf-8") as fh:
        first = next((ln for ln in fh if ln.strip() and not ln.startswith("#")), "")
    return MorphLexicon.load(path) if "\t" in first else MergeTable.load(path)


def cmd_segment(args) -> int:
    method = Method(args.method)
    verses = load_corpus(args.input, "", preprocessed=True).verses
    if method is Method.CHAR:
        seg = char_segment
    elif method is Method.BPE:
        table = MergeTable.load(args.model)
        seg = lambda v: bpe_apply(table, v)  # noqa: E731
    elif method is Method.MORFESSOR:
        lex = MorphLexicon.load(args.model)
        seg = lambda v: morfessor_segment_verse(lex, v)  # noqa: E731
    else:
        if not args.fst:
            raise ValueError(f"{method.value} needs --fst")
        fst = load_fst(*(Path(args.fst) / f for f in FST_FILES))
        fallback = _load_model(args.model)
        policy = SegmenterPolicy(exclude_identity=args.exclude_identity)
        seg = lambda v: fst_backoff_segment(fst, policy, fallback, v)  # noqa: E731
    segmented = [seg(v) for v in verses]
    if method.uses_fst and segmented and segmented[0].method is not method:
        raise ValueError(f"--model does not match method {method.value}")
    write_segmented(args.out, segmented)
    return 0


def cmd_train_lm(args) -> int:
    lm = train_lm(read_segmented(args.train, Method(args.method)), args.order, args.discount)
    lm.save(args.out)
    return 0


def cmd_eval(args) -> int:
    lm = LanguageModel.load(args.lm)
    report = surprisal_per_verse(lm, read_segmented(args.test, Method(args.method)),
                                 args.lang, args.method)
    write_verse_report(args.out, [report])
    print(f"{args.lang}\t{args.method}\tL={report.mean_bits:.4f} bits over {report.n_verses} verses")
    return 0


def cmd_analyze(args) -> int:
    L = read_summary(args.summary)
    profiles = read_profiles(args.profiles)
    methods = args.methods.split(",") if args.methods else sorted({m for _, m in L})
    typology = load_typology(args.typology) if args.typology else None
    Path(args.out).mkdir(parents=True, exist_ok=True)
    write_analysis(args.out, analyze(L, profiles, methods, typology, args.alpha,
                                     min_group_size=args.min_group_size))
    return 0


def cmd_plot(args) -> int:
    from .plots import emit_plots
    L = read_summary(args.summary)
    methods = args.methods.split(",") if args.methods else sorted({m for _, m in L})
    for path in emit_plots(args.out, L, read_profiles(args.profiles), methods):
        print(path)
    return 0


def cmd_run(args) -> int:
    config = RunConfig.from_ini(args.config, output_dir=args.output_dir)
    result = run_pipeline(config, plots=not args.no_plots)
    for cell in result.cells:
        if cell.status != "OK":
            print(f"{cell.language_code}\t{cell.method}\t{cell.status}\t{cell.message}",
                  file=sys.stderr)
    print(f"wrote {result.output_dir}")
    return 0 if result.ok else 1


def cmd_synth(args) -> int:
    from .synthetic import write_synthetic_suite
    paths = write_synthetic_suite(args.out, args.languages, args.verses)
    print(f"wrote {len(paths)} corpora and typology.tsv to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subseglab", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    methods = [m.value for m in Method]

    s = sub.add_parser("split", help="split a corpus TSV into train/dev/test")
    s.add_argument("corpus")
    s.add_argument("--lang", required=True)
    s.add_argument("--out", required=True, help="directory for train/dev/test.tsv")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("preprocess", help="replace rare train characters with UNK")
    s.add_argument("split_dir")
    s.add_argument("--lang", default="")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("complexity", help="Types/TTR/MATTR/MLW of training sets")
    s.add_argument("train", nargs="+", metavar="LANG=TRAIN_TSV")
    s.add_argument("--window", type=int, default=MATTR_WINDOW)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_complexity)

    s = sub.add_parser("train-seg", help="train a BPE or Morfessor segmenter")
    s.add_argument("train")
    s.add_argument("--method", choices=["bpe", "morfessor"], required=True)
    s.add_argument("--merge-fraction", type=float, default=MERGE_FRACTION)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--restarts", type=int, default=8)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train_seg)

    s = sub.add_parser("segment", help="segment verses with a trained model")
    s.add_argument("input")
    s.add_argument("--method", choices=methods, required=True)
    s.add_argument("--model", help="merge table or lexicon (FST methods: the back-off model)")
    s.add_argument("--fst", help="directory with arcs.att, isyms.txt, osyms.txt")
    s.add_argument("--exclude-identity", action="store_true")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_segment)

    s = sub.add_parser("train-lm", help="train the segment n-gram model")
    s.add_argument("train")
    s.add_argument("--method", choices=methods, required=True)
    s.add_argument("--order", type=int, default=5)
    s.add_argument("--discount", type=float, default=0.75)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train_lm)

    s = sub.add_parser("eval", help="per-verse surprisal of a segmented test set")
    s.add_argument("test")
    s.add_argument("--lm", required=True)
    s.add_argument("--method", choices=methods, required=True)
    s.add_argument("--lang", default="")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_eval)

    for name, func, help_ in (("analyze", cmd_analyze, "cross-language statistics"),
                              ("plot", cmd_plot, "SVG scatter plots")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--summary", required=True)
        s.add_argument("--profiles", required=True)
        s.add_argument("--methods", help="comma-separated order of methods")
        s.add_argument("--out", required=True)
        if name == "analyze":
            s.add_argument("--typology")
            s.add_argument("--alpha", type=float, default=0.05)
            s.add_argument("--min-group-size", type=int, default=5)
        s.set_defaults(func=func)

    s = sub.add_parser("run", help="full pipeline from an INI config")
    s.add_argument("config")
    s.add_argument("--output-dir", help="overrides the config and $SUBSEGLAB_OUTPUT_DIR")
    s.add_argument("--no-plots", action="store_true")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("synth", help="write toy corpora and a typology table")
    s.add_argument("--out", required=True)
    s.add_argument("--languages", type=int, default=12)
    s.add_argument("--verses", type=int, default=1200)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, ConfigError) as exc:
        print(f"subseglab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
