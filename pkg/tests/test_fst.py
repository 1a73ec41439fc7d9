from collections import Counter

from hypothesis import given, strategies as st
import pytest

from subseglab.corpus import VerseRecord
from subseglab.fst import (BOUND, Fst, FstError, SegmenterPolicy, SymbolTable, apply,
                           build_segmenter_fst, candidate_segmentations, fst_backoff_segment,
                           load_fst, load_toy_fst, segment_word)
from subseglab.morfessor import CharModel, MorphLexicon
from subseglab.segmentation import MergeTable, Method, bpe_apply, desegment

from oracles import fst_paths


def write_fst(tmp_path, arcs, isyms, osyms):
    (tmp_path / "arcs.att").write_text("".join(line + "\n" for line in arcs), encoding="utf-8")
    for name, syms in (("isyms.txt", isyms), ("osyms.txt", osyms)):
        (tmp_path / name).write_text("".join(f"{s}\t{i}\n" for i, s in enumerate(syms)),
                                     encoding="utf-8")
    return tmp_path / "arcs.att", tmp_path / "isyms.txt", tmp_path / "osyms.txt"


def test_two_state_identity(tmp_path):
    fst = load_fst(*write_fst(tmp_path, ["0\t1\ta\ta", "1"], ["<eps>", "a"], ["<eps>", "a"]))
    assert apply(fst, "a") == ["a"]
    assert apply(fst, "aa") == []


def test_undefined_target_state(tmp_path):
    paths = write_fst(tmp_path, ["0\t7\ta\ta", "1"], ["<eps>", "a"], ["<eps>", "a"])
    with pytest.raises(FstError, match=r"arcs.att:1: arc target 7"):
        load_fst(*paths)


def test_unknown_symbol_reports_line(tmp_path):
    paths = write_fst(tmp_path, ["0\t1\ta\ta", "1\t2\tb\ta", "2"], ["<eps>", "a"], ["<eps>", "a"])
    with pytest.raises(FstError, match=r"arcs.att:2: unknown input symbol 'b'"):
        load_fst(*paths)


def test_multichar_input_symbol_rejected(tmp_path):
    paths = write_fst(tmp_path, ["0\t1\tab\ta", "1"], ["<eps>", "ab"], ["<eps>", "a"])
    with pytest.raises(FstError, match="single character"):
        load_fst(*paths)


def test_weights_are_ignored(tmp_path):
    paths = write_fst(tmp_path, ["0\t1\ta\ta\t0.5", "1\t0.1"], ["<eps>", "a"], ["<eps>", "a"])
    assert apply(load_fst(*paths), "a") == ["a"]


def test_epsilon_output_chain_shortens(tmp_path):
    # abc -> a, dropping b and c via epsilon outputs
    paths = write_fst(tmp_path, ["0\t1\ta\ta", "1\t2\tb\t<eps>", "2\t3\tc\t<eps>", "3"],
                      ["<eps>", "a", "b", "c"], ["<eps>", "a"])
    assert apply(load_fst(*paths), "abc") == ["a"]


def test_unreachable_final_is_flagged(tmp_path, caplog):
    paths = write_fst(tmp_path, ["0\t1\ta\ta", "1\t1\ta\ta", "2"], ["<eps>", "a"], ["<eps>", "a"])
    fst = load_fst(*paths)
    assert fst.accepts_nothing()
    assert "accepts nothing" in caplog.text


def test_identity_over_two_letters():
    fst = build_segmenter_fst(["ab", "ba", "a", "b", "aa"])
    assert apply(fst, "ab") == ["ab"]


def test_ambiguous_paths_both_returned():
    fst = build_segmenter_fst(["ab<B>c", "a<B>bc"])
    assert sorted(apply(fst, "abc")) == ["a<B>bc", "ab<B>c"]


def test_out_of_alphabet_input_gives_nothing():
    assert apply(build_segmenter_fst(["ab"]), "az") == []


def test_epsilon_cycle_terminates():
    isyms = SymbolTable.from_symbols(["a"])
    osyms = SymbolTable.from_symbols(["a", "x"])
    a, x = isyms.ids["a"], osyms.ids["x"]
    fst = Fst(isyms, osyms, 0, {0: [(a, osyms.ids["a"], 1)], 1: [(0, x, 1)]}, {1})
    assert apply(fst, "a") == ["a"]


def test_max_outputs_caps_enumeration():
    fst = build_segmenter_fst(["a<B>b<B>c", "ab<B>c", "a<B>bc", "abc"])
    assert len(apply(fst, "abc", max_outputs=2)) == 2
    assert apply(fst, "abc", max_outputs=2) == apply(fst, "abc")[:2]


def test_fewest_segments_kilicla():
    fst = load_toy_fst("tur")
    policy = SegmenterPolicy()
    assert set(candidate_segmentations(fst, policy, "kılıçla")) == {("kılıç", "la"), ("kı", "lıç", "la")}
    assert segment_word(fst, policy, "kılıçla") == ["kılıç", "la"]


def test_exclude_identity_walks():
    fst = load_toy_fst("eng")
    assert segment_word(fst, SegmenterPolicy(exclude_identity=True), "walks") == ["walk", "s"]
    assert segment_word(fst, SegmenterPolicy(), "walks") == ["walks"]


def test_identity_kept_when_only_candidate():
    fst = load_toy_fst("eng")
    assert segment_word(fst, SegmenterPolicy(exclude_identity=True), "the") == ["the"]


def test_no_analysis_for_yuhannanin():
    assert segment_word(load_toy_fst("tur"), SegmenterPolicy(), "Yuhannanın") is None


def test_non_surface_candidates_discarded():
    # output "b" for input "a" is an analysis but not a surface segmentation
    isyms = SymbolTable.from_symbols(["a"])
    osyms = SymbolTable.from_symbols(["b"])
    odd = Fst(isyms, osyms, 0, {0: [(1, 1, 1)]}, {1})
    assert segment_word(odd, SegmenterPolicy(), "a") is None


def test_ties_broken_lexicographically():
    fst = build_segmenter_fst(["ab<B>c", "a<B>bc"])
    assert segment_word(fst, SegmenterPolicy(), "abc") == ["a", "bc"]


def test_policy_validation():
    with pytest.raises(ValueError):
        SegmenterPolicy(max_outputs=0)


def test_toy_fst_save_load_round_trip(tmp_path):
    fst = load_toy_fst("eng")
    fst.save(tmp_path / "a.att", tmp_path / "i.txt", tmp_path / "o.txt")
    again = load_fst(tmp_path / "a.att", tmp_path / "i.txt", tmp_path / "o.txt")
    for w in ("walks", "walked", "the", "callers"):
        assert apply(again, w) == apply(fst, w)


TURKISH_VERSE = VerseRecord("ACT.12.2", ("Yuhannanın", "kardeşi", "Yakubu", "kılıçla", "öldürdü", "."))
TURKISH_MERGES = MergeTable([("Y", "u"), ("Yu", "h"), ("Yuh", "a"), ("Yuha", "n"), ("n", "a"),
                   ("na", "n"), ("ı", "n</w>"), ("nan", "ın</w>")])


def turkish_lexicon():
    morphs = {"Yuhanna": 5, "nın": 5, "kardeş": 5, "i": 9, "Yakub": 5, "u": 9}
    return MorphLexicon(Counter(morphs), CharModel.from_words(Counter(morphs)))


def test_turkish_verse_rows():
    fst = load_toy_fst("tur")
    policy = SegmenterPolicy()
    fb = fst_backoff_segment(fst, policy, TURKISH_MERGES, TURKISH_VERSE)
    fm = fst_backoff_segment(fst, policy, turkish_lexicon(), TURKISH_VERSE)
    assert fb.method is Method.FST_BPE and fm.method is Method.FST_MORFESSOR
    assert " ".join(fb.units) == "Yuhan@@ nanın kardeş@@ i Yakub@@ u kılıç@@ la öl@@ dür@@ dü ."
    assert " ".join(fm.units) == "Yuhanna@@ nın kardeş@@ i Yakub@@ u kılıç@@ la öl@@ dür@@ dü ."


def test_full_coverage_makes_backoff_irrelevant():
    fst = load_toy_fst("tur")
    verse = VerseRecord("v", ("kardeşi", "kılıçla", "."))
    a = fst_backoff_segment(fst, SegmenterPolicy(), TURKISH_MERGES, verse)
    b = fst_backoff_segment(fst, SegmenterPolicy(), turkish_lexicon(), verse)
    assert a.units == b.units


def test_unsupported_fallback():
    with pytest.raises(TypeError):
        fst_backoff_segment(load_toy_fst("tur"), SegmenterPolicy(), object(), TURKISH_VERSE)


def test_fst_bpe_differs_from_bpe_only_on_analysed_tokens():
    fst = load_toy_fst("eng")
    policy = SegmenterPolicy(exclude_identity=True)
    table = MergeTable([("w", "a"), ("wa", "l"), ("t", "h"), ("th", "e</w>")])
    words = ("the", "walked", "zebra", "walks", "xyz")
    for w in words:
        verse = VerseRecord("v", (w,))
        fb = fst_backoff_segment(fst, policy, table, verse).units
        plain = bpe_apply(table, verse).units
        if segment_word(fst, policy, w) is None:
            assert fb == plain
        assert desegment(fst_backoff_segment(fst, policy, table, verse)) == [w]


@st.composite
def acyclic_fst(draw):
    n_states = draw(st.integers(min_value=2, max_value=8))
    isyms = SymbolTable.from_symbols(["a", "b"])
    osyms = SymbolTable.from_symbols(["a", "b", "x"])
    arcs = {}
    for src in range(n_states - 1):
        for _ in range(draw(st.integers(min_value=0, max_value=3))):
            dst = draw(st.integers(min_value=src + 1, max_value=n_states - 1))
            il = draw(st.integers(min_value=0, max_value=2))
            ol = draw(st.integers(min_value=0, max_value=3))
            arcs.setdefault(src, []).append((il, ol, dst))
    finals = set(draw(st.lists(st.integers(min_value=0, max_value=n_states - 1), min_size=1)))
    return Fst(isyms, osyms, 0, arcs, finals)


@given(acyclic_fst(), st.text(alphabet="ab", max_size=5))
def test_apply_matches_path_enumeration(fst, surface):
    assert set(apply(fst, surface, max_outputs=10_000)) == fst_paths(fst, surface)


@given(st.lists(st.lists(st.text(alphabet="abç", min_size=1, max_size=3), min_size=1, max_size=3),
                min_size=1, max_size=6))
def test_segmenter_returns_fewest_surface_segments(analyses):
    fst = build_segmenter_fst([BOUND.join(a) for a in analyses])
    policy = SegmenterPolicy(max_outputs=1000)
    for a in analyses:
        word = "".join(a)
        best = segment_word(fst, policy, word)
        assert "".join(best) == word
        cands = candidate_segmentations(fst, policy, word)
        assert all(len(best) <= len(c) for c in cands)
