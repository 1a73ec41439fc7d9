import math
import random
from collections import Counter

from hypothesis import given, strategies as st
import pytest

from subseglab.corpus import VerseRecord
from subseglab.morfessor import (CharModel, MorfessorConfig, MorphLexicon, corpus_cost,
                                 lexicon_cost, morfessor_segment, morfessor_segment_verse,
                                 morfessor_train, total_cost)
from subseglab.segmentation import desegment

from oracles import morfessor_cost

WALK = ("walk", "walks", "walked", "walking")


def repeated(words, reps):
    toks = [w for w in words for _ in range(reps)]
    return [VerseRecord(f"V{i}", tuple(toks[i:i + 10])) for i in range(0, len(toks), 10)]


def lexicon(morphs, chars=None):
    morphs = Counter(morphs)
    return MorphLexicon(morphs, chars or CharModel.from_words(morphs))


@pytest.fixture(scope="module")
def walk_lex():
    return morfessor_train(repeated(WALK, 50))


def test_walks_split_at_suffix(walk_lex):
    assert morfessor_segment(walk_lex, "walks") == ["walk", "s"]
    assert morfessor_segment(walk_lex, "walking") == ["walk", "ing"]


def test_hand_costs_favour_the_stem_suffix_analysis():
    # type counting: each word type contributes once, whatever its frequency
    chars = CharModel.from_words(Counter({w: 50 for w in WALK}))
    counts = Counter({w: 1 for w in WALK})
    whole = {w: (w,) for w in WALK}
    split = {"walk": ("walk",), "walks": ("walk", "s"), "walked": ("walk", "ed"),
             "walking": ("walk", "ing")}
    assert morfessor_cost(split, counts, chars.char_bits, chars.end_bits) < \
        morfessor_cost(whole, counts, chars.char_bits, chars.end_bits)


def test_token_counts_at_fifty_repetitions_keep_words_whole():
    # with every occurrence counted the corpus term outweighs the lexicon saving
    counts = Counter({w: 50 for w in WALK})
    chars = CharModel.from_words(counts)
    whole = {w: (w,) for w in WALK}
    split = {"walk": ("walk",), "walks": ("walk", "s"), "walked": ("walk", "ed"),
             "walking": ("walk", "ing")}
    assert morfessor_cost(split, counts, chars.char_bits, chars.end_bits) > \
        morfessor_cost(whole, counts, chars.char_bits, chars.end_bits)


def test_single_word_kept_whole():
    lex = morfessor_train([VerseRecord("V", ("kardeşi",))])
    assert lex.constructions == {"kardeşi": ("kardeşi",)}


@pytest.mark.parametrize("mode", ["types", "tokens"])
def test_cost_history_non_increasing(mode):
    rng = random.Random(4)
    stems, sufs = ["ev", "kitap", "göz", "el"], ["", "ler", "de", "im"]
    toks = [rng.choice(stems) + rng.choice(sufs) for _ in range(300)]
    lex = morfessor_train([VerseRecord(f"V{i}", tuple(toks[i:i + 6])) for i in range(0, 300, 6)],
                          MorfessorConfig(count_mode=mode, restarts=2))
    h = lex.cost_history
    assert all(b <= a + 1e-9 for a, b in zip(h, h[1:]))
    assert h[-1] <= h[0]


def test_final_cost_matches_recomputation(walk_lex):
    oracle = morfessor_cost(walk_lex.constructions, walk_lex.word_counts,
                            walk_lex.chars.char_bits, walk_lex.chars.end_bits)
    assert walk_lex.cost_history[-1] == pytest.approx(oracle, rel=1e-9)
    assert total_cost(walk_lex) == pytest.approx(oracle, rel=1e-9)


def test_coverage(walk_lex):
    for w, parts in walk_lex.constructions.items():
        assert "".join(parts) == w


def test_training_is_deterministic():
    data = repeated(WALK + ("talks", "talked", "jumping"), 3)
    a = morfessor_train(data, MorfessorConfig(seed=7))
    b = morfessor_train(data, MorfessorConfig(seed=7))
    assert a.morphs == b.morphs and a.cost_history == b.cost_history


def test_uniform_alphabet_costs_k_bits_per_char():
    chars = CharModel({c: 2.0 for c in "abcd"}, end_bits=1.0)
    lex = lexicon({"ab": 1, "cdd": 1}, chars)
    assert lexicon_cost(lex) == (2 * 2 + 1) + (3 * 2 + 1)


def test_char_model_from_uniform_counts():
    chars = CharModel.from_words(Counter({"abcdefgh": 3}))
    assert all(b == pytest.approx(3.0) for b in chars.char_bits.values())


def test_single_morph_has_zero_corpus_cost():
    assert corpus_cost(lexicon({"ev": 9})) == 0.0


def test_doubling_counts_keeps_per_token_cost():
    a = lexicon({"ev": 3, "ler": 5})
    b = lexicon({"ev": 6, "ler": 10})
    assert corpus_cost(b) / b.total_count == pytest.approx(corpus_cost(a) / a.total_count)


def test_whole_form_with_high_count_is_one_segment():
    lex = lexicon({"walks": 100, "walk": 2, "s": 2})
    assert morfessor_segment(lex, "walks") == ["walks"]


def test_unseen_concatenation_of_known_morphs_splits():
    lex = lexicon({"kılıç": 20, "la": 20, "ev": 20})
    # log2(60/20) * 2 = 3.17 bits versus 7 chars of OOV at log2(alphabet+1) bits each
    assert morfessor_segment(lex, "kılıçla") == ["kılıç", "la"]


def test_equal_cost_prefers_fewer_segments():
    lex = lexicon({"ab": 1, "a": 2, "b": 2})
    # ab: log2(5) = 2.32; a+b: 2*log2(2.5) = 2.64 -> single segment either way
    assert morfessor_segment(lex, "ab") == ["ab"]


def test_oov_word_is_still_segmented():
    lex = lexicon({"ev": 4})
    pieces = morfessor_segment(lex, "xyzev")
    assert "".join(pieces) == "xyzev"


def test_empty_word_is_an_error():
    with pytest.raises(ValueError):
        morfessor_segment(lexicon({"a": 1}), "")


def test_turkish_morfessor_format():
    lex = lexicon({"Yuhanna": 5, "nın": 5, "kardeş": 5, "i": 9, "Yakub": 5, "u": 9,
                   "kılıç": 5, "la": 9, "öldürdü": 5, ".": 9})
    sv = morfessor_segment_verse(lex, VerseRecord("v", ("Yuhannanın", "kardeşi", "Yakubu",
                                                        "kılıçla", "öldürdü", ".")))
    assert " ".join(sv.units) == "Yuhanna@@ nın kardeş@@ i Yakub@@ u kılıç@@ la öldürdü ."


def test_lexicon_file_round_trip(tmp_path, walk_lex):
    walk_lex.save(tmp_path / "lex.tsv")
    lines = (tmp_path / "lex.tsv").read_text(encoding="utf-8").splitlines()
    assert lines == sorted(lines)
    loaded = MorphLexicon.load(tmp_path / "lex.tsv")
    assert loaded.morphs == walk_lex.morphs
    for w in WALK:
        assert morfessor_segment(loaded, w) == morfessor_segment(walk_lex, w)


def test_bad_lexicon_line(tmp_path):
    (tmp_path / "lex.tsv").write_text("ev\tmany\n", encoding="utf-8")
    with pytest.raises(ValueError, match=":1:"):
        MorphLexicon.load(tmp_path / "lex.tsv")


def test_config_validation():
    with pytest.raises(ValueError):
        MorfessorConfig(count_mode="dampened")
    with pytest.raises(ValueError):
        MorfessorConfig(restarts=0)


@given(st.lists(st.text(alphabet="abcı", min_size=1, max_size=7), min_size=1, max_size=15))
def test_round_trip_on_arbitrary_words(words):
    lex = morfessor_train([VerseRecord("V", tuple(words))], MorfessorConfig(restarts=1))
    sv = morfessor_segment_verse(lex, VerseRecord("T", tuple(words) + ("zzz",)))
    assert desegment(sv) == list(words) + ["zzz"]
    assert math.isfinite(total_cost(lex))
