import math
import random

from hypothesis import assume, given, strategies as st
import pytest

from subseglab.stats import (OK, SKIPPED, GroupedSample, benjamini_hochberg, bh_adjust, delta,
                             dunn_posthoc, effect_label, eta_squared, filter_small_groups,
                             kruskal_wallis, rankdata, spearman)

from oracles import kw_permutation_p, spearman_permutation_p


def gs(*groups):
    return GroupedSample("f", {f"g{i}": list(g) for i, g in enumerate(groups)})


def test_filter_small_groups():
    sample = GroupedSample("f", {"a": [1] * 7, "b": [2] * 4, "c": [3] * 9})
    assert filter_small_groups(sample).sizes == {"a": 7, "c": 9}
    assert filter_small_groups(gs([1] * 5, [2] * 6)).sizes == {"g0": 5, "g1": 6}
    assert filter_small_groups(gs([1] * 3, [2] * 4)).groups == {}
    assert kruskal_wallis(filter_small_groups(gs([1] * 3, [2] * 4))).status == SKIPPED


def test_rankdata_midranks():
    assert rankdata([10, 20, 20, 5]) == [2, 3.5, 3.5, 1]


def test_identical_groups_give_zero():
    res = kruskal_wallis(gs([1, 2, 3], [1, 2, 3]))
    assert res.statistic == pytest.approx(0.0, abs=1e-12)
    assert res.p_value == pytest.approx(1.0)


def test_separated_groups_hand_value():
    res = kruskal_wallis(gs([1, 2, 3], [10, 11, 12]), method="asymptotic")
    assert res.statistic == pytest.approx(12 / 42 * (36 / 3 + 225 / 3) - 21)
    assert res.statistic == pytest.approx(3.857, abs=5e-4)
    assert res.p_value == pytest.approx(0.0495, abs=5e-5)


def test_separated_groups_exact_p():
    # 2 of the 20 equally likely splits are as extreme: p = 0.1
    res = kruskal_wallis(gs([1, 2, 3], [10, 11, 12]))
    assert res.note == "exact"
    assert res.p_value == pytest.approx(0.1)
    assert res.p_value == pytest.approx(kw_permutation_p([[1, 2, 3], [10, 11, 12]]))


@pytest.mark.parametrize("groups, why", [
    (([1, 2, 3],), "one group"),
    (([1], [2, 3, 4, 5]), "group of one"),
    (([1, 2], [3, 4]), "n below five"),
    (([7, 7, 7], [7, 7]), "all tied"),
])
def test_kruskal_wallis_skips(groups, why):
    res = kruskal_wallis(gs(*groups))
    assert res.status == SKIPPED and res.p_value is None, why


def test_unknown_method_rejected():
    with pytest.raises(ValueError):
        kruskal_wallis(gs([1, 2], [3, 4, 5]), method="bootstrap")
    with pytest.raises(ValueError):
        spearman([1, 2, 3, 4], [1, 2, 3, 4], method="magic")


def test_eta_squared():
    assert eta_squared(1.0, 2, 10) == 0.0
    assert eta_squared(3.857, 2, 6) == pytest.approx(0.71425, abs=1e-5)
    with pytest.raises(ValueError):
        eta_squared(1.0, 3, 3)


@pytest.mark.parametrize("value, label", [(0.28, "large"), (0.14, "large"), (0.1, "medium"),
                                          (0.02, "small"), (-0.05, "negligible")])
def test_effect_labels(value, label):
    assert effect_label(value) == label


def test_spearman_monotone():
    assert spearman([1, 2, 3, 4, 5], [2, 4, 6, 8, 10]).statistic == 1.0
    assert spearman([1, 2, 3, 4, 5], [5, 4, 3, 2, 1]).statistic == -1.0
    assert spearman(list(range(12)), list(range(12))).p_value == 0.0


def test_spearman_hand_example():
    x, y = [1, 2, 3, 4, 5], [2, 1, 4, 3, 5]
    asym = spearman(x, y, method="asymptotic")
    assert asym.statistic == pytest.approx(0.8)
    assert asym.p_value == pytest.approx(0.104, abs=5e-4)
    exact = spearman(x, y)
    assert exact.note == "exact"
    assert exact.p_value == pytest.approx(spearman_permutation_p(x, y))


def test_spearman_skips():
    assert spearman([1, 2, 3], [1, 2, 3]).status == SKIPPED
    assert spearman([1, 1, 1, 1], [1, 2, 3, 4]).status == SKIPPED
    with pytest.raises(ValueError):
        spearman([1, 2, 3, 4], [1, 2, 3])


def test_bh_fifteen_tests_eight_survivors():
    pvals = [0.001, 0.002, 0.003, 0.004, 0.005, 0.01, 0.02, 0.025] + [0.2 + 0.1 * i for i in range(7)]
    flags, cutoff = benjamini_hochberg(pvals, 0.05)
    assert sum(flags) == 8
    assert cutoff == pytest.approx(8 / 15 * 0.05, abs=1e-12)


def test_bh_examples():
    assert benjamini_hochberg([1.0, 1.0, 1.0]) == ([False] * 3, 0.0)
    flags, cutoff = benjamini_hochberg([0.001, 0.02, 0.9], 0.05)
    assert flags == [True, True, False]
    assert cutoff == pytest.approx(2 / 3 * 0.05)


def test_bh_validation():
    with pytest.raises(ValueError):
        benjamini_hochberg([])
    with pytest.raises(ValueError):
        benjamini_hochberg([0.5, 1.2])


def test_bh_adjust_agrees_with_flags():
    rng = random.Random(0)
    for _ in range(50):
        pvals = [rng.random() ** 3 for _ in range(rng.randint(1, 20))]
        flags, _ = benjamini_hochberg(pvals, 0.05)
        assert [a <= 0.05 for a in bh_adjust(pvals)] == flags


def test_delta_examples():
    assert delta(2.0, 2.0) == 0.0
    assert delta(3, 1) == 1.0
    assert delta(5.0, 4.0) > 0  # second method models the language better
    for bad in ((0, 1), (1, -2)):
        with pytest.raises(ValueError):
            delta(*bad)


def test_dunn_identical_groups():
    (res,) = dunn_posthoc(gs([1, 2, 3], [1, 2, 3]))
    assert res.statistic == 0.0 and res.p_value == 1.0


def test_dunn_two_groups_matches_kruskal_wallis():
    rng = random.Random(3)
    a = [rng.gauss(0, 1) for _ in range(30)]
    b = [rng.gauss(0.6, 1) for _ in range(25)]
    (d,) = dunn_posthoc(gs(a, b))
    kw = kruskal_wallis(gs(a, b), method="asymptotic")
    assert d.p_value == pytest.approx(kw.p_value, rel=0.05)


def test_dunn_flags_shifted_group_only():
    rng = random.Random(5)
    low1 = [rng.random() for _ in range(8)]
    low2 = [rng.random() for _ in range(8)]
    high = [100 + rng.random() for _ in range(8)]
    res = {r.label: r.p_value for r in dunn_posthoc(gs(low1, low2, high))}
    assert res["g0 vs g2"] < 0.05 and res["g1 vs g2"] < 0.05
    assert res["g0 vs g1"] > 0.05


values = st.lists(st.integers(min_value=-20, max_value=20), min_size=2, max_size=6)


@given(values, values, values)
def test_kw_invariant_under_monotone_transform(a, b, c):
    res = kruskal_wallis(gs(a, b, c))
    res2 = kruskal_wallis(gs(*[[math.exp(v / 7) * 3 + 1 for v in g] for g in (a, b, c)]))
    assert res.status == res2.status
    if res.status == OK:
        assert res2.statistic == pytest.approx(res.statistic)
        assert res2.p_value == pytest.approx(res.p_value)
        assert 0 <= res.p_value <= 1


@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=4, max_size=14, unique_by=lambda t: t[1]))
def test_spearman_range_and_antisymmetry(pairs):
    x = [p[0] for p in pairs]
    y = [p[1] for p in pairs]
    r = spearman(x, y)
    assume(r.status == OK)
    assert -1 <= r.statistic <= 1
    assert spearman(x, [-v for v in y]).statistic == pytest.approx(-r.statistic)
    assert 0 <= r.p_value <= 1


@given(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.1, 10))
def test_delta_properties(a, b, c):
    assert delta(a, b) == pytest.approx(-delta(b, a))
    assert -2 < delta(a, b) < 2
    assert delta(c * a, c * b) == pytest.approx(delta(a, b), abs=1e-12)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=20), st.floats(0.001, 0.2), st.floats(0.001, 0.2))
def test_bh_monotone_in_alpha(pvals, a1, a2):
    lo, hi = sorted((a1, a2))
    assert sum(benjamini_hochberg(pvals, lo)[0]) <= sum(benjamini_hochberg(pvals, hi)[0])


@given(st.lists(st.integers(0, 6), min_size=2, max_size=5), st.lists(st.integers(0, 6), min_size=2, max_size=5))
def test_kw_exact_matches_permutation_oracle(a, b):
    res = kruskal_wallis(gs(a, b), method="exact")
    assume(res.status == OK)
    assert res.p_value == pytest.approx(kw_permutation_p([a, b]), rel=1e-9)


@given(st.lists(st.integers(0, 5), min_size=4, max_size=6), st.randoms(use_true_random=False))
def test_spearman_exact_matches_permutation_oracle(x, rnd):
    y = list(x)
    rnd.shuffle(y)
    y = [v + rnd.randint(0, 2) for v in y]
    res = spearman(x, y, method="exact")
    assume(res.status == OK)
    assert res.p_value == pytest.approx(spearman_permutation_p(x, y), rel=1e-9)
