"""Rank tests, effect sizes, FDR control and the surprisal difference."""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .specfun import chi2_sf, norm_sf_two_sided, t_sf_two_sided

OK = "OK"
SKIPPED = "SKIPPED"

# Exact permutation p-values are used up to these sizes when method="auto":
# total n per group count (the DP state space grows quickly with k).
EXACT_KW_MAX_N = {2: 40, 3: 15}
EXACT_SPEARMAN_MAX_N = 9


@dataclass
class StatResult:
    test: str
    statistic: float | None = None
    p_value: float | None = None
    effect_size: float | None = None
    n: int = 0
    group_sizes: dict[str, int] = field(default_factory=dict)
    status: str = OK
    note: str = ""
    label: str = ""

    @property
    def skipped(self) -> bool:
        return self.status == SKIPPED


@dataclass
class GroupedSample:
    feature_id: str
    groups: dict[str, list[float]]

    @property
    def sizes(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.groups.items()}

    @property
    def n(self) -> int:
        return sum(len(v) for v in self.groups.values())


def filter_small_groups(gs: GroupedSample, min_size: int = 5) -> GroupedSample:
    return GroupedSample(gs.feature_id,
                         {k: list(v) for k, v in gs.groups.items() if len(v) >= min_size})


def rankdata(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties sharing their mean rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def _tie_term(values: Sequence[float]) -> int:
    return sum(t ** 3 - t for t in Counter(values).values())


# -- Kruskal-Wallis ----------------------------------------------------------

def _kw_exact_p(doubled_ranks: list[int], sizes: list[int], observed: float) -> float:
    """P(sum_g S_g^2 / n_g >= observed) over all assignments to groups.

    Counts assignments with a dynamic programme over (counts, rank sums) of
    all groups but the last, whose sum is implied by the total.
    """
    k = len(sizes)
    states: dict[tuple, int] = {(0,) * (2 * (k - 1)): 1}
    for idx, r in enumerate(doubled_ranks):
        nxt: dict[tuple, int] = defaultdict(int)
        for st, ways in states.items():
            counts, sums = st[:k - 1], st[k - 1:]
            if idx - sum(counts) < sizes[-1]:
                nxt[st] += ways
            for g in range(k - 1):
                if counts[g] < sizes[g]:
                    c = list(counts)
                    s = list(sums)
                    c[g] += 1
                    s[g] += r
                    nxt[tuple(c) + tuple(s)] += ways
        states = nxt
    total_sum = sum(doubled_ranks)
    total = hits = 0
    for st, ways in states.items():
        sums = list(st[k - 1:])
        sums.append(total_sum - sum(sums))
        stat = sum(s * s / m for s, m in zip(sums, sizes))
        total += ways
        if stat >= observed - 1e-9 * max(1.0, abs(observed)):
            hits += ways
    return hits / total


def kruskal_wallis(gs: GroupedSample, method: str = "auto") -> StatResult:
    """Kruskal-Wallis H with mid-ranks and the tie correction.

    ``method`` picks the p-value: ``"asymptotic"`` uses the chi-square tail
    with k-1 degrees of freedom, ``"exact"`` the permutation distribution,
    and ``"auto"`` is exact for small samples (see ``EXACT_KW_MAX_N``) and
    asymptotic otherwise.
    """
    if method not in ("auto", "exact", "asymptotic"):
        raise ValueError(f"unknown method {method!r}")
    sizes = gs.sizes
    res = StatResult("kruskal_wallis", n=gs.n, group_sizes=sizes)
    if len(sizes) < 2 or min(sizes.values()) < 2 or gs.n < 5:
        res.status, res.note = SKIPPED, "needs >= 2 groups of >= 2 values and n >= 5"
        return res
    keys = list(gs.groups)
    values = [v for k in keys for v in gs.groups[k]]
    n = len(values)
    correction = 1.0 - _tie_term(values) / (n ** 3 - n)
    if correction <= 0:
        res.status, res.note = SKIPPED, "all values tied"
        return res
    ranks = rankdata(values)
    rank_sums, pos = [], 0
    for k in keys:
        m = len(gs.groups[k])
        rank_sums.append(math.fsum(ranks[pos:pos + m]))
        pos += m
    ssum = math.fsum(r * r / len(gs.groups[k]) for r, k in zip(rank_sums, keys))
    h = (12.0 / (n * (n + 1)) * ssum - 3.0 * (n + 1)) / correction
    h = max(h, 0.0)
    res.statistic = h
    use_exact = method == "exact" or (
        method == "auto" and n <= EXACT_KW_MAX_N.get(len(keys), 0))
    if use_exact:
        doubled = [int(round(2 * r)) for r in ranks]
        observed = math.fsum((2 * r) ** 2 / len(gs.groups[k]) for r, k in zip(rank_sums, keys))
        res.p_value = _kw_exact_p(doubled, [len(gs.groups[k]) for k in keys], observed)
        res.note = "exact"
    else:
        res.p_value = chi2_sf(h, len(keys) - 1)
        res.note = "asymptotic"
    res.effect_size = eta_squared(h, len(keys), n)
    res.label = effect_label(res.effect_size)
    return res


def eta_squared(h: float, k: int, n: int) -> float:
    """Effect size (H - k + 1) / (n - k); can be slightly negative for tiny H."""
    if n <= k:
        raise ValueError("eta squared needs n > k")
    return (h - k + 1) / (n - k)


def effect_label(eta2: float) -> str:
    if eta2 >= 0.14:
        return "large"
    if eta2 >= 0.06:
        return "medium"
    if eta2 >= 0.01:
        return "small"
    return "negligible"


# -- Spearman ----------------------------------------------------------------

def _pearson(a: Sequence[float], b: Sequence[float]) -> float:
    n = len(a)
    ma, mb = math.fsum(a) / n, math.fsum(b) / n
    sab = math.fsum((x - ma) * (y - mb) for x, y in zip(a, b))
    saa = math.fsum((x - ma) ** 2 for x in a)
    sbb = math.fsum((y - mb) ** 2 for y in b)
    return sab / math.sqrt(saa * sbb)


def _spearman_exact_p(rx: list[int], ry: list[int]) -> float:
    """Two-sided permutation p for the rank correlation, via a subset DP.

    ``rx`` and ``ry`` are doubled ranks. With the marginals fixed, rho is an
    increasing function of sum(rx[i] * ry[pi(i)]), so it is enough to count
    permutations by that cross-product sum.
    """
    n = len(rx)
    states: dict[tuple[int, int], int] = {(0, 0): 1}
    for i in range(n):
        nxt: dict[tuple[int, int], int] = defaultdict(int)
        for (mask, s), ways in states.items():
            for j in range(n):
                if not mask >> j & 1:
                    nxt[(mask | 1 << j, s + rx[i] * ry[j])] += ways
        states = nxt
    centre_num = sum(rx) * sum(ry)  # n * E[S]
    observed = abs(n * sum(a * b for a, b in zip(rx, ry)) - centre_num)
    total = hits = 0
    for (_, s), ways in states.items():
        total += ways
        if abs(n * s - centre_num) >= observed:
            hits += ways
    return hits / total


def spearman(x: Sequence[float], y: Sequence[float], method: str = "auto") -> StatResult:
    """Spearman's rho as Pearson correlation of mid-ranks.

    The asymptotic p-value uses ``t = rho * sqrt((n-2)/(1-rho^2))`` with
    n-2 degrees of freedom. ``"auto"`` switches to the exact permutation
    distribution for ``n <= EXACT_SPEARMAN_MAX_N``.
    """
    if method not in ("auto", "exact", "asymptotic"):
        raise ValueError(f"unknown method {method!r}")
    if len(x) != len(y):
        raise ValueError("x and y must have the same length")
    n = len(x)
    res = StatResult("spearman", n=n)
    if n < 4:
        res.status, res.note = SKIPPED, "needs n >= 4"
        return res
    if len(set(x)) == 1 or len(set(y)) == 1:
        res.status, res.note = SKIPPED, "constant input"
        return res
    rx, ry = rankdata(x), rankdata(y)
    rho = max(-1.0, min(1.0, _pearson(rx, ry)))
    res.statistic = rho
    if method == "exact" or (method == "auto" and n <= EXACT_SPEARMAN_MAX_N):
        res.p_value = _spearman_exact_p([int(round(2 * r)) for r in rx],
                                        [int(round(2 * r)) for r in ry])
        res.note = "exact"
    elif abs(rho) >= 1.0 - 1e-15:
        res.p_value = 0.0
        res.note = "asymptotic"
    else:
        t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
        res.p_value = t_sf_two_sided(t, n - 2)
        res.note = "asymptotic"
    return res


# -- multiple testing --------------------------------------------------------

def benjamini_hochberg(pvals: Sequence[float], alpha: float = 0.05) -> tuple[list[bool], float]:
    """Step-up FDR control.

    Returns per-test significance flags and the cutoff ``(k/m) * alpha`` for
    the largest k with ``p_(k) <= (k/m) * alpha``; the cutoff is 0 when
    nothing is significant.
    """
    if not pvals:
        raise ValueError("need at least one p-value")
    for p in pvals:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p-value {p} outside [0, 1]")
    m = len(pvals)
    ordered = sorted(pvals)
    k = 0
    for i, p in enumerate(ordered, start=1):
        if p <= i / m * alpha:
            k = i
    if k == 0:
        return [False] * m, 0.0
    threshold = ordered[k - 1]
    return [p <= threshold for p in pvals], k / m * alpha


def bh_adjust(pvals: Sequence[float]) -> list[float]:
    """BH-adjusted p-values (monotone, capped at 1)."""
    m = len(pvals)
    order = sorted(range(m), key=lambda i: pvals[i], reverse=True)
    adjusted = [0.0] * m
    running = 1.0
    for rank_from_top, i in enumerate(order):
        rank = m - rank_from_top
        running = min(running, pvals[i] * m / rank)
        adjusted[i] = min(running, 1.0)
    return adjusted


# -- post hoc ----------------------------------------------------------------

def dunn_posthoc(gs: GroupedSample) -> list[StatResult]:
    """Dunn's pairwise z tests on mean ranks with tie correction, BH adjusted."""
    keys = list(gs.groups)
    values = [v for k in keys for v in gs.groups[k]]
    n = len(values)
    if len(keys) < 2 or n < 2:
        return []
    ranks = rankdata(values)
    mean_rank, pos = {}, 0
    for k in keys:
        m = len(gs.groups[k])
        mean_rank[k] = math.fsum(ranks[pos:pos + m]) / m
        pos += m
    var_base = n * (n + 1) / 12.0 - _tie_term(values) / (12.0 * (n - 1))
    results, raw = [], []
    for a, b in itertools.combinations(keys, 2):
        na, nb = len(gs.groups[a]), len(gs.groups[b])
        se = math.sqrt(var_base * (1.0 / na + 1.0 / nb))
        z = (mean_rank[a] - mean_rank[b]) / se if se > 0 else 0.0
        p = norm_sf_two_sided(z)
        raw.append(p)
        results.append(StatResult("dunn", statistic=z, p_value=p, n=na + nb,
                                  group_sizes={a: na, b: nb}, label=f"{a} vs {b}"))
    for res, adj in zip(results, bh_adjust(raw)):
        res.note = f"raw_p={res.p_value!r}"
        res.p_value = adj
    return results


# -- surprisal difference ----------------------------------------------------

def delta(l1: float, l2: float) -> float:
    """Relative surprisal difference (L1 - L2) / mean(L1, L2).

    Positive values mean the second method models the language better.
    """
    if l1 <= 0 or l2 <= 0:
        raise ValueError("surprisal values must be positive")
    return (l1 - l2) / (0.5 * (l1 + l2))
