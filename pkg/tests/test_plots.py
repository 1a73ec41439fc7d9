import math
import re
import xml.etree.ElementTree as ET

from subseglab.metrics import ComplexityProfile
from subseglab.plots import emit_plots, least_squares, scatter_svg
from subseglab.stats import spearman

NS = "{http://www.w3.org/2000/svg}"


def profile(m):
    return ComplexityProfile(100, 10, 0.1, m, 4.0)


def test_least_squares():
    assert least_squares([0, 1, 2], [1, 3, 5]) == (2.0, 1.0)
    assert least_squares([1], [2]) is None
    assert least_squares([1, 1], [2, 3]) is None


def test_single_language_one_point_per_series(tmp_path):
    L = {("aaa", "char"): 80.0, ("aaa", "bpe"): 120.0}
    paths = emit_plots(tmp_path, L, {"aaa": profile(0.5)}, ["char", "bpe"])
    root = ET.parse(tmp_path / "surprisal_vs_mattr.svg").getroot()
    groups = root.findall(f"{NS}g")
    assert [len(g.findall(f"{NS}circle")) for g in groups] == [1, 1]
    assert {p.name for p in paths} == {"surprisal_vs_mattr.svg", "pairwise_char_vs_bpe.svg"}


def test_identical_values_on_diagonal():
    svg = scatter_svg({"s": [(3.0, 3.0), (5.0, 5.0)]}, "t", "x", "y", diagonal=True)
    root = ET.fromstring(svg)
    diag = root.find(f"{NS}line[@class='diagonal']")
    x1, y1, x2, y2 = (float(diag.get(k)) for k in ("x1", "y1", "x2", "y2"))
    for c in root.iter(f"{NS}circle"):
        cx, cy = float(c.get("cx")), float(c.get("cy"))
        # distance from the diagonal, up to the 0.1 px rounding of coordinates
        dist = abs((x2 - x1) * (cy - y1) - (y2 - y1) * (cx - x1)) / math.hypot(x2 - x1, y2 - y1)
        assert dist < 0.2


def test_trend_sign_matches_spearman():
    xs = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
    for ys in ([1, 2, 4, 8, 16, 32], [9, 7, 6, 3, 2, 1]):
        svg = scatter_svg({"m": list(zip(xs, ys))}, "t", "x", "y")
        slope = float(re.search(r'data-slope="([^"]+)"', svg).group(1))
        assert (slope > 0) == (spearman(xs, ys).statistic > 0)


def test_text_is_escaped():
    svg = scatter_svg({"a<b": [(1, 2)]}, "L & co", "x", "y")
    ET.fromstring(svg)
