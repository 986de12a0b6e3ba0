import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from windsolar.copula import sample_joint
from windsolar.errors import ConfigurationError, DegenerateRegionError
from windsolar.marginals import GevGpSplice, GevParams, GpParams, splice_fit, gev_fit_mle
from windsolar.rng import stream
from windsolar.tree import (
    LevelBounds,
    build_tree,
    classify,
    level_index,
    read_tree_csv,
    tree_csv,
    tree_report,
)

WIND = GevParams(11.892, 8.0, -0.175)
PRECIP = GevGpSplice(GevParams(1.0, 0.5, 0.5), GpParams(4.4, 2.0, 0.1), 4.4, 0.05)
B = LevelBounds()


def test_classify_examples():
    assert classify(18.0, 0.5) == ("8", "moderate")
    assert classify(5.0, 0.1) == (None, None)
    assert classify(28.5, 4.1666) == ("11", "torrential")
    # shared endpoint belongs to the upper level; top edges are closed
    assert classify(32.6, 10.4166) == ("11", "torrential")
    assert classify(32.61, 10.5) == (None, None)
    # the gap between tabulated levels is closed by the lower level
    assert classify(20.75, 1.04165) == ("8", "moderate")


@given(st.floats(17.2, 32.6), st.floats(0.4126, 10.4166))
def test_classify_is_a_partition(w, p):
    wl, pl = classify(w, p)
    assert wl is not None and pl is not None
    hits = [
        (a, b)
        for a, wlo, whi in zip(B.wind_labels, B.wind_edges[:-1], B.wind_edges[1:])
        for b, plo, phi in zip(B.precip_labels, B.precip_edges[:-1], B.precip_edges[1:])
        if (wlo <= w < whi or (a == B.wind_labels[-1] and w == whi))
        and (plo <= p < phi or (b == B.precip_labels[-1] and p == phi))
    ]
    assert hits == [(wl, pl)]


def test_tree_structure_and_order():
    t0 = time.perf_counter()
    tree = build_tree(4.0, WIND, PRECIP)
    assert time.perf_counter() - t0 < 1.0
    assert len(tree) == 16
    assert abs(tree.probabilities.sum() - 1.0) <= 1e-9
    assert [c.scenario_id for c in tree.cells] == list(range(1, 17))
    assert [c.precip_level for c in tree.cells[:4]] == ["moderate"] * 4
    assert [c.wind_level for c in tree.cells[:4]] == ["8", "9", "10", "11"]
    assert 0 < tree.anomalous_mass < 1


def test_independence_factorizes():
    tree = build_tree(0.0, WIND, PRECIP)
    pw = np.diff(WIND.cdf(B.wind_edges))
    pp = np.diff(PRECIP.cdf(B.precip_edges))
    expected = np.outer(pp, pw).ravel()
    np.testing.assert_allclose(tree.probabilities, expected / expected.sum(), rtol=1e-12)


def test_tree_matches_monte_carlo_frequencies():
    theta = 4.0
    tree = build_tree(theta, WIND, PRECIP)
    xy = sample_joint(theta, WIND, PRECIP, stream(0, "tree-mc"), 10**6)
    wi, pi = level_index(xy[:, 0], xy[:, 1], B)
    inside = (wi >= 0) & (pi >= 0)
    counts = np.bincount(pi[inside] * 4 + wi[inside], minlength=16)
    freq = counts / counts.sum()
    assert np.max(np.abs(freq - tree.probabilities)) * 100 < 0.5
    assert inside.mean() == pytest.approx(tree.anomalous_mass, abs=0.005)


def test_tree_invariant_under_monotone_transform():
    theta = 3.0
    xy = sample_joint(theta, WIND, PRECIP, stream(1, "pit"), 50_000)
    w_fit = gev_fit_mle(xy[:, 0])
    w2_fit = gev_fit_mle(2.0 * xy[:, 0])
    p_fit = splice_fit(xy[:, 1])
    t1 = build_tree(theta, w_fit, p_fit, B)
    t2 = build_tree(theta, w2_fit, p_fit, B.scaled(wind_factor=2.0))
    np.testing.assert_allclose(t1.probabilities, t2.probabilities, atol=1e-6)


def test_degenerate_region():
    calm = GevParams(2.0, 0.5, -0.5)  # upper support end at 3 m/s
    with pytest.raises(DegenerateRegionError):
        build_tree(2.0, calm, PRECIP)


def test_report_format_and_round_trip():
    tree = build_tree(4.0, WIND, PRECIP)
    csv_text, text = tree_report(tree)
    lines = csv_text.strip().split("\n")
    assert len(lines) == 17
    assert lines[0] == "scenario_id,precip_level,wind_level,probability_percent,probability"
    pct = [row.split(",")[3] for row in lines[1:]]
    assert all(len(p.split(".")[1]) == 3 for p in pct)
    assert "100.000" in text
    back = read_tree_csv(csv_text)
    assert [c.probability for c in back.cells] == [c.probability for c in tree.cells]
    assert tree_csv(build_tree(4.0, WIND, PRECIP)) == csv_text


def test_bounds_validation_and_round_trip():
    with pytest.raises(ConfigurationError):
        LevelBounds(wind=(("a", 5.0, 4.0),))
    with pytest.raises(ConfigurationError):
        LevelBounds(wind=(("a", 1.0, 4.0), ("b", 3.0, 6.0)))
    assert LevelBounds.from_dict(B.to_dict()) == B
