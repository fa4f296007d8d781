import numpy as np
import pytest

from helpers import exact_dbar_star_moments
from spillnet.dgp import BuiltinDesign, DesignSpec, expand
from spillnet.errors import EmptySubsampleError, ParameterError, SingularModelError
from spillnet.graph import (
    DegreeSummary,
    from_edge_list,
    generate_erdos_renyi,
    summarize,
)
from spillnet.oracle import (
    dbar_star_moments,
    dbar_weights,
    enumeration_population_ols,
    oracle_report,
    t_weights,
    true_dbar_coefficients,
    true_dbar_star_coefficients,
    true_t_coefficients,
)


def _flat_spec(degrees, spillover, direct=1.0, baseline=None):
    degs = sorted({0, *degrees})
    return DesignSpec(
        baseline={g: (baseline(g) if baseline else 1.0) for g in degs},
        direct_effect={g: direct for g in degs},
        spillover_effect={g: spillover(g) for g in degs},
        noise_sd=0.0,
    )


def test_weights_are_normalized_and_vanish_at_degree_zero():
    summary = DegreeSummary.from_degrees([0, 0, 1, 2, 2, 3, 5])
    wt = t_weights(summary)
    assert wt[0] == 0.0
    assert summary.expect(lambda g: wt[g]) == pytest.approx(1.0, abs=1e-12)
    wd = dbar_weights(summary)
    assert 0 not in wd
    assert summary.expect(lambda g: wd[g], positive_only=True) == pytest.approx(1.0, abs=1e-12)
    assert all(w >= 0 for w in wt.values())
    assert all(w >= 0 for w in wd.values())
    # degree-1 nodes get the single largest fraction-regression weight
    assert wd[1] == max(wd.values())


def test_t_coefficients_hand_arithmetic():
    summary = DegreeSummary.from_degrees([1, 2, 3])
    spec = _flat_spec([1, 2, 3], spillover=lambda g: float(g))
    direct, spill = true_t_coefficients(spec, summary, 0.5)
    assert direct == pytest.approx(1.0)
    assert spill == pytest.approx(14 / 6)


def test_t_spillover_zero_when_spillovers_vanish():
    summary = DegreeSummary.from_degrees([0, 1, 4])
    spec = _flat_spec([1, 4], spillover=lambda g: 0.0)
    assert true_t_coefficients(spec, summary, 0.3)[1] == 0.0


def test_t_spillover_undefined_on_edgeless_network():
    summary = DegreeSummary.from_degrees([0, 0])
    spec = _flat_spec([0], spillover=lambda g: 0.0)
    assert true_t_coefficients(spec, summary, 0.5)[1] is None


def test_dbar_coefficients_hand_arithmetic():
    summary = DegreeSummary.from_degrees([1, 2])
    spec = _flat_spec([1, 2], spillover=lambda g: float(g))
    direct, spill = true_dbar_coefficients(spec, summary, 0.5)
    assert direct == pytest.approx(1.0)
    assert spill == pytest.approx(2.0)


def test_dbar_weights_cancel_inverse_degree_spillovers():
    summary = DegreeSummary.from_degrees([0, 1, 2, 4, 4])
    k = 0.7
    spec = _flat_spec([1, 2, 4], spillover=lambda g: k / g if g else 0.0)
    _, spill = true_dbar_coefficients(spec, summary, 0.5)
    assert spill == pytest.approx(k, abs=1e-12)


def test_dbar_coefficients_undefined_without_positive_degrees():
    summary = DegreeSummary.from_degrees([0, 0, 0])
    spec = _flat_spec([0], spillover=lambda g: 0.0)
    assert true_dbar_coefficients(spec, summary, 0.5) == (None, None)


def test_dbar_star_bias_hand_value():
    # half the units isolated, half with one neighbor, baseline gap of one
    summary = DegreeSummary.from_histogram({0: 1, 1: 1})
    spec = _flat_spec([0, 1], spillover=lambda g: 0.0,
                      baseline=lambda g: 1.0 if g > 0 else 0.0)
    _, bias, weighted = true_dbar_star_coefficients(spec, summary, 0.5)
    assert bias == pytest.approx(2 / 3)
    assert weighted == pytest.approx(0.0)


def test_dbar_star_bias_hand_value_matches_enumeration():
    net = from_edge_list([(0, 1)], n=4)  # degrees (1, 1, 0, 0)
    spec = _flat_spec([0, 1], spillover=lambda g: 0.0,
                      baseline=lambda g: 1.0 if g > 0 else 0.0)
    summary = summarize(net)
    _, bias, weighted = true_dbar_star_coefficients(spec, summary, 0.5)
    assert bias == pytest.approx(2 / 3)
    coefs = enumeration_population_ols(net, spec, 0.5, "dbar_star_reg")
    assert coefs["dbar_star"] == pytest.approx(bias + weighted, abs=1e-12)


def test_dbar_star_reduces_to_dbar_without_isolation():
    summary = DegreeSummary.from_degrees([1, 2, 3, 3])
    spec = _flat_spec([1, 2, 3], spillover=lambda g: -0.5 / (1 + g))
    _, bias, weighted = true_dbar_star_coefficients(spec, summary, 0.4)
    assert bias == 0.0
    _, dbar_spill = true_dbar_coefficients(spec, summary, 0.4)
    assert weighted == pytest.approx(dbar_spill, abs=1e-12)


def test_dbar_star_undefined_when_all_isolated():
    summary = DegreeSummary.from_degrees([0, 0])
    spec = _flat_spec([0], spillover=lambda g: 0.0)
    direct, bias, weighted = true_dbar_star_coefficients(spec, summary, 0.5)
    assert direct == pytest.approx(1.0)
    assert bias is None and weighted is None


def test_bias_magnitude_decreases_as_isolation_vanishes():
    spec = _flat_spec([1, 2], spillover=lambda g: 0.0, baseline=lambda g: float(g))
    last = None
    for isolated in (8, 4, 2, 1):
        summary = DegreeSummary.from_histogram({0: isolated, 1: 5, 2: 5})
        _, bias, _ = true_dbar_star_coefficients(spec, summary, 0.5)
        if last is not None:
            assert abs(bias) < abs(last)
        last = bias
    summary = DegreeSummary.from_histogram({1: 5, 2: 5})
    _, bias, _ = true_dbar_star_coefficients(spec, summary, 0.5)
    assert bias == 0.0


@pytest.mark.parametrize("p", [0.3, 0.5])
def test_dbar_star_moments_match_enumeration(p):
    nets = [
        from_edge_list([(0, 1)], n=4),
        from_edge_list([(0, 1), (1, 2), (0, 2)], n=5),
        generate_erdos_renyi(7, 1.5, seed=3),
        generate_erdos_renyi(8, 3.0, seed=4),
    ]
    for net in nets:
        mean, var, _ = exact_dbar_star_moments(net, p)
        got_mean, got_var = dbar_star_moments(summarize(net), p)
        assert got_mean == pytest.approx(mean, abs=1e-12)
        assert got_var == pytest.approx(var, abs=1e-12)


def test_oracle_report_assembles_consistent_totals():
    net = generate_erdos_renyi(9, 1.5, seed=8)
    summary = summarize(net)
    spec = expand(BuiltinDesign(1, -0.5), summary.histogram.keys())
    report = oracle_report(spec, summary, 0.5)
    assert report.dbar_star_total == pytest.approx(
        report.dbar_star_bias + report.dbar_star_weighted
    )
    assert report.mean_dbar_star == pytest.approx(0.5 * report.positive_share)
    assert report.treated_prob == 0.5


def test_reference_setting_oracle_matches_reported_values():
    # pooled over several large calibrated graphs the oracle should sit on
    # the reported true coefficients
    from spillnet.graph import WS_CALIBRATED, generate_watts_strogatz

    degrees = np.concatenate([
        generate_watts_strogatz(2000, seed=s, **WS_CALIBRATED).degree
        for s in range(8)
    ])
    summary = DegreeSummary.from_degrees(degrees)
    spec = expand(BuiltinDesign(1, -0.5), summary.histogram.keys())
    report = oracle_report(spec, summary, 0.5)
    assert report.t_spillover == pytest.approx(-0.146, abs=0.01)
    assert report.dbar_spillover == pytest.approx(-0.298, abs=0.02)
    assert report.dbar_star_weighted == pytest.approx(-0.303, abs=0.02)
    assert report.dbar_star_bias == pytest.approx(0.704, abs=0.06)
    spec2 = expand(BuiltinDesign(2, 0.0), summary.histogram.keys())
    report2 = oracle_report(spec2, summary, 0.5)
    assert report2.dbar_star_bias == pytest.approx(0.314, abs=0.04)


def _enumeration_agrees(net, spec, p, atol=1e-9):
    summary = summarize(net)
    report = oracle_report(spec, summary, p)
    checked = 0
    try:
        coefs = enumeration_population_ols(net, spec, p, "t_reg")
        assert coefs["treated"] == pytest.approx(report.t_direct, abs=atol)
        assert coefs["treated_neighbors"] == pytest.approx(report.t_spillover, abs=atol)
        checked += 1
    except SingularModelError:
        pass
    try:
        coefs = enumeration_population_ols(net, spec, p, "dbar_reg")
        assert coefs["treated"] == pytest.approx(report.dbar_direct, abs=atol)
        assert coefs["dbar"] == pytest.approx(report.dbar_spillover, abs=atol)
        checked += 1
    except (SingularModelError, EmptySubsampleError):
        pass
    try:
        coefs = enumeration_population_ols(net, spec, p, "dbar_star_reg")
        assert coefs["treated"] == pytest.approx(report.dbar_star_direct, abs=atol)
        assert coefs["dbar_star"] == pytest.approx(report.dbar_star_total, abs=atol)
        checked += 1
    except SingularModelError:
        pass
    return checked


def test_theorem_formulas_agree_with_enumeration_on_random_graphs():
    rng = np.random.default_rng(12)
    total = 0
    for _ in range(8):
        n = int(rng.integers(5, 11))
        net = generate_erdos_renyi(n, float(rng.uniform(0.8, 3.0)), seed=int(rng.integers(10**6)))
        for design_id in (1, 2, 3):
            for c in (0.0, -0.5):
                spec = expand(BuiltinDesign(design_id, c), np.unique(net.degree))
                total += _enumeration_agrees(net, spec, 0.5)
    assert total >= 60


def test_zero_design_zeroes_every_spillover_coefficient():
    net = generate_erdos_renyi(8, 2.0, seed=5)
    degs = np.unique(net.degree)
    spec = DesignSpec(
        baseline={int(g): 3.0 for g in degs},
        direct_effect={int(g): 3.0 for g in degs},
        spillover_effect={int(g): 0.0 for g in degs},
        noise_sd=0.0,
    )
    for which, slope in (("t_reg", "treated_neighbors"), ("dbar_star_reg", "dbar_star")):
        coefs = enumeration_population_ols(net, spec, 0.5, which)
        assert coefs[slope] == pytest.approx(0.0, abs=1e-10)


def test_enumeration_rejects_large_graphs_and_degenerate_inputs():
    big = generate_erdos_renyi(13, 2.0, seed=0)
    spec = expand(BuiltinDesign(3, 0.0), np.unique(big.degree))
    with pytest.raises(ParameterError):
        enumeration_population_ols(big, spec, 0.5, "t_reg")

    empty = from_edge_list([], n=5)
    spec0 = expand(BuiltinDesign(3, 0.0), [0])
    with pytest.raises(SingularModelError):
        enumeration_population_ols(empty, spec0, 0.5, "dbar_star_reg")
    with pytest.raises(EmptySubsampleError):
        enumeration_population_ols(empty, spec0, 0.5, "dbar_reg")
    with pytest.raises(ParameterError):
        enumeration_population_ols(empty, spec0, 0.5, "nonsense")


def test_oracle_rejects_out_of_range_probability():
    summary = DegreeSummary.from_degrees([0, 1])
    spec = _flat_spec([0, 1], spillover=lambda g: 0.0)
    for p in (0.0, 1.0):
        with pytest.raises(ParameterError):
            true_t_coefficients(spec, summary, p)
