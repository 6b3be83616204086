import math

import numpy as np
import pytest

from cogrelay import (BLOCK_SLOTS, InvalidCase, SlotOutcome, SystemConfig,
                      decoding_set_pmf, estimate_outage,
                      estimate_schedule_throughput, outage_probability,
                      secondary_success_prob, simulate_slot_case1,
                      simulate_slot_case2, solve_assignment, substream)


def _cfg(case="direct", M=4, R=0.5, gamma_p=50.0):
    return SystemConfig(M=M, gamma_p=gamma_p, gamma_s=30.0, R=R, case=case)


def test_slot_outcome_fields_and_case_guard():
    out = simulate_slot_case1(_cfg(), substream(0, 0))
    assert isinstance(out, SlotOutcome)
    assert 0 <= out.K <= 3
    assert isinstance(out.primary_ok, bool)
    with pytest.raises(InvalidCase):
        simulate_slot_case1(_cfg("nodirect"), substream(0, 0))
    with pytest.raises(InvalidCase):
        simulate_slot_case2(_cfg("direct"), substream(0, 0))


def test_slot_stream_is_block_stream():
    # sequential single-slot draws on one stream replay that stream's block
    # row-for-row, because normals fill in C order
    from cogrelay.simulate import _slot_events
    from cogrelay import draw_realizations

    cfg = _cfg(M=3)
    rng = substream(77, 0)
    outs = [simulate_slot_case1(cfg, rng) for _ in range(5)]
    block = draw_realizations(cfg, 5, substream(77, 0))
    p_ok, s_ok, k = _slot_events(cfg, block)
    for i, o in enumerate(outs):
        assert o == SlotOutcome(K=int(k[i]), primary_ok=bool(p_ok[i]),
                                secondary_ok=bool(s_ok[i]))


def test_estimate_outage_deterministic_and_worker_invariant():
    cfg = _cfg("nodirect", M=4)
    n = 3 * BLOCK_SLOTS + 1234   # force a ragged final block
    a = estimate_outage(cfg, n, seed=5, workers=1)
    b = estimate_outage(cfg, n, seed=5, workers=3)
    c = estimate_outage(cfg, n, seed=5, workers=1)
    assert a.primary.p_hat == b.primary.p_hat == c.primary.p_hat
    assert a.secondary.p_hat == b.secondary.p_hat
    assert np.array_equal(a.k_counts, b.k_counts)
    d = estimate_outage(cfg, n, seed=6, workers=1)
    assert d.primary.p_hat != a.primary.p_hat


def test_estimate_fields():
    cfg = _cfg()
    est = estimate_outage(cfg, 1, seed=0)
    assert est.trials == 1
    assert est.primary.p_hat in (0.0, 1.0)
    assert est.primary.stderr == 0.0
    assert est.k_counts.sum() == 1
    with pytest.raises(ValueError):
        estimate_outage(cfg, 0, seed=0)
    est2 = estimate_outage(cfg, 50_000, seed=0)
    p = est2.primary.p_hat
    assert math.isclose(est2.primary.stderr, math.sqrt(p * (1 - p) / 50_000),
                        rel_tol=1e-12)
    assert est2.k_counts.sum() == 50_000


def test_k_histogram_matches_pmf():
    cfg = _cfg(M=5, R=0.8, gamma_p=20.0)
    n = 300_000
    est = estimate_outage(cfg, n, seed=31)
    pmf = decoding_set_pmf(cfg)
    for k in range(5):
        se = math.sqrt(max(pmf[k] * (1 - pmf[k]), 1e-12) / n)
        assert abs(est.k_counts[k] / n - pmf[k]) <= 4.5 * se, k


def test_primary_outage_matches_closed_form():
    for case, seed in (("direct", 101), ("nodirect", 102)):
        cfg = _cfg(case, M=4, R=0.5, gamma_p=20.0)
        nu = outage_probability(cfg).nu
        n = 200_000
        est = estimate_outage(cfg, n, seed=seed)
        se = math.sqrt(nu * (1.0 - nu) / n)
        assert abs(est.primary.p_hat - nu) <= 4.0 * se, (case, est.primary.p_hat, nu)


def test_secondary_outage_matches_closed_form():
    for case, seed in (("direct", 103), ("nodirect", 104)):
        cfg = _cfg(case, M=5, R=0.7)
        f = secondary_success_prob(cfg)
        n = 200_000
        est = estimate_outage(cfg, n, seed=seed)
        se = math.sqrt(f * (1.0 - f) / n)
        assert abs(est.secondary.p_hat - (1.0 - f)) <= 4.0 * se


def test_schedule_throughput_hits_targets():
    cfg = SystemConfig(M=4, gamma_p=50.0, gamma_s=30.0, R=0.5, lambda_p=0.1,
                       lambda_s=(0.0, 0.2, 0.3, 0.25))
    sol = solve_assignment(cfg, 0)
    n = 200_000
    est = estimate_schedule_throughput(cfg, sol.omega, n, seed=7)
    f = secondary_success_prob(cfg)
    for j in range(4):
        mu_expect = sol.omega[j] * f
        se = math.sqrt(mu_expect * (1.0 - mu_expect) / n)
        assert abs(est.mu_hat[j] - mu_expect) <= 4.0 * se, j
    nu = outage_probability(cfg).nu
    se = math.sqrt(nu * (1.0 - nu) / n)
    assert abs(est.primary_throughput - (1.0 - nu)) <= 4.0 * se


def test_schedule_throughput_validation_and_determinism():
    cfg = _cfg(M=3)
    with pytest.raises(ValueError):
        estimate_schedule_throughput(cfg, (0.5, 0.5), 100, seed=0)
    with pytest.raises(ValueError):
        estimate_schedule_throughput(cfg, (-0.1, 0.6, 0.5), 100, seed=0)
    a = estimate_schedule_throughput(cfg, (0.2, 0.3, 0.5), 40_000, seed=3, workers=1)
    b = estimate_schedule_throughput(cfg, (0.2, 0.3, 0.5), 40_000, seed=3, workers=2)
    assert np.array_equal(a.mu_hat, b.mu_hat)
    assert a.primary_throughput == b.primary_throughput
