"""Acceptance suite.

One test per acceptance criterion, each printing a single pass/fail line
(run pytest with -s to see them alongside the assertions).
"""

import itertools
import math
import time

import numpy as np

from jamsim import (JammerSpec, SweepSpec, SystemConfig, despread,
                    estimate_overlap_sq, gen_channel, jamming_overlap_sq,
                    make_codebook, rate_from_overlap, receive_pilot_block,
                    run_sweep, run_trials, select_retransmission_pilot,
                    substream, verify_moments)
from jamsim.config import snr_db_to_power


def _report(num: int, description: str, ok: bool, detail: str = "") -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {description}"
    if detail:
        line += f" ({detail})"
    print(line)
    return line


def test_criterion_1_effective_noise_moment_oracle():
    cfg = SystemConfig(M=20, T=200, tau=8, beta_u=1.0, beta_j=1.0,
                       P=1.0, Q=1.0, master_seed=101)
    start = time.perf_counter()
    worst_moment = 0.0
    worst_sinr = 0.0
    for overlap in (0.0, 0.5, 1.0):
        rep = verify_moments(cfg, overlap, 100000)
        worst_moment = max(worst_moment, *(rep.moment_rel_errors()[k]
                                           for k in ("e1", "e2", "e3")))
        worst_sinr = max(worst_sinr, rep.sinr_rel_error())
    elapsed = time.perf_counter() - start
    ok = worst_moment <= 0.03 and worst_sinr <= 0.05 and elapsed < 30.0
    line = _report(1, "effective-noise moments match closed forms", ok,
                   f"max moment err {worst_moment:.4f} <= 0.03, "
                   f"max SINR err {worst_sinr:.4f} <= 0.05, {elapsed:.1f}s < 30s")
    assert ok, line


def test_criterion_2_rate_saturation_level():
    # closed-form rate at M = 1e6 against the large-array saturation value
    # predicted by the limit formula at overlap^2 = 0.25
    cfg = SystemConfig(M=10**6, T=200, tau=10, beta_u=1.0, beta_j=1.0, P=1.0, Q=1.0)
    achieved = rate_from_overlap(cfg, 0.25, 1).rate
    target = (1 - cfg.tau / cfg.T) * math.log2(1 / 0.25)    # 1.9 bits/s/Hz
    ok = abs(achieved - target) <= 0.05
    line = _report(2, "rate at M=1e6 meets the saturation target 1.9 +- 0.05", ok,
                   f"rate {achieved:.4f}, target {target:.4f}, "
                   f"gap {abs(achieved - target):.4f}")
    assert ok, (line + " -- the saturation target uses the large-SINR form of the "
                "limit, which drops the +1 inside the log; the exact closed-form "
                "rate saturates at prelog*log2(1 + limit_sinr) = "
                f"{0.95 * math.log2(5):.4f}. See 'Accuracy notes' in README.md.")


def test_criterion_3_unbounded_growth_without_training_jamming():
    gains = []
    for m in (10**3, 10**4, 10**5):
        low = SystemConfig(M=m, T=200, tau=10, P=1.0, Q=1.0,
                           power_policy="explicit", powers=(1.0, 1.0, 0.0, 1.0))
        high = SystemConfig(M=2 * m, T=200, tau=10, P=1.0, Q=1.0,
                            power_policy="explicit", powers=(1.0, 1.0, 0.0, 1.0))
        gains.append(rate_from_overlap(high, 0.5, 1).rate
                     - rate_from_overlap(low, 0.5, 1).rate)
    ok = all(0.90 <= g <= 0.95 for g in gains)
    line = _report(3, "doubling M adds ~one prelog bit when q_t=0", ok,
                   "gains " + ", ".join(f"{g:.4f}" for g in gains))
    assert ok, line


def test_criterion_4_overlap_estimator_convergence():
    overlap = 0.25
    trials = 1000
    rmse = {}
    for m in (100, 1000, 10000):
        cfg = SystemConfig(M=m, T=200, tau=10, P=1.0, Q=1.0, master_seed=104)
        cb = make_codebook(cfg.tau)
        s_u = cb[0]
        s_j = math.sqrt(overlap) * cb[0] + math.sqrt(1 - overlap) * cb[1]
        rng = substream(cfg.master_seed, m)
        sq_err = 0.0
        for _ in range(trials):
            g_u = gen_channel(rng, m, cfg.beta_u)
            g_j = gen_channel(rng, m, cfg.beta_j)
            block = receive_pilot_block(cfg, g_u, g_j, s_u, s_j, rng)
            est = estimate_overlap_sq(despread(block, s_u), cfg)
            sq_err += (est - overlap) ** 2
        rmse[m] = math.sqrt(sq_err / trials)
    ok = rmse[100] > rmse[1000] > rmse[10000] and rmse[10000] < 0.03
    line = _report(4, "blind overlap estimate converges with the array", ok,
                   f"rmse {rmse[100]:.4f} > {rmse[1000]:.4f} > {rmse[10000]:.4f}, "
                   "final < 0.03")
    assert ok, line


def test_criterion_5_retransmission_beats_conventional():
    power = snr_db_to_power(10.0)
    cfg = SystemConfig(M=50, T=200, tau=20, P=power, Q=power,
                       epsilon=0.1, n_max=2, master_seed=105)
    jam = JammerSpec(kind="gaussian")
    trials = 50000
    conv = run_trials(cfg, "conventional", jam, trials)
    details = []
    ok = True
    for scheme in ("alg1", "alg2"):
        data = run_trials(cfg, scheme, jam, trials)
        diff = data.rates - conv.rates      # paired: same per-trial substreams
        stderr = diff.std(ddof=1) / math.sqrt(trials)
        ratio = diff.mean() / stderr
        details.append(f"{scheme}: +{diff.mean():.4f} bits = {ratio:.1f} stderr")
        ok = ok and diff.mean() > 3 * stderr
    line = _report(5, "both protocols beat the conventional scheme by > 3 stderr",
                   ok, "; ".join(details))
    assert ok, line


def test_criterion_6_adaptation_restores_scaling_with_m():
    power = snr_db_to_power(5.0)
    trials = 2000
    means = {}
    for scheme in ("alg2", "conventional"):
        for m in (100, 400):
            cfg = SystemConfig(M=m, T=200, tau=10, P=power, Q=power,
                               epsilon=0.1, n_max=2, master_seed=106)
            # worst-case deterministic attack: the jammer sits exactly on the
            # codeword the user opens with
            jam = JammerSpec(kind="codeword", codeword_index=0)
            data = run_trials(cfg, scheme, jam, trials, first_pilot=0,
                              opt_mode="codebook")
            means[scheme, m] = float(data.rates.mean())
    adapt_gain = means["alg2", 400] - means["alg2", 100]
    conv_gain = means["conventional", 400] - means["conventional", 100]
    ok = adapt_gain >= 0.5 and conv_gain < 0.2
    line = _report(6, "pilot adaptation scales with M while conventional saturates",
                   ok, f"adaptation gain {adapt_gain:.3f} >= 0.5, "
                   f"conventional gain {conv_gain:.3f} < 0.2")
    assert ok, line


def test_criterion_7_exact_gram_selection_is_perfect():
    checked = 0
    worst = 0.0
    ok = True
    for tau in (2, 4, 8):
        cfg = SystemConfig(M=16, T=200, tau=tau, epsilon=0.1, n_max=2)
        cb = make_codebook(tau)
        for jam_k, first in itertools.product(range(tau), repeat=2):
            s_j = cb[jam_k]
            first_overlap = jamming_overlap_sq(s_j, cb[first])
            if cfg.overlap_below_threshold(first_overlap):
                n_used, final = 1, first_overlap
            else:
                gram = np.outer(np.conj(s_j), s_j)     # noise-free estimate
                _, pilot, predicted = select_retransmission_pilot(gram, cb)
                if predicted < first_overlap:
                    n_used, final = 2, jamming_overlap_sq(s_j, pilot)
                else:
                    n_used, final = 1, first_overlap
            worst = max(worst, final)
            ok = ok and final <= 1e-12 and n_used <= 2
            checked += 1
    line = _report(7, "exact-gram pilot adaptation always reaches overlap 0 in <= 2 "
                   "rounds", ok, f"{checked} (tau, jammer, pilot) cases, "
                   f"worst final overlap {worst:.2e}")
    assert ok, line


def test_criterion_8_sweeps_reproduce_across_worker_counts(tmp_path):
    def sweep_rows(workers):
        spec = SweepSpec(axis="M", values=(8.0, 16.0),
                         schemes=("conventional", "alg1"),
                         base=SystemConfig(M=8, T=40, tau=4, P=1.0, Q=1.0,
                                           epsilon=0.1, n_max=2, master_seed=108),
                         jammer=JammerSpec(), n_trials=400,
                         output_path=str(tmp_path / f"sweep_{workers}.csv"),
                         n_workers=workers)
        return run_sweep(spec)

    reference = sweep_rows(1)
    ok = True
    worst = 0.0
    for workers in (2, 3):
        rows = sweep_rows(workers)
        for ref, row in zip(reference, rows):
            rel = abs(row.mean_rate - ref.mean_rate) / abs(ref.mean_rate)
            worst = max(worst, rel)
            ok = ok and rel <= 1e-12
    line = _report(8, "sweep results identical for any worker count", ok,
                   f"worst relative difference {worst:.2e} <= 1e-12")
    assert ok, line
