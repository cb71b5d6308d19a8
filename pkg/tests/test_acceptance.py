"""Acceptance criteria, each run at its stated tolerance.

Every test prints one ``[PASS]``/``[FAIL]`` line (repeated in the
``acceptance criteria`` section of the terminal summary) before asserting.
The Monte Carlo criteria take a few minutes in total on one core.
"""

import itertools
import math
import time

import numpy as np
import pytest
from scipy import integrate

from jamllr.channel import ChannelParams
from jamllr.codes import code_from_selector, encode, is_member
from jamllr.gf2 import matmul, rank
from jamllr.harness import (
    ExperimentConfig,
    GenieConfig,
    refined_curves,
    run_bler_point,
    run_genie_sweep,
    run_sweep,
    sinr_at_bler,
)
from jamllr.inference import (
    AnchorConfig,
    anchor_update_double,
    anchor_update_single,
    exact_posterior_bruteforce,
    exact_posterior_smoothing,
    folded_pdf,
    posterior_pointwise,
)
from jamllr.orbgrand import decode, patterns_by_logistic_weight

S2A = 10 ** -1.2
REF_PARAMS = ChannelParams(sigma2_a=S2A, sigma2_v=1.0 - S2A, b=0.01, g=0.25)


def test_oracle_equivalence(report):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 13))
        params = ChannelParams(float(rng.uniform(0.02, 2.0)), float(rng.uniform(0.0, 5.0)),
                               float(rng.uniform(0.001, 0.999)), float(rng.uniform(0.001, 0.999)))
        y = rng.choice([-1.0, 1.0], size=n) + rng.normal(size=n) * math.sqrt(params.sigma2_j)
        worst = max(worst, np.abs(exact_posterior_smoothing(y, params)
                                  - exact_posterior_bruteforce(y, params)).max())
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 10
    report("oracle equivalence", ok, f"max |diff| = {worst:.2e} (<= 1e-9), {elapsed:.2f} s (< 10 s)")
    assert ok


def test_closed_form_spot_checks(report):
    # expected values: mpmath at 40 digits of the same closed forms
    checks = {
        "posterior_pointwise(1)": (posterior_pointwise(1.0, REF_PARAMS, prior_j=1 / 26),
                                   0.011278673585369845),
        "single(0.9)": (anchor_update_single(0.9, REF_PARAMS), 0.676),
        "single(0)": (anchor_update_single(0.0, REF_PARAMS), 0.01),
        "single(1)": (anchor_update_single(1.0, REF_PARAMS), 0.75),
        "double(1,1)": (anchor_update_double(1.0, 1.0, REF_PARAMS), 0.9955752212389381),
        "double(0,0)": (anchor_update_double(0.0, 0.0, REF_PARAMS), 0.0025442703032770202),
        "double(1,0)": (anchor_update_double(1.0, 0.0, REF_PARAMS), 0.43103448275862066),
        "folded_pdf(1,1)": (folded_pdf(1.0, 1.0), 0.45293324691462073),
        "folded_pdf(0,1)": (folded_pdf(0.0, 1.0), 0.48394144903828670),
    }
    worst = max(abs(float(got) - want) for got, want in checks.values())
    areas = [integrate.quad(lambda m: float(folded_pdf(m, s2)), 0, np.inf, limit=200)[0]
             for s2 in (S2A, 0.5, 1.0, 4.0)]
    area_err = max(abs(a - 1) for a in areas)
    ok = worst <= 1e-12 and area_err <= 1e-6
    report("closed-form spot checks", ok,
           f"max arithmetic error {worst:.1e} (<= 1e-12), pdf mass error {area_err:.1e} (<= 1e-6)")
    assert ok


def test_genie_study(report):
    cfg = ExperimentConfig(code="rlc", snr_a_db=12.0, jammer_sinr_db_list=[0.0],
                           sinr_convention="sigma2_j", trials=10_000, stop_errors=None,
                           master_seed=1, max_queries=1_000_000)
    rates = [GenieConfig(0.0, 0.0), GenieConfig(0.0, 0.05), GenieConfig(0.4, 0.0)]
    perfect, fn5, fp40 = run_genie_sweep(cfg, rates)
    ratio = max(fn5.bler, fp40.bler) / max(min(fn5.bler, fp40.bler), 1e-300)
    floor = min(fn5.bler, fp40.bler) / perfect.bler if perfect.bler else math.inf
    ok = ratio <= 3 and floor >= 5
    report("genie study", ok,
           f"BLER perfect {perfect.bler:.4g}, fn=5% {fn5.bler:.4g}, fp=40% {fp40.bler:.4g} "
           f"over {perfect.trials} frames; ratio {ratio:.2f} (<= 3), "
           f"min/perfect {floor:.2f} (>= 5)")
    assert ok


def test_dos_prevention(report):
    # The jammer fires on sensing a transmission, so each frame starts jammed.
    # Walk down into the DoS region and judge the first point where the
    # baseline has collapsed (BLER >= 0.9).
    cfg = ExperimentConfig(code="rlc", snr_a_db=12.0, initial_state="J", b=0.01, g=0.25,
                           trials=2000, stop_errors=None, master_seed=11, threads=0)
    scanned = []
    point = None
    for sinr in (-20.0, -25.0, -30.0):
        base = run_bler_point(cfg.replace(llr_strategy="baseline_awgn"), sinr)
        scanned.append(f"{sinr:g} dB: {base.bler:.3f}")
        if base.bler >= 0.9:
            point = (sinr, base)
            break
    if point is None:
        report("DoS prevention", False, f"no point with baseline BLER >= 0.9 ({'; '.join(scanned)})")
        pytest.fail("baseline never reached the DoS region")
    sinr, base = point
    anch = run_bler_point(cfg.replace(llr_strategy="anchored"), sinr)
    ok = anch.bler <= 0.2
    report("DoS prevention", ok,
           f"baseline BLER scan [{'; '.join(scanned)}]; at {sinr:g} dB over {base.trials} common "
           f"frames anchored BLER {anch.bler:.3f} (<= 0.2) vs baseline {base.bler:.3f}")
    assert ok


def test_sinr_gain_at_1e2(report):
    cfg = ExperimentConfig(code="rlc", snr_a_db=12.0, initial_state="J", b=0.01, g=0.25,
                           jammer_sinr_db_list=[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
                           strategies=["baseline_awgn", "anchored"], trials=30_000,
                           stop_errors=100, master_seed=21, threads=0)
    rows = run_sweep(cfg)
    curves = {s: [r for r in rows if r.strategy == s] for s in cfg.strategies}
    x_base = sinr_at_bler(curves["baseline_awgn"], 1e-2)
    x_anch = sinr_at_bler(curves["anchored"], 1e-2)
    gain = None if x_base is None or x_anch is None else x_base - x_anch
    ok = gain is not None and abs(gain - 2.7) <= 1.0
    pts = "; ".join(f"{s}: " + ", ".join(f"{r.jammer_sinr_db:g}:{r.bler:.3g}" for r in c)
                    for s, c in curves.items())
    report("SINR gain at BLER 1e-2", ok,
           f"baseline crosses at {x_base} dB, anchored at {x_anch} dB, gain "
           f"{'n/a' if gain is None else f'{gain:.2f}'} dB (needs 2.7 +- 1.0) [{pts}]")
    assert ok


def test_estimator_direction(report):
    params = ChannelParams.from_db(12.0, 0.0, 0.01, 0.25, convention="sigma2_j")
    res = refined_curves(params, np.linspace(0.0, 3.0, 31), frames=1000, master_seed=5,
                         anchor=AnchorConfig(0.2))
    fn0, fp0 = res["first_confusion"]
    fn1, fp1 = res["refined_confusion"]
    rel_drop = (fn0 - fn1) / fn0
    fp_rise = fp1 - fp0
    ok = res["bits"] >= 100_000 and rel_drop >= 0.30 and fp_rise <= 0.02
    report("estimator direction", ok,
           f"{res['bits']} bits: fn {fn0:.4f} -> {fn1:.4f} (relative drop {rel_drop:.1%}, "
           f"needs >= 30%), fp {fp0:.4f} -> {fp1:.4f} (rise {100 * fp_rise:.2f} pp, "
           f"needs <= 2 pp)")
    assert ok


def test_posterior_curve_shape(report):
    grid = np.linspace(0.0, 3.0, 3001)
    details, ok = [], True
    for snr_j in (0, 2, 4, 6):
        params = ChannelParams.from_db(12.0, snr_j, 0.01, 0.25, convention="sigma2_j")
        p = posterior_pointwise(grid, params, prior_j=0.0384615)
        arg = grid[np.argmin(p)]
        rising = bool(np.all(np.diff(p[grid >= 1.5]) > 0))
        ok &= 0.9 <= arg <= 1.1 and rising
        details.append(f"{snr_j} dB min at {arg:.3f}{'' if rising else ' (not rising)'}")
    report("posterior curve shape", ok, ", ".join(details) + " (min in [0.9, 1.1], rising on [1.5, 3])")
    assert ok


def _first_columns(rows):
    return [r.as_csv()[:-1] for r in rows]


def test_decoder_sanity(report):
    rng = np.random.default_rng(8)
    one_query = {}
    for name in ("rlc", "ca_polar"):
        code = code_from_selector(name, 128, 105, seed=0)
        hits = 0
        for _ in range(1000):
            c = encode(code, rng.integers(0, 2, size=105, dtype=np.uint8))
            out = decode(np.where(c == 0, 1.0, -1.0) * 2 / S2A, code)
            hits += out.queries == 1 and np.array_equal(out.codeword, c)
        one_query[name] = hits
    prefix = list(itertools.islice(patterns_by_logistic_weight(128), 8))
    prefix_ok = prefix == [(), (1,), (2,), (3,), (1, 2), (4,), (1, 3), (5,)]
    cfg = ExperimentConfig(snr_a_db=12.0, jammer_sinr_db_list=[-2.0, 2.0], initial_state="J",
                           strategies=["baseline_awgn", "anchored"], trials=128, stop_errors=20,
                           max_queries=20_000, master_seed=4)
    same = _first_columns(run_sweep(cfg.replace(threads=1))) == \
        _first_columns(run_sweep(cfg.replace(threads=4)))
    ok = all(v == 1000 for v in one_query.values()) and prefix_ok and same
    report("decoder sanity", ok,
           f"noiseless single-query decodes {one_query} of 1000; prefix "
           f"{'matches' if prefix_ok else prefix}; 1 vs 4 threads "
           f"{'identical' if same else 'DIFFER'}")
    assert ok


def test_code_validity(report):
    details, ok = [], True
    for name in ("rlc", "ca_polar"):
        code = code_from_selector(name, 128, 105, seed=0)
        orth = not matmul(code.generator, code.parity_check.T).any()
        r = rank(code.generator)
        ok &= orth and r == 105
        details.append(f"{code.label}: G.H^T=0 {orth}, rank {r}")
    small = code_from_selector("rlc", 16, 8, seed=2)
    codewords = {encode(small, np.array(m, dtype=np.uint8)).tobytes()
                 for m in itertools.product((0, 1), repeat=8)}
    members = {w.tobytes() for w in
               (np.array([(v >> i) & 1 for i in range(16)], dtype=np.uint8) for v in range(1 << 16))
               if is_member(small, w)}
    exhaustive = len(codewords) == 256 and members == codewords
    ok &= exhaustive
    details.append(f"[16,8] codeword set {'matches' if exhaustive else 'MISMATCH'} "
                   f"({len(members)} members)")
    report("code validity", ok, "; ".join(details))
    assert ok
