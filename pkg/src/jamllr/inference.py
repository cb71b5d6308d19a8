"""Jamming posteriors and jamming-aware LLRs.

All functions accept scalars or numpy arrays and broadcast.  LLRs use the
natural log with positive values favouring bit 0 (symbol +1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .channel import ChannelParams, stationary_jam_prob

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
MAX_BRUTEFORCE_LENGTH = 20


@dataclass(frozen=True)
class AnchorConfig:
    """Anchor selection for :func:`refine_posteriors`.

    ``max_propagation`` caps how many indices a front may travel away from
    its anchor; ``None`` lets it run until its value drops below threshold.
    """

    threshold: float = 0.2
    max_propagation: int | None = None

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"anchor threshold must lie in (0, 1), got {self.threshold}")
        if self.max_propagation is not None and self.max_propagation < 0:
            raise ValueError("max_propagation must be non-negative")


def _check_variance(sigma2, name="variance"):
    if np.any(np.asarray(sigma2) <= 0):
        raise ValueError(f"{name} must be positive, got {sigma2}")


def llr_awgn(y, sigma2_a):
    _check_variance(sigma2_a, "sigma2_a")
    return 2.0 * np.asarray(y, dtype=np.float64) / sigma2_a


def llr_jam(y, sigma2_j):
    _check_variance(sigma2_j, "sigma2_j")
    return 2.0 * np.asarray(y, dtype=np.float64) / sigma2_j


def log_folded_pdf(mag, sigma2):
    """Log-density of ``|Y|`` where ``Y = X + N(0, sigma2)`` and ``X = +-1`` equiprobable."""
    mag = np.asarray(mag, dtype=np.float64)
    if np.any(mag < 0):
        raise ValueError("magnitude must be non-negative")
    _check_variance(sigma2, "sigma2")
    a = -((mag - 1.0) ** 2) / (2.0 * sigma2)
    c = -((mag + 1.0) ** 2) / (2.0 * sigma2)
    return np.logaddexp(a, c) - 0.5 * np.log(sigma2) - LOG_SQRT_2PI


def folded_pdf(mag, sigma2):
    return np.exp(log_folded_pdf(mag, sigma2))


def posterior_pointwise(mag, params: ChannelParams, prior_j=None):
    """Probability that a bit was jammed given only its received magnitude.

    ``prior_j`` defaults to the chain's stationary jamming probability.
    Evaluated in the log domain so that magnitudes far from the
    constellation saturate cleanly instead of producing 0/0.
    """
    if prior_j is None:
        prior_j = stationary_jam_prob(params)
    prior_j = np.asarray(prior_j, dtype=np.float64)
    if np.any((prior_j < 0) | (prior_j > 1)):
        raise ValueError("prior_j must lie in [0, 1]")
    log_j = log_folded_pdf(mag, params.sigma2_j)
    log_a = log_folded_pdf(mag, params.sigma2_a)
    with np.errstate(divide="ignore"):
        logit_prior = np.log(prior_j) - np.log1p(-prior_j)
    out = expit(log_j - log_a + logit_prior)
    # A degenerate prior overrides the likelihood entirely.
    out = np.where(prior_j == 0, 0.0, np.where(prior_j == 1, 1.0, out))
    return out[()] if out.ndim == 0 else out


def anchor_update_single(p_neighbor, params: ChannelParams):
    """Jamming probability one step away from a neighbour with jamming probability ``p_neighbor``."""
    p = np.asarray(p_neighbor, dtype=np.float64)
    return params.b * (1.0 - p) + (1.0 - params.g) * p


def _ratio(num, den):
    return num / den if den > 0 else 0.0


def double_anchor_weights(params: ChannelParams) -> tuple[float, float, float]:
    """Weights applied to the (J,J), mixed and (A,A) neighbour-state products.

    Used exactly as written; they are not normalised to sum to one.
    """
    b, g = params.b, params.g
    w_jj = _ratio((1 - g) ** 2, (1 - g) ** 2 + b * g)
    w_mixed = _ratio(1 - g, (1 - g) + (1 - b))
    w_aa = _ratio(b * g, b * g + (1 - b) ** 2)
    return w_jj, w_mixed, w_aa


def anchor_update_double(p_left, p_right, params: ChannelParams):
    """Jamming probability of an index sandwiched between two neighbours."""
    w_jj, w_mixed, w_aa = double_anchor_weights(params)
    pl = np.asarray(p_left, dtype=np.float64)
    pr = np.asarray(p_right, dtype=np.float64)
    return (w_jj * pl * pr
            + w_mixed * (1 - pl) * pr
            + w_mixed * pl * (1 - pr)
            + w_aa * (1 - pl) * (1 - pr))


def refine_posteriors(initial, params: ChannelParams, cfg: AnchorConfig = AnchorConfig()) -> np.ndarray:
    """Propagate jamming evidence outward from anchor indices.

    Anchors are indices whose initial value reaches ``cfg.threshold``; they keep
    their value.  Every run of non-anchors between anchors (or a frame edge)
    is filled from both ends at once.  A front advances one index per step,
    computing the single-neighbour update from the value it just wrote, and
    stays active while that value reaches the threshold.  If two active fronts
    arrive at the same index, it takes the two-neighbour update instead.  An
    index is refined at most once; indices no front reaches keep their
    initial value.
    """
    p = np.asarray(initial, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError("initial posteriors must be a 1-D vector")
    if np.any((p < 0) | (p > 1)):
        raise ValueError("initial posteriors must lie in [0, 1]")
    n = p.size
    out = p.copy()
    if n == 0:
        return out
    thr = cfg.threshold
    cap = n if cfg.max_propagation is None else cfg.max_propagation
    anchor = p >= thr
    if not anchor.any():
        return out
    b, g = params.b, params.g
    w_jj, w_mixed, w_aa = double_anchor_weights(params)
    anchors = np.flatnonzero(anchor).tolist()

    # Non-anchor runs, each as (lo, hi, has_left_anchor, has_right_anchor).
    gaps = []
    if anchors[0] > 0:
        gaps.append((0, anchors[0] - 1, False, True))
    for a, c in zip(anchors, anchors[1:]):
        if c > a + 1:
            gaps.append((a + 1, c - 1, True, True))
    if anchors[-1] < n - 1:
        gaps.append((anchors[-1] + 1, n - 1, True, False))

    for lo, hi, has_left, has_right in gaps:
        left_alive, right_alive = has_left, has_right
        li, ri = lo, hi          # next index each front will write
        steps = 0
        while (left_alive or right_alive) and li <= ri and steps < cap:
            steps += 1
            if left_alive and right_alive and li == ri:
                pl, pr = out[li - 1], out[ri + 1]
                out[li] = (w_jj * pl * pr + w_mixed * (1 - pl) * pr
                           + w_mixed * pl * (1 - pr) + w_aa * (1 - pl) * (1 - pr))
                break
            if left_alive:
                v = b * (1 - out[li - 1]) + (1 - g) * out[li - 1]
                out[li] = v
                li += 1
                left_alive = v >= thr
            if right_alive and li <= ri:
                v = b * (1 - out[ri + 1]) + (1 - g) * out[ri + 1]
                out[ri] = v
                ri -= 1
                right_alive = v >= thr
    np.clip(out, 0.0, 1.0, out=out)
    return out


def blended_llr(y, p_j, params: ChannelParams):
    """Mix the AWGN and jammed-state LLRs by the jamming probability."""
    p_j = np.asarray(p_j, dtype=np.float64)
    return llr_awgn(y, params.sigma2_a) * (1.0 - p_j) + llr_jam(y, params.sigma2_j) * p_j


def log_emission(y, sigma2):
    """Log-density of ``y`` under state variance ``sigma2``, marginalised over the two symbols."""
    y = np.asarray(y, dtype=np.float64)
    return (np.logaddexp(-((y - 1.0) ** 2) / (2.0 * sigma2),
                         -((y + 1.0) ** 2) / (2.0 * sigma2))
            - math.log(2.0) - 0.5 * math.log(sigma2) - LOG_SQRT_2PI)


def _log_chain(params: ChannelParams):
    pi_j = stationary_jam_prob(params)
    with np.errstate(divide="ignore"):
        log_init = np.log(np.array([1.0 - pi_j, pi_j]))
        log_trans = np.log(np.array([[1.0 - params.b, params.b],
                                     [params.g, 1.0 - params.g]]))
    return log_init, log_trans


def exact_posterior_bruteforce(received, params: ChannelParams) -> np.ndarray:
    """Exact per-index jamming posterior by enumerating all ``2**n`` state sequences.

    Exponential in ``n``; intended only as a reference for short frames.
    """
    y = np.asarray(received, dtype=np.float64)
    n = y.size
    if n > MAX_BRUTEFORCE_LENGTH:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTEFORCE_LENGTH}, got {n}")
    if n == 0:
        return np.zeros(0)
    log_init, log_trans = _log_chain(params)
    log_e = np.stack([log_emission(y, params.sigma2_a), log_emission(y, params.sigma2_j)])
    seq = np.arange(1 << n, dtype=np.int64)
    prev = seq & 1
    logw = log_init[prev] + log_e[prev, 0]
    for i in range(1, n):
        cur = (seq >> i) & 1
        logw = logw + log_trans[prev, cur] + log_e[cur, i]
        prev = cur
    w = np.exp(logw - logw.max())
    total = w.sum()
    return np.array([w[((seq >> i) & 1) == 1].sum() / total for i in range(n)])


def exact_posterior_smoothing(received, params: ChannelParams) -> np.ndarray:
    """Exact per-index jamming posterior by forward-backward recursion.

    Runs in the log domain with per-step normalisation, so zero transition
    probabilities and far-off-constellation samples stay exact.
    """
    y = np.asarray(received, dtype=np.float64)
    n = y.size
    if n == 0:
        return np.zeros(0)
    log_init, log_trans = _log_chain(params)
    log_e = np.stack([log_emission(y, params.sigma2_a),
                      log_emission(y, params.sigma2_j)], axis=1)

    la = np.empty((n, 2))
    a = log_init + log_e[0]
    la[0] = a - np.logaddexp(a[0], a[1])
    for t in range(1, n):
        a = np.logaddexp(la[t - 1, 0] + log_trans[0], la[t - 1, 1] + log_trans[1]) + log_e[t]
        la[t] = a - np.logaddexp(a[0], a[1])

    lb = np.empty((n, 2))
    lb[-1] = 0.0
    for t in range(n - 2, -1, -1):
        nxt = log_e[t + 1] + lb[t + 1]
        bt = np.logaddexp(log_trans[:, 0] + nxt[0], log_trans[:, 1] + nxt[1])
        lb[t] = bt - np.logaddexp(bt[0], bt[1])

    post = la + lb
    return np.exp(post[:, 1] - np.logaddexp(post[:, 0], post[:, 1]))


def estimator_confusion(estimate, truth, threshold: float):
    """Miss and false-alarm rates of thresholded jamming estimates.

    Returns ``(fn_rate, fp_rate)``; a rate is ``None`` when the truth has no
    jammed (respectively clean) indices to measure it on.
    """
    est = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth)
    if est.shape != truth.shape:
        raise ValueError("estimate and truth must have equal lengths")
    jammed = truth == 1
    flagged = est >= threshold
    n_j = int(jammed.sum())
    n_a = truth.size - n_j
    fn = float(np.sum(jammed & ~flagged)) / n_j if n_j else None
    fp = float(np.sum(~jammed & flagged)) / n_a if n_a else None
    return fn, fp
