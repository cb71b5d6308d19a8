"""Monte Carlo experiments: BLER sweeps, genie studies and posterior curves.

Every frame draws from its own generator keyed by ``(master_seed,
frame_index)``, so all strategies at a sweep point see the same messages,
jammer states and noise (common random numbers), and results do not depend
on how frames are spread over worker threads.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .channel import SINR_CONVENTIONS, ChannelParams, JamState, frame_rng, transmit
from .codes import LinearCode, code_from_selector, encode
from .inference import (AnchorConfig, blended_llr, estimator_confusion,
                        exact_posterior_smoothing, llr_awgn, llr_jam,
                        posterior_pointwise, refine_posteriors)
from .orbgrand import DecoderConfig, decode

log = logging.getLogger(__name__)

STRATEGIES = ("baseline_awgn", "pointwise", "anchored", "exact_smoothing", "genie")
GENIE_SAMPLING = ("exact", "bernoulli")
INITIAL_STATES = ("stationary", "A", "J")

CSV_COLUMNS = [
    "strategy", "code_label", "n", "k", "snr_a_db", "jammer_sinr_db", "b", "g",
    "anchor_threshold", "max_queries", "trials", "block_errors", "bler", "bler_ci95",
    "mean_queries", "abandonment_rate", "est_fn_rate", "est_fp_rate", "master_seed",
    "wall_seconds",
]


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class GenieConfig:
    fp_rate: float = 0.0
    fn_rate: float = 0.0

    def __post_init__(self):
        for name in ("fp_rate", "fn_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}", name)

    @property
    def label(self) -> str:
        return f"genie(fp={self.fp_rate:g},fn={self.fn_rate:g})"


@dataclass
class ExperimentConfig:
    """Flat experiment description; every field maps to one JSON key."""

    code: str = "rlc"
    n: int = 128
    k: int = 105
    code_seed: int = 0
    snr_a_db: float = 12.0
    jammer_sinr_db_list: list = field(default_factory=list)
    sinr_convention: str = "sigma2_v"
    initial_state: str = "stationary"
    b: float = 0.01
    g: float = 0.25
    llr_strategy: str = "baseline_awgn"
    strategies: list = field(default_factory=list)
    anchor_threshold: float = 0.2
    max_propagation: int | None = None
    max_queries: int = 1_000_000
    max_logistic_weight: int | None = None
    trials: int = 10_000
    stop_errors: int | None = 100
    master_seed: int = 0
    genie_fp_rate: float = 0.0
    genie_fn_rate: float = 0.0
    genie_sampling: str = "exact"
    genie_rates: list = field(default_factory=list)
    threads: int = 1
    batch_size: int = 64

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.code not in ("rlc", "ca_polar"):
            raise ConfigError(f"code must be 'rlc' or 'ca_polar', got {self.code!r}", "code")
        if self.llr_strategy not in STRATEGIES:
            raise ConfigError(f"llr_strategy must be one of {STRATEGIES}", "llr_strategy")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise ConfigError(f"strategies entries must be among {STRATEGIES}", "strategies")
        if self.sinr_convention not in SINR_CONVENTIONS:
            raise ConfigError(f"sinr_convention must be one of {SINR_CONVENTIONS}",
                              "sinr_convention")
        if self.initial_state not in INITIAL_STATES:
            raise ConfigError(f"initial_state must be one of {INITIAL_STATES}", "initial_state")
        if self.genie_sampling not in GENIE_SAMPLING:
            raise ConfigError(f"genie_sampling must be one of {GENIE_SAMPLING}",
                              "genie_sampling")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1", "trials")
        if self.max_queries < 1:
            raise ConfigError("max_queries must be >= 1", "max_queries")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1", "batch_size")
        if self.threads < 0:
            raise ConfigError("threads must be >= 0", "threads")
        if not 0.0 < self.anchor_threshold < 1.0:
            raise ConfigError("anchor_threshold must lie in (0, 1)", "anchor_threshold")
        for name in ("b", "g"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]", name)
        if self.b + self.g == 0:
            raise ConfigError("b and g cannot both be zero", "b")
        if not isinstance(self.jammer_sinr_db_list, list):
            raise ConfigError("jammer_sinr_db_list must be a list", "jammer_sinr_db_list")
        for rate in self.genie_rates:
            if not (isinstance(rate, (list, tuple)) and len(rate) == 2):
                raise ConfigError("genie_rates entries must be [fp_rate, fn_rate]", "genie_rates")
        try:
            GenieConfig(self.genie_fp_rate, self.genie_fn_rate)
        except ConfigError as exc:
            raise ConfigError(str(exc).replace(exc.field, f"genie_{exc.field}", 1),
                              f"genie_{exc.field}") from None
        for fp, fn in self.genie_rates:
            GenieConfig(fp, fn)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return config_from_dict(cls, data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @property
    def decoder(self) -> DecoderConfig:
        return DecoderConfig(self.max_queries, self.max_logistic_weight)

    @property
    def anchor(self) -> AnchorConfig:
        return AnchorConfig(self.anchor_threshold, self.max_propagation)

    @property
    def genie(self) -> GenieConfig:
        return GenieConfig(self.genie_fp_rate, self.genie_fn_rate)

    def channel(self, sinr_db: float) -> ChannelParams:
        return ChannelParams.from_db(self.snr_a_db, sinr_db, self.b, self.g,
                                     self.sinr_convention)

    @property
    def first_state(self) -> JamState | None:
        return None if self.initial_state == "stationary" else JamState[self.initial_state]

    def strategy_label(self) -> str:
        if self.llr_strategy == "genie":
            return self.genie.label
        return self.llr_strategy


@dataclass
class CurveConfig:
    """Parameters of the posterior and LLR curve tables."""

    snr_a_db: float = 12.0
    snr_j_db_list: list = field(default_factory=lambda: [0.0, 2.0, 4.0, 6.0])
    sinr_convention: str = "sigma2_j"
    b: float = 0.01
    g: float = 0.25
    grid_max: float = 3.0
    grid_points: int = 301
    frames: int = 0
    bins: int = 30
    anchor_threshold: float = 0.2
    master_seed: int = 0

    def __post_init__(self):
        if self.grid_points < 2 or self.grid_max <= 0:
            raise ConfigError("grid needs grid_points >= 2 and grid_max > 0", "grid_points")
        if self.frames < 0:
            raise ConfigError("frames must be >= 0", "frames")
        if self.bins < 1:
            raise ConfigError("bins must be >= 1", "bins")
        if self.sinr_convention not in SINR_CONVENTIONS:
            raise ConfigError(f"sinr_convention must be one of {SINR_CONVENTIONS}",
                              "sinr_convention")
        if not 0.0 < self.anchor_threshold < 1.0:
            raise ConfigError("anchor_threshold must lie in (0, 1)", "anchor_threshold")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.grid_max, self.grid_points)


def config_from_dict(cls, data: dict):
    """Instantiate a flat config dataclass, naming the offending key on failure."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    fields_ = {f.name: f.type for f in dataclasses.fields(cls)}
    clean = {}
    for key, value in data.items():
        if key not in fields_:
            raise ConfigError(f"unknown config key {key!r}", key)
        try:
            clean[key] = _coerce(value, fields_[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", key) from None
    try:
        return cls(**clean)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _coerce(value, annotation: str):
    # Dataclass annotations are strings under postponed evaluation.
    optional = "None" in annotation
    if value is None:
        if optional:
            return None
        raise TypeError("null not allowed")
    base = annotation.replace(" | None", "")
    if base == "int":
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
            raise TypeError(f"expected integer, got {value!r}")
        return int(value)
    if base == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError(f"expected number, got {value!r}")
        return float(value)
    if base == "str":
        if not isinstance(value, str):
            raise TypeError(f"expected string, got {value!r}")
        return value
    if base == "list":
        if not isinstance(value, list):
            raise TypeError(f"expected list, got {value!r}")
        return value
    return value


@dataclass
class SweepRow:
    strategy: str
    code_label: str
    n: int
    k: int
    snr_a_db: float
    jammer_sinr_db: float
    b: float
    g: float
    anchor_threshold: float
    max_queries: int
    trials: int
    block_errors: int
    bler: float
    bler_ci95: float
    mean_queries: float
    abandonment_rate: float
    est_fn_rate: float | None
    est_fp_rate: float | None
    master_seed: int
    wall_seconds: float

    def as_csv(self) -> list:
        out = []
        for name in CSV_COLUMNS:
            v = getattr(self, name)
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(repr(v) if name != "wall_seconds" else f"{v:.3f}")
            else:
                out.append(str(v))
        return out


def wilson_halfwidth(errors: int, trials: int, z: float = 1.959963984540054) -> float:
    """Half-width of the 95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return float("nan")
    p = errors / trials
    denom = 1.0 + z * z / trials
    return z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom


# ---------------------------------------------------------------------------
# per-frame simulation


@dataclass
class FrameResult:
    error: bool
    queries: int
    abandoned: bool
    n_jam: int
    n_missed: int
    n_clean: int
    n_false: int


def make_llrs(received, states, params: ChannelParams, strategy: str,
              anchor: AnchorConfig, genie: GenieConfig | None = None,
              genie_rng: np.random.Generator | None = None, genie_sampling: str = "exact"):
    """LLRs for one frame under ``strategy``, plus the jamming estimate used (or None)."""
    y = np.asarray(received, dtype=np.float64)
    if strategy == "baseline_awgn":
        return llr_awgn(y, params.sigma2_a), None
    if strategy == "pointwise":
        p = posterior_pointwise(np.abs(y), params)
    elif strategy == "anchored":
        p = refine_posteriors(posterior_pointwise(np.abs(y), params), params, anchor)
    elif strategy == "exact_smoothing":
        p = exact_posterior_smoothing(y, params)
    elif strategy == "genie":
        p = genie_assignment(states, genie or GenieConfig(), genie_rng, genie_sampling)
        return np.where(p == 1, llr_jam(y, params.sigma2_j), llr_awgn(y, params.sigma2_a)), p
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return blended_llr(y, p, params), p


def _corrupt_count(rate: float, count: int, rng: np.random.Generator, sampling: str) -> int:
    if sampling == "bernoulli":
        return int(rng.binomial(count, rate))
    # Stochastic rounding keeps the realised proportion unbiased; frames hold
    # only a handful of jammed bits, so plain rounding would erase small rates.
    target = rate * count
    base = math.floor(target)
    return int(base + (rng.random() < target - base))


def genie_assignment(states, genie: GenieConfig, rng: np.random.Generator | None,
                     sampling: str = "exact") -> np.ndarray:
    """0/1 vector saying which LLR formula each index gets.

    Starts from the true states, then relabels ``fp_rate`` of the clean
    indices as jammed and ``fn_rate`` of the jammed indices as clean.
    """
    states = np.asarray(states)
    out = (states == 1).astype(np.uint8)
    if genie.fp_rate == 0 and genie.fn_rate == 0:
        return out
    if rng is None:
        raise ValueError("genie corruption needs a random generator")
    clean = np.flatnonzero(states == 0)
    jammed = np.flatnonzero(states == 1)
    n_fp = _corrupt_count(genie.fp_rate, clean.size, rng, sampling)
    n_fn = _corrupt_count(genie.fn_rate, jammed.size, rng, sampling)
    if n_fp:
        out[rng.choice(clean, size=n_fp, replace=False)] = 1
    if n_fn:
        out[rng.choice(jammed, size=n_fn, replace=False)] = 0
    return out


def simulate_frame(code: LinearCode, params: ChannelParams, master_seed: int, index: int,
                   initial: JamState | None = None):
    """Message, codeword and channel output of frame ``index``."""
    rng = frame_rng(master_seed, index, 0)
    message = rng.integers(0, 2, size=code.k, dtype=np.uint8)
    codeword = encode(code, message)
    return codeword, transmit(codeword, params, rng, initial=initial)


def run_frame(cfg: ExperimentConfig, code: LinearCode, params: ChannelParams,
              index: int, genie: GenieConfig | None = None) -> FrameResult:
    codeword, rec = simulate_frame(code, params, cfg.master_seed, index, cfg.first_state)
    genie_rng = frame_rng(cfg.master_seed, index, 1)
    llrs, est = make_llrs(rec.received, rec.states, params, cfg.llr_strategy, cfg.anchor,
                          genie or cfg.genie, genie_rng, cfg.genie_sampling)
    out = decode(llrs, code, cfg.decoder)
    error = out.abandoned or not np.array_equal(out.codeword, codeword)
    jam = rec.states == 1
    n_jam = int(jam.sum())
    if est is None:
        missed = false = 0
    else:
        flagged = est >= cfg.anchor_threshold
        missed = int(np.sum(jam & ~flagged))
        false = int(np.sum(~jam & flagged))
    return FrameResult(error, out.queries, out.abandoned, n_jam, missed,
                       code.n - n_jam, false)


def _workers(threads: int) -> int:
    if threads == 0:
        return os.cpu_count() or 1
    return threads


def run_bler_point(cfg: ExperimentConfig, sinr_db: float, code: LinearCode | None = None,
                   genie: GenieConfig | None = None) -> SweepRow:
    """Estimate the BLER of ``cfg.llr_strategy`` at one jammer SINR.

    Frames run in batches; within a batch they may run concurrently, but
    results are consumed in frame order, so the stopping point (trial cap
    or ``stop_errors`` block errors, whichever comes first) is the same for
    any thread count.
    """
    code = code or code_from_selector(cfg.code, cfg.n, cfg.k, cfg.code_seed)
    params = cfg.channel(sinr_db)
    start = time.perf_counter()
    trials = errors = queries = abandoned = 0
    n_jam = n_missed = n_clean = n_false = 0
    workers = _workers(cfg.threads)
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        next_index = 0
        done = False
        while not done and next_index < cfg.trials:
            batch = range(next_index, min(next_index + cfg.batch_size, cfg.trials))
            next_index = batch.stop
            if pool is None:
                results = [run_frame(cfg, code, params, i, genie) for i in batch]
            else:
                results = list(pool.map(lambda i: run_frame(cfg, code, params, i, genie), batch))
            for r in results:
                trials += 1
                errors += r.error
                queries += r.queries
                abandoned += r.abandoned
                n_jam += r.n_jam
                n_missed += r.n_missed
                n_clean += r.n_clean
                n_false += r.n_false
                if cfg.stop_errors and errors >= cfg.stop_errors:
                    done = True
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    has_est = cfg.llr_strategy != "baseline_awgn"
    row = SweepRow(
        strategy=(genie.label if genie else cfg.strategy_label()),
        code_label=code.label, n=code.n, k=code.k, snr_a_db=cfg.snr_a_db,
        jammer_sinr_db=float(sinr_db), b=cfg.b, g=cfg.g,
        anchor_threshold=cfg.anchor_threshold, max_queries=cfg.max_queries,
        trials=trials, block_errors=errors, bler=errors / trials,
        bler_ci95=wilson_halfwidth(errors, trials), mean_queries=queries / trials,
        abandonment_rate=abandoned / trials,
        est_fn_rate=(n_missed / n_jam if has_est and n_jam else None),
        est_fp_rate=(n_false / n_clean if has_est and n_clean else None),
        master_seed=cfg.master_seed, wall_seconds=time.perf_counter() - start,
    )
    log.info("%s sinr=%g: %d/%d errors (bler=%.3g)", row.strategy, sinr_db, errors, trials,
             row.bler)
    return row


class ResultWriter:
    """Single-writer CSV sink that flushes after every row."""

    def __init__(self, path):
        self.path = Path(path)
        try:
            self._fh = self.path.open("w", newline="")
        except OSError as exc:
            raise OSError(f"cannot open results file {self.path}: {exc}") from exc
        self._csv = csv.writer(self._fh)
        self._csv.writerow(CSV_COLUMNS)
        self._fh.flush()

    def write(self, row: SweepRow) -> None:
        try:
            self._csv.writerow(row.as_csv())
            self._fh.flush()
        except OSError as exc:
            raise OSError(f"failed writing {self.path}: {exc}") from exc

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_json(path, cfg: ExperimentConfig, rows: list[SweepRow]) -> None:
    doc = {"software": "jamllr", "version": __version__, "config": cfg.to_dict(),
           "rows": [dataclasses.asdict(r) for r in rows]}
    try:
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc


def run_sweep(cfg: ExperimentConfig, out_path=None, json_path=None) -> list[SweepRow]:
    """Run ``run_bler_point`` over every SINR in the config, writing rows as they finish.

    When ``cfg.strategies`` is non-empty each listed strategy is swept in
    turn on the same frames; otherwise only ``cfg.llr_strategy``.
    """
    code = code_from_selector(cfg.code, cfg.n, cfg.k, cfg.code_seed)
    writer = ResultWriter(out_path) if out_path else None
    rows = []
    try:
        for strategy in cfg.strategies or [cfg.llr_strategy]:
            point_cfg = cfg.replace(llr_strategy=strategy)
            for sinr in cfg.jammer_sinr_db_list:
                row = run_bler_point(point_cfg, float(sinr), code)
                rows.append(row)
                if writer:
                    writer.write(row)
    finally:
        if writer:
            writer.close()
    if json_path:
        write_json(json_path, cfg, rows)
    return rows


def run_genie_sweep(cfg: ExperimentConfig, genie_rates: list[GenieConfig] | None = None,
                    out_path=None, json_path=None) -> list[SweepRow]:
    """One row per (SINR, genie corruption) pair, all on common frames."""
    if cfg.llr_strategy != "genie":
        cfg = cfg.replace(llr_strategy="genie")
    if genie_rates is None:
        genie_rates = [GenieConfig(fp, fn) for fp, fn in cfg.genie_rates] or [cfg.genie]
    code = code_from_selector(cfg.code, cfg.n, cfg.k, cfg.code_seed)
    writer = ResultWriter(out_path) if out_path else None
    rows = []
    try:
        for sinr in cfg.jammer_sinr_db_list:
            for genie in genie_rates:
                row = run_bler_point(cfg, float(sinr), code, genie)
                rows.append(row)
                if writer:
                    writer.write(row)
    finally:
        if writer:
            writer.close()
    if json_path:
        write_json(json_path, cfg, rows)
    return rows


def sinr_at_bler(rows: list[SweepRow], target: float) -> float | None:
    """SINR where the BLER curve crosses ``target``, by linear interpolation in log10(BLER).

    Uses the first crossing when walking up in SINR; ``None`` if the curve
    never brackets the target.
    """
    pts = sorted((r.jammer_sinr_db, r.bler) for r in rows)
    lt = math.log10(target)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if y0 >= target >= y1 and y0 > 0:
            if y1 <= 0:
                return x1
            l0, l1 = math.log10(y0), math.log10(y1)
            if l0 == l1:
                return x0
            return x0 + (l0 - lt) * (x1 - x0) / (l0 - l1)
    return None


# ---------------------------------------------------------------------------
# curve extraction


def pointwise_curves(snr_a_db: float, snr_j_db_list, grid, b: float = 0.01, g: float = 0.25,
                     convention: str = "sigma2_j") -> list[dict]:
    """Rows ``{mag, p_j@<snr>...}`` of the single-observation jamming posterior."""
    grid = np.asarray(grid, dtype=np.float64)
    cols = {}
    for snr_j in snr_j_db_list:
        params = ChannelParams.from_db(snr_a_db, snr_j, b, g, convention)
        cols[f"p_j@{snr_j:g}dB"] = posterior_pointwise(grid, params)
    return [{"mag": float(m), **{k: float(v[i]) for k, v in cols.items()}}
            for i, m in enumerate(grid)]


def llr_curves(snr_a_db: float, snr_j_db: float, grid, b: float = 0.01, g: float = 0.25,
               convention: str = "sigma2_j") -> list[dict]:
    """LLR magnitude of the AWGN, jammed and blended-pointwise formulas over ``|y|``."""
    params = ChannelParams.from_db(snr_a_db, snr_j_db, b, g, convention)
    grid = np.asarray(grid, dtype=np.float64)
    p = posterior_pointwise(grid, params)
    return [{"mag": float(m),
             "llr_awgn": float(llr_awgn(m, params.sigma2_a)),
             "llr_jam": float(llr_jam(m, params.sigma2_j)),
             "llr_blended": float(blended_llr(m, p[i], params)),
             "p_j": float(p[i])}
            for i, m in enumerate(grid)]


def refined_curves(params: ChannelParams, bin_edges, frames: int, n: int = 128,
                   anchor: AnchorConfig = AnchorConfig(), master_seed: int = 0) -> dict:
    """Mean refined jamming estimate per ``|y|`` bin, split by true state.

    Returns arrays ``centers``, ``mean_j``, ``count_j``, ``mean_a``, ``count_a``
    and the matching first-step means ``first_mean_j``, ``first_mean_a``, along
    with the pooled first-step and refined confusion rates.
    """
    edges = np.asarray(bin_edges, dtype=np.float64)
    nb = edges.size - 1
    sums = np.zeros((2, nb))
    first_sums = np.zeros((2, nb))
    counts = np.zeros((2, nb), dtype=np.int64)
    first, refined, truth = [], [], []
    for i in range(frames):
        rng = frame_rng(master_seed, i, 0)
        rec = transmit(rng.integers(0, 2, size=n, dtype=np.uint8), params, rng)
        mag = np.abs(rec.received)
        p0 = posterior_pointwise(mag, params)
        p1 = refine_posteriors(p0, params, anchor)
        first.append(p0)
        refined.append(p1)
        truth.append(rec.states)
        idx = np.digitize(mag, edges) - 1
        ok = (idx >= 0) & (idx < nb)
        for s in (0, 1):
            sel = ok & (rec.states == s)
            np.add.at(sums[s], idx[sel], p1[sel])
            np.add.at(first_sums[s], idx[sel], p0[sel])
            np.add.at(counts[s], idx[sel], 1)
    first = np.concatenate(first)
    refined = np.concatenate(refined)
    truth = np.concatenate(truth)
    with np.errstate(invalid="ignore"):
        means = sums / counts
        first_means = first_sums / counts
    return {
        "centers": 0.5 * (edges[1:] + edges[:-1]),
        "mean_j": means[1], "count_j": counts[1],
        "mean_a": means[0], "count_a": counts[0],
        "first_mean_j": first_means[1], "first_mean_a": first_means[0],
        "first_confusion": estimator_confusion(first, truth, anchor.threshold),
        "refined_confusion": estimator_confusion(refined, truth, anchor.threshold),
        "bits": int(truth.size),
    }


def emit_posterior_curves(params: ChannelParams, snr_j_db_list, grid, frames: int = 0,
                          bin_edges=None, master_seed: int = 0,
                          anchor: AnchorConfig = AnchorConfig(),
                          convention: str = "sigma2_j") -> list[dict]:
    """Single-observation curves over ``grid``; with ``frames > 0`` also the refined, state-split curves.

    ``params`` supplies the AWGN variance and chain; each entry of
    ``snr_j_db_list`` sets the jammed-state level under ``convention``.
    """
    snr_a_db = -10.0 * math.log10(params.sigma2_a)
    rows = []
    for snr_j in snr_j_db_list:
        p = ChannelParams.from_db(snr_a_db, snr_j, params.b, params.g, convention)
        first = posterior_pointwise(np.asarray(grid, dtype=np.float64), p)
        for m, v in zip(grid, first):
            rows.append({"curve": "pointwise", "snr_j_db": float(snr_j), "mag": float(m),
                         "state": "", "p_j": float(v), "count": ""})
        if frames > 0:
            edges = np.asarray(bin_edges if bin_edges is not None
                               else np.linspace(0.0, 3.0, 31))
            res = refined_curves(p, edges, frames, anchor=anchor, master_seed=master_seed)
            for state, mean, count in (("J", res["mean_j"], res["count_j"]),
                                       ("A", res["mean_a"], res["count_a"])):
                for c, v, cnt in zip(res["centers"], mean, count):
                    rows.append({"curve": "refined", "snr_j_db": float(snr_j), "mag": float(c),
                                 "state": state, "p_j": (float(v) if cnt else ""),
                                 "count": int(cnt)})
    return rows


def write_table(path, rows: list[dict]) -> None:
    if not rows:
        Path(path).write_text("")
        return
    try:
        with Path(path).open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc
