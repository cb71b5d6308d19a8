"""Command-line entry point: ``jamllr <subcommand> [options]``.

Exit status is 0 on success, 2 for usage or configuration errors and 1 for
failures while running.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .codes import code_from_selector, write_matrix
from .harness import (ConfigError, CurveConfig, ExperimentConfig, GenieConfig,
                      config_from_dict, emit_posterior_curves, llr_curves, make_llrs,
                      run_genie_sweep, run_sweep, simulate_frame, write_table)
from .channel import ChannelParams, frame_rng, snr_db_to_sigma2
from .inference import AnchorConfig
from .orbgrand import decode

log = logging.getLogger("jamllr")


class ConfigFileError(Exception):
    """Configuration problem, already formatted with file/line context."""


def preset_names() -> list[str]:
    return sorted(p.name for p in resources.files("jamllr.presets").iterdir()
                  if p.name.endswith(".json"))


def _resolve_config(path: str) -> tuple[str, str]:
    p = Path(path)
    if p.exists():
        return str(p), p.read_text()
    preset = resources.files("jamllr.presets").joinpath(p.name)
    if preset.is_file():
        return f"<preset {p.name}>", preset.read_text()
    raise ConfigFileError(f"{path}: no such file (bundled presets: {', '.join(preset_names())})")


def _line_of_key(text: str, key: str | None) -> int | None:
    if not key:
        return None
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return lineno
    return None


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def load_config(cls, path: str | None, overrides: dict):
    """Read a flat JSON config, apply overrides, and build ``cls``.

    Errors are re-raised as :class:`ConfigFileError` carrying the file name
    and, when it can be located, the line of the offending key.
    """
    data, name, text = {}, "<command line>", ""
    if path:
        name, text = _resolve_config(path)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigFileError(f"{name}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigFileError(f"{name}: top level must be a JSON object")
        data.pop("_comment", None)
    data.update(overrides)
    try:
        return config_from_dict(cls, data)
    except ConfigError as exc:
        line = _line_of_key(text, exc.field) if exc.field not in overrides else None
        where = f"{name}:{line}" if line else name
        field = f" field {exc.field!r}:" if exc.field else ""
        raise ConfigFileError(f"{where}:{field} {exc}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _key_value(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    return key.strip(), _parse_value(raw)


def _experiment_overrides(args) -> dict:
    out = dict(args.set or [])
    mapping = {
        "seed": "master_seed", "threads": "threads", "trials": "trials",
        "max_queries": "max_queries", "code": "code", "snr_a": "snr_a_db",
        "sinr": "jammer_sinr_db_list", "b": "b", "g": "g", "threshold": "anchor_threshold",
        "initial_state": "initial_state", "sinr_convention": "sinr_convention",
        "stop_errors": "stop_errors",
    }
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[key] = value
    strategy = getattr(args, "strategy", None)
    if strategy:
        names = [s for s in strategy.split(",") if s]
        if len(names) == 1:
            out["llr_strategy"] = names[0]
            out["strategies"] = []
        else:
            out["strategies"] = names
    return out


def _add_common(p: argparse.ArgumentParser, experiment: bool = True) -> None:
    p.add_argument("--config", help="JSON config file or bundled preset name")
    p.add_argument("--out", help="output file")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--set", action="append", type=_key_value, metavar="KEY=VALUE",
                   help="override any config key (repeatable)")
    if experiment:
        p.add_argument("--json", help="also write a JSON mirror of the run")
        p.add_argument("--threads", type=int, help="worker threads (0 = all cores)")
        p.add_argument("--trials", type=int, help="trial cap per sweep point")
        p.add_argument("--stop-errors", type=int, help="stop a point after this many block errors")
        p.add_argument("--max-queries", type=int, help="ORBGRAND abandonment threshold")
        p.add_argument("--strategy", help="LLR strategy, or a comma-separated list")
        p.add_argument("--code", choices=["rlc", "ca_polar"])
        p.add_argument("--snr-a", type=float, help="AWGN SNR in dB")
        p.add_argument("--sinr", type=_float_list, help="comma-separated jammer SINRs in dB")
        p.add_argument("--b", type=float, help="A->J transition probability")
        p.add_argument("--g", type=float, help="J->A transition probability")
        p.add_argument("--threshold", type=float, help="anchor threshold")
        p.add_argument("--initial-state", choices=["stationary", "A", "J"])
        p.add_argument("--sinr-convention", choices=["sigma2_v", "sigma2_j"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jamllr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bler-sweep", help="BLER versus jammer SINR")
    _add_common(p)

    p = sub.add_parser("genie-sweep", help="genie-aided false positive/negative study")
    _add_common(p)
    p.add_argument("--rates", help="semicolon-separated fp:fn pairs, e.g. '0:0;0:0.05;0.4:0'")

    for name, help_ in (("posterior-curves", "jamming posterior versus |y|"),
                        ("llr-curves", "LLR magnitude versus |y|")):
        p = sub.add_parser(name, help=help_)
        _add_common(p, experiment=False)
        p.add_argument("--snr-a", type=float, help="AWGN SNR in dB")
        p.add_argument("--snr-j", type=_float_list, help="comma-separated jammed-state SNRs in dB")
        p.add_argument("--grid-max", type=float)
        p.add_argument("--grid-points", type=int)
        p.add_argument("--b", type=float)
        p.add_argument("--g", type=float)
        if name == "posterior-curves":
            p.add_argument("--frames", type=int,
                           help="simulate this many frames for the refined, state-split curves")
            p.add_argument("--threshold", type=float, help="anchor threshold")

    p = sub.add_parser("decode-frame", help="simulate and decode one frame, print JSON")
    _add_common(p)
    p.add_argument("--frame-index", type=int, default=0)

    p = sub.add_parser("make-code", help="write a code's generator matrix as 0/1 text")
    p.add_argument("--code", choices=["rlc", "ca_polar"], default="rlc")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--k", type=int, default=105)
    p.add_argument("--seed", type=int, default=0, help="code seed (RLC only)")
    p.add_argument("--out", required=True, help="generator matrix file")
    p.add_argument("--parity-out", help="parity-check matrix file")
    return parser


def _curve_config(args) -> CurveConfig:
    overrides = dict(args.set or [])
    for attr, key in (("snr_a", "snr_a_db"), ("snr_j", "snr_j_db_list"), ("grid_max", "grid_max"),
                      ("grid_points", "grid_points"), ("b", "b"), ("g", "g"),
                      ("frames", "frames"), ("threshold", "anchor_threshold"),
                      ("seed", "master_seed")):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    return load_config(CurveConfig, args.config, overrides)


def _require_out(args) -> None:
    if not args.out:
        raise ConfigFileError("--out is required")


def cmd_bler_sweep(args) -> None:
    cfg = load_config(ExperimentConfig, args.config, _experiment_overrides(args))
    _require_out(args)
    rows = run_sweep(cfg, args.out, args.json)
    log.info("wrote %d rows to %s", len(rows), args.out)


def _parse_rates(text: str) -> list[GenieConfig]:
    out = []
    for item in text.split(";"):
        if not item.strip():
            continue
        try:
            fp, fn = (float(x) for x in item.split(":"))
        except ValueError:
            raise ConfigFileError(f"--rates: cannot parse {item!r}; expected fp:fn") from None
        try:
            out.append(GenieConfig(fp, fn))
        except ConfigError as exc:
            raise ConfigFileError(f"--rates: {exc}") from None
    return out


def cmd_genie_sweep(args) -> None:
    overrides = _experiment_overrides(args)
    overrides["llr_strategy"] = "genie"
    overrides.pop("strategies", None)
    cfg = load_config(ExperimentConfig, args.config, overrides)
    _require_out(args)
    rates = _parse_rates(args.rates) if args.rates else None
    run_genie_sweep(cfg, rates, args.out, args.json)


def cmd_posterior_curves(args) -> None:
    cc = _curve_config(args)
    _require_out(args)
    params = ChannelParams(sigma2_a=snr_db_to_sigma2(cc.snr_a_db), sigma2_v=0.0, b=cc.b, g=cc.g)
    rows = emit_posterior_curves(params, cc.snr_j_db_list, cc.grid, frames=cc.frames,
                                 bin_edges=np.linspace(0.0, cc.grid_max, cc.bins + 1),
                                 master_seed=cc.master_seed,
                                 anchor=AnchorConfig(cc.anchor_threshold),
                                 convention=cc.sinr_convention)
    write_table(args.out, rows)


def cmd_llr_curves(args) -> None:
    cc = _curve_config(args)
    _require_out(args)
    rows = []
    for snr_j in cc.snr_j_db_list:
        for r in llr_curves(cc.snr_a_db, snr_j, cc.grid, cc.b, cc.g, cc.sinr_convention):
            rows.append({"snr_j_db": float(snr_j), **r})
    write_table(args.out, rows)


def cmd_decode_frame(args) -> None:
    cfg = load_config(ExperimentConfig, args.config, _experiment_overrides(args))
    if not cfg.jammer_sinr_db_list:
        raise ConfigFileError("decode-frame needs one SINR (--sinr or jammer_sinr_db_list)")
    sinr = float(cfg.jammer_sinr_db_list[0])
    code = code_from_selector(cfg.code, cfg.n, cfg.k, cfg.code_seed)
    params = cfg.channel(sinr)
    codeword, rec = simulate_frame(code, params, cfg.master_seed, args.frame_index,
                                   cfg.first_state)
    llrs, _ = make_llrs(rec.received, rec.states, params, cfg.llr_strategy, cfg.anchor,
                        cfg.genie, frame_rng(cfg.master_seed, args.frame_index, 1),
                        cfg.genie_sampling)
    out = decode(llrs, code, cfg.decoder)
    doc = {
        "code_label": code.label, "strategy": cfg.strategy_label(), "jammer_sinr_db": sinr,
        "frame_index": args.frame_index, "master_seed": cfg.master_seed,
        "jammed_indices": np.flatnonzero(rec.states).tolist(),
        "hard_errors": int(np.sum((llrs < 0).astype(np.uint8) != codeword)),
        "queries": out.queries, "abandoned": out.abandoned,
        "logistic_weight": out.logistic_weight,
        "block_error": bool(out.abandoned or not np.array_equal(out.codeword, codeword)),
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_make_code(args) -> None:
    try:
        code = code_from_selector(args.code, args.n, args.k, args.seed)
    except ValueError as exc:
        raise ConfigFileError(str(exc)) from None
    code.validate()
    header = f"{code.label} generator n={code.n} k={code.k} seed={args.seed}"
    write_matrix(args.out, code.generator, header)
    if args.parity_out:
        write_matrix(args.parity_out, code.parity_check,
                     f"{code.label} parity-check n={code.n} k={code.k} seed={args.seed}")


COMMANDS = {
    "bler-sweep": cmd_bler_sweep,
    "genie-sweep": cmd_genie_sweep,
    "posterior-curves": cmd_posterior_curves,
    "llr-curves": cmd_llr_curves,
    "decode-frame": cmd_decode_frame,
    "make-code": cmd_make_code,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except ConfigFileError as exc:
        print(f"jamllr: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - surface any runtime failure as exit 1
        print(f"jamllr: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
