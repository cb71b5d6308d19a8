"""Random linear codes and CRC-aided polar codes as explicit GF(2) matrices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from . import gf2


@dataclass(frozen=True, eq=False)
class LinearCode:
    """Binary linear block code given by generator and parity-check matrices."""

    generator: np.ndarray
    parity_check: np.ndarray
    label: str = ""
    columns: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = gf2.as_bits(self.generator)
        h = gf2.as_bits(self.parity_check)
        if g.ndim != 2 or h.ndim != 2 or g.shape[1] != h.shape[1]:
            raise ValueError(f"incompatible shapes G{g.shape} and H{h.shape}")
        g.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "generator", g)
        object.__setattr__(self, "parity_check", h)
        cols = gf2.pack_columns(h)
        cols.setflags(write=False)
        object.__setattr__(self, "columns", cols)

    @property
    def n(self) -> int:
        return self.generator.shape[1]

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    def validate(self) -> None:
        """Raise ``ValueError`` unless G has full rank and annihilates H."""
        if gf2.rank(self.generator) != self.k:
            raise ValueError(f"{self.label}: generator is rank deficient")
        if gf2.rank(self.parity_check) != self.n - self.k:
            raise ValueError(f"{self.label}: parity-check matrix has wrong rank")
        if gf2.matmul(self.generator, self.parity_check.T).any():
            raise ValueError(f"{self.label}: G @ H^T != 0")

    @classmethod
    def from_generator(cls, generator, label: str = "") -> "LinearCode":
        g = gf2.as_bits(generator)
        if gf2.rank(g) != g.shape[0]:
            raise ValueError(f"{label}: generator is rank deficient")
        return cls(generator=g, parity_check=gf2.nullspace(g), label=label)


def encode(code: LinearCode, message) -> np.ndarray:
    m = np.asarray(message)
    if m.shape != (code.k,):
        raise ValueError(f"message length {m.shape} does not match k={code.k}")
    return gf2.matmul(m[None, :], code.generator)[0]


def syndrome(code: LinearCode, word) -> np.ndarray:
    w = np.asarray(word)
    if w.shape != (code.n,):
        raise ValueError(f"word length {w.shape} does not match n={code.n}")
    return gf2.packed_syndrome(code.columns, w)


def is_member(code: LinearCode, word) -> bool:
    return not syndrome(code, word).any()


def make_rlc(n: int, k: int, rng: np.random.Generator) -> LinearCode:
    """Random linear code in systematic form ``G = [I_k | P]`` with uniform ``P``."""
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    p = rng.integers(0, 2, size=(k, n - k), dtype=np.uint8)
    g = np.hstack([np.eye(k, dtype=np.uint8), p])
    h = np.hstack([p.T, np.eye(n - k, dtype=np.uint8)])
    return LinearCode(generator=g, parity_check=h, label=f"RLC[{n},{k}]")


# ---------------------------------------------------------------------------
# CRC-aided polar


@lru_cache(maxsize=None)
def polar5g_table() -> dict:
    with resources.files("jamllr.data").joinpath("polar5g.json").open() as fh:
        return json.load(fh)


@dataclass(frozen=True)
class CaPolarSpec:
    """Parameters of a CRC-aided polar code without rate matching.

    ``reliability_order`` lists synthetic channel indices from least to most
    reliable.  ``crc_poly`` holds the CRC generator coefficients from the
    highest degree down, so ``len(crc_poly) == crc_len + 1``.
    """

    n: int
    k: int
    crc_len: int
    reliability_order: tuple[int, ...]
    crc_poly: tuple[int, ...]

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError(f"mother code length must be a power of two, got {self.n}")
        if self.k < 1 or self.k + self.crc_len > self.n:
            raise ValueError(f"k + crc_len must not exceed n (k={self.k}, crc={self.crc_len})")
        if sorted(self.reliability_order) != list(range(self.n)):
            raise ValueError("reliability_order must be a permutation of range(n)")
        if len(self.crc_poly) != self.crc_len + 1 or (self.crc_len and self.crc_poly[0] != 1):
            raise ValueError("crc_poly must have crc_len + 1 coefficients, leading 1")

    @property
    def info_positions(self) -> np.ndarray:
        """Indices carrying message+CRC bits, in ascending order."""
        m = self.k + self.crc_len
        return np.sort(np.asarray(self.reliability_order[self.n - m:]))

    @property
    def frozen_positions(self) -> np.ndarray:
        m = self.k + self.crc_len
        return np.sort(np.asarray(self.reliability_order[:self.n - m]))


def ca_polar_5g(n: int = 128, k: int = 105) -> CaPolarSpec:
    """CA-Polar spec using the 5G NR CRC11 and reliability sequence."""
    table = polar5g_table()
    if n != table["n"]:
        raise ValueError(f"shipped reliability sequence covers n={table['n']} only")
    exps = table["crc11_exponents"]
    deg = max(exps)
    poly = tuple(1 if deg - i in exps else 0 for i in range(deg + 1))
    return CaPolarSpec(n=n, k=k, crc_len=deg, reliability_order=tuple(table["reliability"]),
                       crc_poly=poly)


def crc_remainder(bits, poly) -> np.ndarray:
    """Parity bits of ``bits`` (first bit = highest degree) for generator ``poly``."""
    poly = np.asarray(poly, dtype=np.uint8)
    L = len(poly) - 1
    reg = np.concatenate([np.asarray(bits, dtype=np.uint8), np.zeros(L, dtype=np.uint8)])
    for i in range(len(reg) - L):
        if reg[i]:
            reg[i:i + L + 1] ^= poly
    return reg[len(reg) - L:]


def polar_transform(u) -> np.ndarray:
    """``u @ F^{(x)m}`` over GF(2) with ``F = [[1, 0], [1, 1]]``; self-inverse."""
    x = np.array(u, dtype=np.uint8)
    n = x.size
    half = 1
    while half < n:
        v = x.reshape(-1, 2, half)
        v[:, 0, :] ^= v[:, 1, :]
        half *= 2
    return x


def ca_polar_encode(spec: CaPolarSpec, message) -> np.ndarray:
    """Direct encoder: append CRC, load the reliable channels, apply the transform."""
    message = np.asarray(message, dtype=np.uint8)
    if message.shape != (spec.k,):
        raise ValueError(f"message length {message.shape} does not match k={spec.k}")
    payload = np.concatenate([message, crc_remainder(message, spec.crc_poly)])
    u = np.zeros(spec.n, dtype=np.uint8)
    u[spec.info_positions] = payload
    return polar_transform(u)


def ca_polar_check(spec: CaPolarSpec, word) -> bool:
    """True iff ``word`` has zero frozen bits after the inverse transform and a valid CRC."""
    u = polar_transform(word)
    if u[spec.frozen_positions].any():
        return False
    payload = u[spec.info_positions]
    msg, crc = payload[:spec.k], payload[spec.k:]
    return bool(np.array_equal(crc_remainder(msg, spec.crc_poly), crc))


def make_ca_polar(spec: CaPolarSpec | None = None) -> LinearCode:
    """Matrix form of the CA-Polar code, built by encoding the unit messages."""
    spec = spec or ca_polar_5g()
    g = np.stack([ca_polar_encode(spec, row) for row in np.eye(spec.k, dtype=np.uint8)])
    if gf2.rank(g) != spec.k:
        raise ValueError("CA-Polar construction produced a rank-deficient generator")
    return LinearCode(generator=g, parity_check=gf2.nullspace(g),
                      label=f"CA-Polar[{spec.n},{spec.k}]")


def code_from_selector(kind: str, n: int = 128, k: int = 105, seed: int = 0) -> LinearCode:
    if kind == "rlc":
        return make_rlc(n, k, np.random.default_rng(np.random.SeedSequence([seed, 0xC0DE])))
    if kind == "ca_polar":
        return make_ca_polar(ca_polar_5g(n, k))
    raise ValueError(f"unknown code {kind!r}; expected 'rlc' or 'ca_polar'")


# ---------------------------------------------------------------------------
# text matrix format: one row per line of 0/1 characters, '#' comments


def write_matrix(path, m, header: str | None = None) -> None:
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header.splitlines())
    lines.extend("".join("1" if x else "0" for x in row) for row in gf2.as_bits(m))
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix(path) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if set(line) - {"0", "1"}:
            raise ValueError(f"{path}:{lineno}: expected only 0/1 characters")
        rows.append([int(c) for c in line])
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: empty or ragged matrix")
    return np.array(rows, dtype=np.uint8)
