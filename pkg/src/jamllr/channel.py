"""BPSK over an AWGN channel with a bursty two-state Markov jammer.

State ``A`` adds white Gaussian noise of variance ``sigma2_a``.  State ``J``
adds an independent jammer term of variance ``sigma2_v`` on top of it, so the
total variance while jammed is ``sigma2_a + sigma2_v``.  The state evolves once
per transmitted bit: ``A -> J`` with probability ``b`` and ``J -> A`` with
probability ``g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

SINR_CONVENTIONS = ("sigma2_v", "sigma2_j")


class JamState(IntEnum):
    A = 0
    J = 1


@dataclass(frozen=True)
class ChannelParams:
    """Noise variances and jammer transition probabilities.

    Parameters
    ----------
    sigma2_a : float
        Variance of the background AWGN.
    sigma2_v : float
        Variance of the jammer's injected Gaussian signal.
    b : float
        Per-bit probability of moving from ``A`` to ``J``.
    g : float
        Per-bit probability of moving from ``J`` back to ``A``.
    """

    sigma2_a: float
    sigma2_v: float
    b: float
    g: float

    def __post_init__(self):
        if not (self.sigma2_a > 0 and math.isfinite(self.sigma2_a)):
            raise ValueError(f"sigma2_a must be positive and finite, got {self.sigma2_a}")
        if not (self.sigma2_v >= 0 and math.isfinite(self.sigma2_v)):
            raise ValueError(f"sigma2_v must be non-negative and finite, got {self.sigma2_v}")
        for name in ("b", "g"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    @property
    def sigma2_j(self) -> float:
        return self.sigma2_v + self.sigma2_a

    @classmethod
    def from_db(cls, snr_a_db: float, sinr_db: float, b: float, g: float,
                convention: str = "sigma2_v") -> "ChannelParams":
        """Build parameters from an AWGN SNR and a jammer SINR, both in dB.

        With ``convention="sigma2_v"`` the SINR sets the jammer's own power
        (``sigma2_v = 10**(-sinr/10)``).  With ``"sigma2_j"`` it sets the total
        variance seen in the jammed state, and ``sigma2_v`` is the excess over
        the background noise.
        """
        sigma2_a = snr_db_to_sigma2(snr_a_db)
        level = snr_db_to_sigma2(sinr_db)
        if convention == "sigma2_v":
            sigma2_v = level
        elif convention == "sigma2_j":
            sigma2_v = level - sigma2_a
            if sigma2_v < 0:
                raise ValueError(
                    f"jammed-state SNR {sinr_db} dB exceeds the AWGN SNR {snr_a_db} dB")
        else:
            raise ValueError(f"unknown SINR convention {convention!r}; "
                             f"expected one of {SINR_CONVENTIONS}")
        return cls(sigma2_a=sigma2_a, sigma2_v=sigma2_v, b=b, g=g)


@dataclass(frozen=True)
class FrameRecord:
    bits: np.ndarray
    symbols: np.ndarray
    states: np.ndarray
    received: np.ndarray

    @property
    def n(self) -> int:
        return len(self.bits)


def snr_db_to_sigma2(snr_db: float) -> float:
    """Noise variance for unit-energy BPSK at the given SNR in dB."""
    if not math.isfinite(snr_db):
        raise ValueError(f"SNR must be finite, got {snr_db}")
    return 10.0 ** (-snr_db / 10.0)


def stationary_jam_prob(params: ChannelParams) -> float:
    total = params.b + params.g
    if total == 0:
        raise ValueError("stationary distribution undefined for b = g = 0")
    return params.b / total


def frame_rng(master_seed: int, frame_index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one frame, keyed only by its coordinates.

    Keeping the key free of worker ids or scheduling order is what makes
    parallel runs reproduce serial ones bit for bit.
    """
    return np.random.default_rng(np.random.SeedSequence([master_seed, frame_index, stream]))


def sample_state_sequence(params: ChannelParams, n: int, rng: np.random.Generator,
                          initial: JamState | None = None) -> np.ndarray:
    """Sample ``n`` jammer states (0 = A, 1 = J) as a uint8 array.

    The first state is drawn from the stationary distribution unless
    ``initial`` pins it.  Exactly ``n`` uniforms are consumed either way.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    u = rng.random(n)
    states = np.empty(n, dtype=np.uint8)
    if initial is None:
        state = 1 if u[0] < stationary_jam_prob(params) else 0
    else:
        state = int(initial)
    states[0] = state
    b, g = params.b, params.g
    for i in range(1, n):
        if state == 0:
            state = 1 if u[i] < b else 0
        else:
            state = 0 if u[i] < g else 1
        states[i] = state
    return states


def modulate(bits: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def transmit(bits: np.ndarray, params: ChannelParams, rng: np.random.Generator,
             initial: JamState | None = None) -> FrameRecord:
    """Send ``bits`` through the jammed channel.

    States are sampled first, then one standard normal per bit, scaled by the
    state's standard deviation.  Fixing the draw order means two parameter
    sets given the same generator see the same underlying randomness.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 1 or bits.size == 0:
        raise ValueError("bits must be a non-empty 1-D array")
    symbols = modulate(bits)
    states = sample_state_sequence(params, bits.size, rng, initial=initial)
    z = rng.standard_normal(bits.size)
    sigma = np.where(states == 1, math.sqrt(params.sigma2_j), math.sqrt(params.sigma2_a))
    received = symbols + sigma * z
    return FrameRecord(bits=bits, symbols=symbols, states=states, received=received)
