"""q-ary PSK over AWGN and per-symbol log-likelihood-ratio vectors.

SNR is Es/N0 in dB with unit symbol energy, so ``N0 = 2 sigma^2`` and each
real dimension of the noise has variance ``sigma^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import RingSpec

__all__ = [
    "Modulation",
    "psk",
    "modulate",
    "transmit_awgn",
    "compute_llr",
    "llr_matrix",
    "sigma_from_snr_db",
    "snr_db_from_sigma",
]


@dataclass(frozen=True)
class Modulation:
    q: int
    constellation: np.ndarray = field(repr=False)  # complex, unit modulus
    labeling: np.ndarray = field(repr=False)  # ring element -> constellation index

    def __post_init__(self):
        if self.constellation.shape != (self.q,) or self.labeling.shape != (self.q,):
            raise ValueError("constellation and labeling must both have q entries")
        if sorted(self.labeling.tolist()) != list(range(self.q)):
            raise ValueError("labeling must be a permutation of 0..q-1")
        if not np.allclose(np.abs(self.constellation), 1.0):
            raise ValueError("constellation points must have unit energy")

    @property
    def points(self) -> np.ndarray:
        """Constellation point of every ring element, in element order."""
        return self.constellation[self.labeling]


def psk(q: int | RingSpec, labeling: Sequence[int] | None = None) -> Modulation:
    """Unit-energy q-PSK with point ``k`` at ``exp(2j*pi*k/q)``.

    The default labeling sends element ``r`` (its integer label) to point ``r``.
    """
    q = q.q if isinstance(q, RingSpec) else int(q)
    pts = np.exp(2j * np.pi * np.arange(q) / q)
    lab = np.arange(q) if labeling is None else np.asarray(labeling, dtype=np.int64)
    return Modulation(q, pts, lab)


def modulate(mod: Modulation, symbols) -> np.ndarray | complex:
    s = np.asarray(symbols, dtype=np.int64)
    out = mod.points[s]
    return complex(out) if out.ndim == 0 else out


def sigma_from_snr_db(snr_db: float) -> float:
    return float(np.sqrt(10.0 ** (-snr_db / 10.0) / 2.0))


def snr_db_from_sigma(sigma: float) -> float:
    return float(-10.0 * np.log10(2.0 * sigma**2))


def transmit_awgn(points, sigma: float, rng: np.random.Generator) -> np.ndarray:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    points = np.asarray(points, dtype=complex)
    noise = rng.normal(0.0, sigma, size=points.shape + (2,))
    return points + noise[..., 0] + 1j * noise[..., 1]


def compute_llr(mod: Modulation, y, sigma: float) -> np.ndarray:
    """``lambda^(r) = log p(y|0)/p(y|r)`` for r = 1..q-1.

    Works on a scalar ``y`` (returns shape ``(q-1,)``) or an array of
    received values (returns ``y.shape + (q-1,)``).
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    y = np.asarray(y, dtype=complex)
    d2 = np.abs(y[..., None] - mod.points) ** 2
    return (d2[..., 1:] - d2[..., :1]) / (2.0 * sigma**2)


def llr_matrix(mod: Modulation, y, sigma: float) -> np.ndarray:
    """LLR blocks for a whole received word, shape ``(n, q-1)``."""
    return compute_llr(mod, np.atleast_1d(y), sigma)
