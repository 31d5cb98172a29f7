"""Shot noise and readout error for simulated projective measurements."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RNG_ALGORITHM = "numpy PCG64 seeded through SeedSequence(seed, *stream)"


@dataclass(frozen=True)
class ShotModel:
    """N repetitions, symmetric readout fidelity eta, and the RNG seed.

    40,000 repetitions matches the coarse scans; fine scans used 160,000.
    """

    repetitions: int = 40_000
    readout_fidelity: float = 0.995
    seed: int = 0
    spam: bool = True

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not 0.5 < self.readout_fidelity <= 1.0:
            raise ValueError("readout_fidelity must lie in (0.5, 1]")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")

    def metadata(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "readout_fidelity": self.readout_fidelity,
            "seed": self.seed,
            "spam": self.spam,
            "rng": RNG_ALGORITHM,
        }


def generator(seed: int, *stream: int) -> np.random.Generator:
    """Deterministic generator for one record; ``stream`` separates records."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def effective_probability(p_true, eta: float):
    """Probability of reading 1 after a symmetric flip with probability 1 - eta."""
    p = np.asarray(p_true, dtype=float)
    return eta * p + (1.0 - eta) * (1.0 - p)


def observe(p_true, model: ShotModel, stream: tuple[int, ...] = ()):
    """Binomial estimate of ``p_true`` and its standard error.

    Accepts a scalar or an array of probabilities; an array draws one
    independent count per entry from the same record stream.
    """
    p = np.asarray(p_true, dtype=float)
    if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
        raise ValueError("probabilities must lie in [0, 1]")
    p = np.clip(p, 0.0, 1.0)
    p_eff = effective_probability(p, model.readout_fidelity) if model.spam else p
    counts = generator(model.seed, *stream).binomial(model.repetitions, p_eff)
    p_hat = counts / model.repetitions
    std_err = np.sqrt(p_hat * (1.0 - p_hat) / model.repetitions)
    if np.ndim(p_true) == 0:
        return float(p_hat), float(std_err)
    return p_hat, std_err


def distinguishability(repetitions: float, readout_fidelity: float = 0.995) -> float:
    """Smallest resolvable probability difference: 2 standard errors at p = 1/2.

    The readout flip leaves p = 1/2 fixed, so eta does not enter.
    """
    if not 0.5 < readout_fidelity <= 1.0:
        raise ValueError("readout_fidelity must lie in (0.5, 1]")
    if repetitions <= 0:
        raise ValueError("repetitions must be positive")
    if math.isinf(repetitions):
        return 0.0
    return 2.0 * math.sqrt(0.25 / repetitions)
