"""Run configuration, and deterministic seeding for all randomized stages."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import InputError


def stable_rng(*parts) -> random.Random:
    """A generator seeded from a canonical digest of the given parts.

    Seeding Random with a tuple hashes it, and string hashing is
    randomized per process; deriving the seed from a content digest keeps
    every pipeline stage reproducible across runs and machines.
    """
    key = hashlib.sha256(repr(parts).encode()).digest()
    return random.Random(int.from_bytes(key[:8], "big"))


@dataclass(frozen=True)
class RunConfig:
    """Knobs for the witness pipeline and CLI, with documented defaults.

    gamma0_radius: word-ball radius searched for a loxodromic element.
    tuple_retries: attempts allowed to the generic-tuple search.
    tuple_word_len: maximum length of a conjugating word.
    n_max_power: cap on the contraction power of gamma_0.
    safety: fraction of the separation bound used for neighborhood radii.
    precision_bits / max_precision_bits: working and maximal enclosure
    precision for certified real arithmetic.
    grid_samples / adversarial_samples: sampling sizes of the d >= 3
    verifier.
    """

    seed: int = 0
    gamma0_radius: int = 8
    tuple_retries: int = 200
    tuple_word_len: int = 5
    n_max_power: int = 64
    safety: Fraction = Fraction(1, 2)
    precision_bits: int = 64
    max_precision_bits: int = 4096
    grid_samples: int = 10**4
    adversarial_samples: int = 10**3
    verify_samples: int = 2000
    mc_entry_bound: int = 10
    cache_dir: Optional[str] = None

    def __post_init__(self):
        for name in ("gamma0_radius", "tuple_retries", "tuple_word_len", "n_max_power",
                     "precision_bits", "max_precision_bits", "grid_samples",
                     "adversarial_samples", "verify_samples", "mc_entry_bound"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")
        if not 0 < self.safety < 1:
            raise InputError("safety must be in (0, 1)")

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "gamma0_radius": self.gamma0_radius,
            "tuple_retries": self.tuple_retries,
            "tuple_word_len": self.tuple_word_len,
            "n_max_power": self.n_max_power,
            "safety": str(self.safety),
            "precision_bits": self.precision_bits,
            "max_precision_bits": self.max_precision_bits,
            "grid_samples": self.grid_samples,
            "adversarial_samples": self.adversarial_samples,
            "mc_entry_bound": self.mc_entry_bound,
        }
