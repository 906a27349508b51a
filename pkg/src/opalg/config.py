"""Tolerance and reproducibility configuration.

All randomness in the package flows from ``rng_seed``; substreams are derived
from stable string labels so independent operations cannot perturb each other.
"""

import hashlib
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class ToleranceConfig:
    structural_tol: float = 1e-10
    norm_tol: float = 1e-8
    psd_tol: float = 1e-10
    opt_starts: int = 32
    opt_iters: int = 500
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("structural_tol", "norm_tol", "psd_tol"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.opt_starts < 1:
            raise ValueError("opt_starts must be >= 1")
        if self.opt_iters < 1:
            raise ValueError("opt_iters must be >= 1")

    def rng(self, *labels) -> np.random.Generator:
        """Deterministic generator for the substream named by ``labels``."""
        key = []
        for lab in labels:
            digest = hashlib.blake2s(str(lab).encode(), digest_size=8).digest()
            key.append(int.from_bytes(digest, "big"))
        return np.random.default_rng(np.random.SeedSequence(self.rng_seed, spawn_key=key))

    def with_seed(self, seed: int) -> "ToleranceConfig":
        return replace(self, rng_seed=seed)


DEFAULT = ToleranceConfig()
