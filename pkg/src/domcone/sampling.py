"""Seeded, reproducible random sampling.

All randomness in the package flows through a counter-based Philox
generator so that runs are deterministic for a given seed regardless of
evaluation order.
"""

from __future__ import annotations

import numpy as np

from .symmat import SymMatrix, eigvals_sym


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for ``seed``; extra ints derive independent child streams."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def goe_unnormalized(rng: np.random.Generator, n: int) -> SymMatrix:
    """Symmetrized Gaussian matrix (Gaussian orthogonal ensemble)."""
    g = rng.standard_normal((n, n))
    return SymMatrix._wrap(0.5 * (g + g.T))


def goe_matrix(rng: np.random.Generator, n: int, radius: float = 1.0) -> SymMatrix:
    """GOE sample normalized to infinity norm ``radius``.

    Rotation-invariant sampling: the eigenvector basis is Haar-distributed,
    which matches the rotationally invariant objects under test.
    """
    while True:
        x = goe_unnormalized(rng, n)
        ev = eigvals_sym(x)
        nrm = max(-ev[0], ev[-1])
        if nrm > 1e-12:
            return x * (radius / nrm)


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish orthogonal matrix from QR of a Gaussian matrix (sign-fixed)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_psd(rng: np.random.Generator, n: int, scale: float = 1.0) -> SymMatrix:
    """Random positive semidefinite matrix G^T G, scaled."""
    g = rng.standard_normal((n, n))
    return SymMatrix(scale * (g.T @ g))


def random_nsd(rng: np.random.Generator, n: int, scale: float = 1.0) -> SymMatrix:
    """Random negative semidefinite matrix."""
    return -random_psd(rng, n, scale)


def random_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        v = rng.standard_normal(n)
        nrm = np.linalg.norm(v)
        if nrm > 1e-12:
            return v / nrm


def log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    """Sample log-uniformly from [lo, hi], lo > 0."""
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
