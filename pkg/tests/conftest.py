"""Shared test helpers: generic random unitary coins."""

from __future__ import annotations

import numpy as np

from dqwalk import Coin, CoinEnsemble


def _draw_haar(rng: np.random.Generator, size: int) -> np.ndarray:
    """Haar-random 2x2 unitaries via QR of complex Ginibre matrices."""
    z = (rng.normal(size=(size, 2, 2)) + 1j * rng.normal(size=(size, 2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    q = q * np.exp(-1j * np.angle(diag))[:, None, :]
    out = np.empty((size, 4), dtype=np.complex128)
    out[:, 0] = q[:, 0, 0]
    out[:, 1] = q[:, 0, 1]
    out[:, 2] = q[:, 1, 0]
    out[:, 3] = q[:, 1, 1]
    return out


def make_haar() -> CoinEnsemble:
    """A user-defined ensemble, exercising the non-catalog constructor path."""
    return CoinEnsemble(name="haar", draw_parameters=_draw_haar)


def haar_coin(rng: np.random.Generator) -> Coin:
    return make_haar().sample(rng)


def haar_coins(rng: np.random.Generator, count: int) -> list[Coin]:
    return [Coin(*map(complex, row)) for row in _draw_haar(rng, count)]
