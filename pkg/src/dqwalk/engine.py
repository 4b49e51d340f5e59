"""Time evolution of the walk on the integer line.

One step splits the coin U into its left-moving part P and right-moving
part Q and routes amplitude accordingly: the new amplitude at site k is

    psi'_k = Q psi_{k-1} + P psi_{k+1}

The support after n steps is the parity-respecting segment
{-n, -n+2, ..., n}; there is no boundary, so the evolution is exactly
unitary for every horizon.

The private block kernel `_evolve_block` evolves many realizations at
once with the same elementwise arithmetic as `step`, which keeps single
runs and Monte Carlo trials bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    EPS_STEP,
    EPS_UNIT,
    Coin,
    Distribution,
    NumericalDriftError,
    QubitState,
    WalkState,
    distribution_of,
)
from .ensembles import CoinEnsemble, InitialStateRule
from .streams import COIN_STREAM, INIT_STREAM, substream

_ZERO = np.zeros(1, dtype=np.complex128)


def step(state: WalkState, coin: Coin) -> WalkState:
    """Advance one step under `coin`, growing the support by one site each side."""
    left = coin.a * state.psi_l + coin.b * state.psi_r
    right = coin.c * state.psi_l + coin.d * state.psi_r
    psi_l = np.concatenate([left, _ZERO])
    psi_r = np.concatenate([_ZERO, right])
    new = WalkState(state.step + 1, psi_l, psi_r)
    if __debug__:
        drift = abs(new.norm_sq() - 1.0)
        assert drift <= EPS_UNIT + new.step * EPS_STEP, (
            f"norm drift {drift} at step {new.step}"
        )
    return new


@dataclass(frozen=True)
class WalkRun:
    """One realization: initial state, its coin sequence, and the final state.

    `states` holds every intermediate state (step 0 included) when the
    run was evolved with `keep_states=True`, else None.
    """

    initial: QubitState
    coins: tuple[Coin, ...]
    final: WalkState
    states: tuple[WalkState, ...] | None = None

    def distribution(self) -> Distribution:
        return distribution_of(self.final)


def evolve(initial: QubitState, coins: Sequence[Coin], keep_states: bool = False) -> WalkRun:
    """Apply `coins` in order to the origin-localized state `initial`."""
    state = WalkState.from_qubit(initial)
    history = [state] if keep_states else None
    for coin in coins:
        state = step(state, coin)
        if history is not None:
            history.append(state)
    return WalkRun(
        initial=initial,
        coins=tuple(coins),
        final=state,
        states=tuple(history) if history is not None else None,
    )


def _evolve_block(abcd: np.ndarray, initial: np.ndarray) -> np.ndarray:
    """Occupation probabilities for a block of independent realizations.

    `abcd` has shape (trials, n, 4) holding each trial's coin entries per
    step; `initial` has shape (trials, 2).  Returns (trials, n+1) site
    probabilities.  Row t is bit-identical to evolving trial t alone.
    """
    trials = abcd.shape[0]
    n = abcd.shape[1]
    psi_l = initial[:, 0:1].astype(np.complex128)
    psi_r = initial[:, 1:2].astype(np.complex128)
    pad = np.zeros((trials, 1), dtype=np.complex128)
    for j in range(n):
        a = abcd[:, j, 0:1]
        b = abcd[:, j, 1:2]
        c = abcd[:, j, 2:3]
        d = abcd[:, j, 3:4]
        left = a * psi_l + b * psi_r
        right = c * psi_l + d * psi_r
        psi_l = np.concatenate([left, pad], axis=1)
        psi_r = np.concatenate([pad, right], axis=1)
    return psi_l.real**2 + psi_l.imag**2 + psi_r.real**2 + psi_r.imag**2


def _check_block_norms(probs: np.ndarray, n: int) -> None:
    totals = probs.sum(axis=1)
    drift = np.abs(totals - 1.0)
    budget = EPS_UNIT + n * EPS_STEP
    if np.any(drift > budget):
        worst = float(drift.max())
        raise NumericalDriftError(
            f"total probability drifted by {worst!r} (budget {budget!r}) at step {n}"
        )


def run_realization(
    ensemble: CoinEnsemble,
    init_rule: InitialStateRule,
    n: int,
    master_seed: int,
    trial: int = 0,
) -> Distribution:
    """One seeded realization: draw n coins and an initial state, evolve.

    The coin sequence comes from the stream (master_seed, trial,
    COIN_STREAM) and the initial state, when random, from (master_seed,
    trial, INIT_STREAM).  Identical inputs give identical output, and the
    result equals the corresponding trial inside `monte_carlo_average`
    bit for bit.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    abcd = ensemble.sample_batch(substream(master_seed, trial, COIN_STREAM), n)
    initial = init_rule.draw_batch(
        substream(master_seed, trial, INIT_STREAM) if init_rule.kind == "random" else None, 1
    )
    probs = _evolve_block(abcd[np.newaxis, :, :], initial)
    _check_block_norms(probs, n)
    return Distribution(n, probs[0])
