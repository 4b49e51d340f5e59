"""Monte Carlo averaging over walk realizations and comparison metrics.

Trials are partitioned into fixed-size blocks keyed by absolute trial
index; each block draws its own per-trial streams, evolves all its
realizations in one vectorized kernel, and reduces its probabilities with
numpy's pairwise summation.  The final reduction over block partials is
ordered, so the averaged result is bit-identical whether blocks run
serially or across any number of processes.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Coin, Distribution, QubitState, summary_stats
from .engine import _check_block_norms, _evolve_block, evolve
from .ensembles import CoinEnsemble, InitialStateRule
from .pathsum import binomial_distribution
from .streams import COIN_STREAM, INIT_STREAM, substream

#: Trials per accumulation block.  Fixed (not tuned per run) so that the
#: reduction tree, and therefore the result, never depends on trial count
#: partitioning across workers.
BLOCK_SIZE = 1024


def config_digest(payload: dict) -> str:
    """Stable hex digest of a JSON-serializable configuration."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class AveragedResult:
    """Monte Carlo estimate of the ensemble-averaged distribution.

    `stderr` holds the per-site standard error of the mean (sample
    standard deviation of the per-realization probabilities across
    trials, divided by sqrt(trials)); `stderr_max` is its maximum over
    sites.  `tv_to_binomial` is the total variation distance between the
    mean distribution and the classical symmetric walk law at the same n.
    """

    mean_distribution: Distribution
    trials: int
    stderr: np.ndarray
    stderr_max: float
    master_seed: int
    tv_to_binomial: float
    digest: str

    def to_json_dict(self) -> dict:
        return {
            "n": self.mean_distribution.n,
            "trials": self.trials,
            "seed": self.master_seed,
            "mean": [[k, p] for k, p in self.mean_distribution.items()],
            "stderr_max": self.stderr_max,
            "tv_to_binomial": self.tv_to_binomial,
            "config_digest": self.digest,
        }

    def to_csv_rows(self) -> list[str]:
        return self.mean_distribution.to_csv_rows()


def _mc_block(
    ensemble: CoinEnsemble,
    init_rule: InitialStateRule,
    n: int,
    master_seed: int,
    start: int,
    count: int,
) -> tuple[np.ndarray, np.ndarray]:
    """(sum, sum of squares) of site probabilities over one trial block."""
    abcd = np.empty((count, n, 4), dtype=np.complex128)
    initial = np.empty((count, 2), dtype=np.complex128)
    random_init = init_rule.kind == "random"
    for i in range(count):
        trial = start + i
        abcd[i] = ensemble.sample_batch(substream(master_seed, trial, COIN_STREAM), n)
        initial[i] = init_rule.draw_batch(
            substream(master_seed, trial, INIT_STREAM) if random_init else None, 1
        )[0]
    probs = _evolve_block(abcd, initial)
    _check_block_norms(probs, n)
    return probs.sum(axis=0), (probs**2).sum(axis=0)


def _mc_block_args(args) -> tuple[np.ndarray, np.ndarray]:
    return _mc_block(*args)


def monte_carlo_average(
    ensemble: CoinEnsemble,
    init_rule: InitialStateRule,
    n: int,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> AveragedResult:
    """Average `trials` independent realizations of the disordered walk.

    Trial t draws from the streams (master_seed, t, COIN_STREAM) and
    (master_seed, t, INIT_STREAM), so results are deterministic in all
    arguments and invariant to `workers`.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")

    blocks = [
        (ensemble, init_rule, n, master_seed, start, min(BLOCK_SIZE, trials - start))
        for start in range(0, trials, BLOCK_SIZE)
    ]
    if workers == 1 or len(blocks) == 1:
        partials = [_mc_block_args(block) for block in blocks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_mc_block_args, blocks))

    total = np.stack([p for p, _ in partials]).sum(axis=0)
    total_sq = np.stack([q for _, q in partials]).sum(axis=0)
    mean = total / trials
    if trials >= 2:
        variance = np.maximum(total_sq - trials * mean**2, 0.0) / (trials - 1)
        stderr = np.sqrt(variance / trials)
    else:
        stderr = np.zeros_like(mean)
    stderr.setflags(write=False)

    mean_distribution = Distribution(n, mean)
    digest = config_digest(
        {
            **ensemble.config(),
            "init": init_rule.config(),
            "n": n,
            "trials": trials,
            "seed": master_seed,
        }
    )
    return AveragedResult(
        mean_distribution=mean_distribution,
        trials=trials,
        stderr=stderr,
        stderr_max=float(stderr.max()),
        master_seed=master_seed,
        tv_to_binomial=tv_distance(mean_distribution, binomial_distribution(n)),
        digest=digest,
    )


def tv_distance(d1: Distribution, d2: Distribution) -> float:
    """Total variation distance, half the L1 distance between the masses."""
    if d1.n != d2.n:
        raise ValueError(f"distributions live at different times: {d1.n} vs {d2.n}")
    return 0.5 * float(np.abs(d1.probs - d2.probs).sum())


# --- variance scaling -------------------------------------------------------

@dataclass(frozen=True)
class ClassicalWalker:
    """The classical symmetric random walk (variance exactly n)."""


@dataclass(frozen=True)
class DeterministicWalker:
    """A walk under one fixed coin every step."""

    coin: Coin
    initial: QubitState


@dataclass(frozen=True)
class AveragedWalker:
    """Monte Carlo ensemble average of the disordered walk."""

    ensemble: CoinEnsemble
    init_rule: InitialStateRule
    trials: int
    master_seed: int
    workers: int = 1


Walker = ClassicalWalker | DeterministicWalker | AveragedWalker


@dataclass(frozen=True)
class VarianceScan:
    """Rows of (n, variance) for one walker configuration."""

    walker: str
    rows: tuple[tuple[int, float], ...]

    def variances(self) -> dict[int, float]:
        return {n: v for n, v in self.rows}

    def to_json_dict(self) -> dict:
        return {"walker": self.walker, "rows": [[n, v] for n, v in self.rows]}

    def to_csv_rows(self) -> list[str]:
        return ["n,variance"] + [f"{n},{v!r}" for n, v in self.rows]


def _classical_variance(n: int) -> float:
    # Integer arithmetic: sum_m (2m-n)^2 C(n,m) = n 2^n, so the float
    # division is exact and the result is n with no rounding at all.
    numerator = sum((2 * m - n) ** 2 * math.comb(n, m) for m in range(n + 1))
    return numerator / (1 << n)

def variance_scan(walker: Walker, n_list: Sequence[int]) -> VarianceScan:
    """Variance of the site coordinate at each n in `n_list`.

    The classical walker is evaluated in exact arithmetic; the
    deterministic walker evolves one realization per n; the averaged
    walker runs a full Monte Carlo average per n (same master seed each
    row, so a row reproduces the standalone `monte_carlo_average` call).
    """
    if len(n_list) == 0:
        raise ValueError("n_list must be nonempty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError(f"n_list must be strictly increasing, got {list(n_list)}")
    if any(n < 0 for n in n_list):
        raise ValueError("n values must be nonnegative")

    rows = []
    if isinstance(walker, ClassicalWalker):
        label = "classical"
        for n in n_list:
            rows.append((int(n), _classical_variance(int(n))))
    elif isinstance(walker, DeterministicWalker):
        label = "deterministic"
        for n in n_list:
            run = evolve(walker.initial, [walker.coin] * int(n))
            _, variance = summary_stats(run.distribution())
            rows.append((int(n), variance))
    elif isinstance(walker, AveragedWalker):
        label = f"averaged:{walker.ensemble.name}"
        for n in n_list:
            result = monte_carlo_average(
                walker.ensemble,
                walker.init_rule,
                int(n),
                walker.trials,
                walker.master_seed,
                workers=walker.workers,
            )
            _, variance = summary_stats(result.mean_distribution)
            rows.append((int(n), variance))
    else:
        raise ValueError(f"unknown walker configuration {walker!r}")
    return VarianceScan(walker=label, rows=tuple(rows))
