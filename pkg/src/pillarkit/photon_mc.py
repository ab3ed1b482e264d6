"""Monte Carlo photon-fate sampling: an independent check of the analytic eta.

Each emitted photon makes a two-stage categorical draw. With probability beta
it enters the confined mode, then picks an escape channel with probability
proportional to that channel's loss rate (mirror top/bottom split, planar
extrinsic losses, sidewall scattering); otherwise it is tallied as leaky.
The branching ratios map one-to-one onto the loss-budget terms, so the
collected-top fraction estimates the analytic source efficiency.

Sampling is deterministic given the master seed. Photons are drawn in
fixed-size batches whose sub-seeds are spawned from the master seed by batch
index, so the merged tally is independent of how many worker threads run.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError
from .loss_budget import LossBudget

RNG_ALGORITHM = "numpy PCG64 via SeedSequence.spawn"
_BATCH = 1 << 16

FATES = ("collected_top", "lost_bottom", "lost_extrinsic", "lost_sidewall", "lost_leaky")


@dataclass(frozen=True)
class ChannelRates:
    """Branching weights for one design point.

    The four within-mode weights are the inverse partial quality factors,
    with the mirror term split between the top and bottom escape paths.
    """

    into_mode_weight: float  # beta
    top_weight: float
    bottom_weight: float
    extrinsic_weight: float
    sidewall_weight: float

    def __post_init__(self):
        if not (0.0 <= self.into_mode_weight <= 1.0):
            raise InputDomainError("into_mode_weight (beta) outside [0, 1]")
        weights = self.mode_weights
        if any(w < 0 or math.isnan(w) or math.isinf(w) for w in weights):
            raise InputDomainError("channel weights must be finite and >= 0")
        if sum(weights) <= 0.0:
            raise InputDomainError("at least one escape channel must be open")

    @property
    def mode_weights(self) -> tuple[float, float, float, float]:
        return (self.top_weight, self.bottom_weight, self.extrinsic_weight, self.sidewall_weight)

    @classmethod
    def from_budget(cls, beta: float, budget: LossBudget, top_fraction: float = 1.0):
        if not (0.0 <= top_fraction <= 1.0):
            raise InputDomainError("top_fraction outside [0, 1]")
        inv_int = 1.0 / budget.q_int
        return cls(
            into_mode_weight=beta,
            top_weight=inv_int * top_fraction,
            bottom_weight=inv_int * (1.0 - top_fraction),
            extrinsic_weight=1.0 / budget.q_ext,
            sidewall_weight=1.0 / budget.q_scat,
        )

    def fate_probabilities(self) -> dict[str, float]:
        """Exact per-fate probabilities implied by the branching weights."""
        weights = np.array(self.mode_weights)
        shares = weights / weights.sum()
        probs = {f: self.into_mode_weight * s for f, s in zip(FATES[:4], shares)}
        probs["lost_leaky"] = 1.0 - self.into_mode_weight
        return probs

    def analytic_eta(self) -> float:
        """Collected-top probability: beta times the top-mirror loss share."""
        return self.fate_probabilities()["collected_top"]


@dataclass(frozen=True)
class FateTally:
    """Per-fate photon counts from one simulation run."""

    collected_top: int
    lost_bottom: int
    lost_extrinsic: int
    lost_sidewall: int
    lost_leaky: int
    total: int
    seed: int
    rng_algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        counts = self.counts
        if any(c < 0 for c in counts.values()):
            raise InputDomainError("negative fate count")
        if sum(counts.values()) != self.total:
            raise InputDomainError("fate counts do not sum to the photon total")

    @property
    def counts(self) -> dict[str, int]:
        return {f: getattr(self, f) for f in FATES}


def _simulate_batch(rates: ChannelRates, n: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    u_mode = rng.random(n)
    u_channel = rng.random(n)
    weights = np.array(rates.mode_weights)
    edges = np.cumsum(weights) / weights.sum()
    in_mode = u_mode < rates.into_mode_weight
    channel = np.searchsorted(edges, u_channel[in_mode], side="right")
    counts = np.zeros(5, dtype=np.int64)
    counts[:4] = np.bincount(np.minimum(channel, 3), minlength=4)
    counts[4] = n - int(in_mode.sum())
    return counts


def simulate(
    rates: ChannelRates, n_photons: int, seed: int, threads: int = 1
) -> FateTally:
    """Route ``n_photons`` through the two-stage draw; deterministic per seed."""
    if n_photons < 1:
        raise InputDomainError("n_photons must be >= 1")
    if threads < 1:
        raise InputDomainError("threads must be >= 1")
    n_batches = (n_photons + _BATCH - 1) // _BATCH
    sizes = [min(_BATCH, n_photons - i * _BATCH) for i in range(n_batches)]
    seqs = np.random.SeedSequence(seed).spawn(n_batches)

    if threads == 1 or n_batches == 1:
        parts = [_simulate_batch(rates, n, s) for n, s in zip(sizes, seqs)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ns: _simulate_batch(rates, *ns), zip(sizes, seqs)))

    counts = np.sum(parts, axis=0)
    return FateTally(
        collected_top=int(counts[0]),
        lost_bottom=int(counts[1]),
        lost_extrinsic=int(counts[2]),
        lost_sidewall=int(counts[3]),
        lost_leaky=int(counts[4]),
        total=n_photons,
        seed=seed,
    )


def estimate_eta(tally: FateTally) -> tuple[float, float]:
    """Binomial estimate of eta and its standard error from a tally."""
    if tally.total < 1:
        raise InputDomainError("tally is empty")
    eta_hat = tally.collected_top / tally.total
    std_err = math.sqrt(eta_hat * (1.0 - eta_hat) / tally.total)
    return eta_hat, std_err
