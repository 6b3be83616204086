"""Full-protocol Monte Carlo: the ground-truth oracle for the closed forms.

Slots are simulated in fixed blocks of 16384, each block drawn from its own
counter-jumped substream of the master seed.  Workers only ever change how
blocks are distributed, never what any block contains, so aggregate counts
are bit-identical for any worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .analytic import InvalidCase
from .beamform import effective_gain
from .channel import ChannelBlock, decode_mask, draw_realizations, substream
from .config import Case, SystemConfig, snr_threshold

BLOCK_SLOTS = 16384


@dataclass(frozen=True)
class OutageEstimate:
    p_hat: float
    stderr: float       # sqrt(p_hat (1-p_hat) / trials)
    trials: int


@dataclass(frozen=True)
class SlotOutcome:
    K: int
    primary_ok: bool
    secondary_ok: bool


@dataclass(frozen=True)
class OutageSimulation:
    primary: OutageEstimate
    secondary: OutageEstimate
    k_counts: np.ndarray       # histogram of decoding-set sizes, length M
    trials: int


@dataclass(frozen=True)
class ScheduleEstimate:
    """Per-user throughput of a TDMA schedule (user j transmits w.p. omega[j])."""

    mu_hat: np.ndarray         # fraction of slots user j was scheduled AND succeeded
    stderr: np.ndarray
    primary_throughput: float  # fraction of slots the primary packet got through
    primary_stderr: float
    trials: int


def _slot_events(cfg: SystemConfig, block: ChannelBlock):
    """Vectorized per-slot outcomes: (primary_ok, secondary_ok, K) arrays."""
    mask = decode_mask(cfg, block)
    k = mask.sum(axis=1)
    alpha = effective_gain(block.h_relay_pd, block.h_relay_sd, mask)
    alpha = np.where(k >= 2, alpha, 0.0)
    phi = cfg.gamma_s * np.abs(block.h_v_pd) ** 2
    relayed = cfg.gamma_p * alpha / (1.0 + phi)
    thr = snr_threshold(cfg.forward_rate())
    if cfg.case is Case.DIRECT_LINK:
        # MRC: direct-branch SNR adds to the beamformed-branch SINR
        primary_ok = relayed + cfg.gamma_p * np.abs(block.h_p_pd) ** 2 >= thr
    else:
        # nothing reaches pd unless at least two relays cooperated
        primary_ok = (k >= 2) & (relayed >= thr)
    thr_s = snr_threshold(cfg.secondary_rate())
    secondary_ok = cfg.gamma_s * np.abs(block.h_v_sd) ** 2 >= thr_s
    return primary_ok, secondary_ok, k


def _simulate_slot(cfg: SystemConfig, rng_stream: np.random.Generator) -> SlotOutcome:
    block = draw_realizations(cfg, 1, rng_stream)
    primary_ok, secondary_ok, k = _slot_events(cfg, block)
    return SlotOutcome(K=int(k[0]), primary_ok=bool(primary_ok[0]),
                       secondary_ok=bool(secondary_ok[0]))


def simulate_slot_case1(cfg: SystemConfig, rng_stream: np.random.Generator) -> SlotOutcome:
    """One slot with a direct link: broadcast at 2R, then ZF relaying + MRC."""
    if cfg.case is not Case.DIRECT_LINK:
        raise InvalidCase("simulate_slot_case1 needs cfg.case = DIRECT_LINK")
    return _simulate_slot(cfg, rng_stream)


def simulate_slot_case2(cfg: SystemConfig, rng_stream: np.random.Generator) -> SlotOutcome:
    """One slot without a direct link: broadcast at R/zeta, forward at R/(1-zeta)."""
    if cfg.case is not Case.NO_DIRECT_LINK:
        raise InvalidCase("simulate_slot_case2 needs cfg.case = NO_DIRECT_LINK")
    return _simulate_slot(cfg, rng_stream)


def _blocks(trials: int):
    """(index, n_slots) for each fixed-size block covering `trials` slots."""
    return [(b, min(BLOCK_SLOTS, trials - b * BLOCK_SLOTS))
            for b in range((trials + BLOCK_SLOTS - 1) // BLOCK_SLOTS)]


def _outage_block(args):
    cfg, seed, index, n = args
    block = draw_realizations(cfg, n, substream(seed, index))
    primary_ok, secondary_ok, k = _slot_events(cfg, block)
    return (
        int(np.count_nonzero(~primary_ok)),
        int(np.count_nonzero(~secondary_ok)),
        np.bincount(k, minlength=cfg.M),
    )


def _schedule_block(args):
    cfg, omega, seed, index, n = args
    rng = substream(seed, index)
    block = draw_realizations(cfg, n, rng)      # channel normals first,
    u = rng.random(n)                           # scheduling uniforms after
    scheduled = np.searchsorted(np.cumsum(omega), u, side="right")
    scheduled = np.minimum(scheduled, len(omega) - 1)
    primary_ok, secondary_ok, _ = _slot_events(cfg, block)
    succ = np.bincount(scheduled[secondary_ok], minlength=len(omega))
    return succ, int(np.count_nonzero(primary_ok))


def _run_blocks(task, argslist, workers: int):
    if workers <= 1:
        return [task(a) for a in argslist]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(argslist) // (workers * 4))
        return list(pool.map(task, argslist, chunksize=chunk))


def _estimate(count: int, trials: int) -> OutageEstimate:
    p = count / trials
    return OutageEstimate(p_hat=p, stderr=sqrt(p * (1.0 - p) / trials), trials=trials)


def estimate_outage(cfg: SystemConfig, trials: int, seed: int = 0,
                    workers: int = 1) -> OutageSimulation:
    """Empirical primary/secondary outage over `trials` slots.

    Deterministic in (cfg, trials, seed); the workers argument affects
    wall-clock only.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    argslist = [(cfg, seed, b, n) for b, n in _blocks(trials)]
    results = _run_blocks(_outage_block, argslist, workers)
    p_out = sum(r[0] for r in results)
    s_out = sum(r[1] for r in results)
    k_counts = np.sum([r[2] for r in results], axis=0)
    return OutageSimulation(
        primary=_estimate(p_out, trials),
        secondary=_estimate(s_out, trials),
        k_counts=k_counts,
        trials=trials,
    )


def estimate_schedule_throughput(cfg: SystemConfig, omega, trials: int,
                                 seed: int = 0, workers: int = 1) -> ScheduleEstimate:
    """Simulate the TDMA assignment omega and measure per-user throughput.

    Each slot schedules one secondary user j with probability omega[j]; its
    own-data success gives throughput mu_j.  The primary relaying outcome is
    counted in the same slots (its statistics do not depend on which user is
    scheduled, but the shared-slot accounting mirrors the protocol).
    """
    omega = tuple(float(w) for w in omega)
    if len(omega) != cfg.M or any(w < 0 for w in omega):
        raise ValueError("omega must be M nonnegative probabilities")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    argslist = [(cfg, omega, seed, b, n) for b, n in _blocks(trials)]
    results = _run_blocks(_schedule_block, argslist, workers)
    succ = np.sum([r[0] for r in results], axis=0)
    p_ok = sum(r[1] for r in results)
    mu = succ / trials
    return ScheduleEstimate(
        mu_hat=mu,
        stderr=np.sqrt(mu * (1.0 - mu) / trials),
        primary_throughput=p_ok / trials,
        primary_stderr=sqrt((p_ok / trials) * (1.0 - p_ok / trials) / trials),
        trials=trials,
    )
