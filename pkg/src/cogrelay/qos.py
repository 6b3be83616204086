"""QoS-constrained TDMA assignment for the secondary users.

Secondary user j is scheduled with probability omega_j and its packet goes
through with probability f = exp(-threshold/gamma_s), so its long-run
throughput is omega_j * f.  Meeting targets lambda_j for every user while the
primary stays below its outage budget is a pair of linear constraints; the
closed-form optimum assigns omega_j = lambda_j / f to everyone except the
tagged user k, which absorbs the rest of the frame.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from math import exp, fsum, nan

from .analytic import InvalidCase, outage_probability
from .config import Case, SystemConfig, snr_threshold


class PrimaryInfeasible(Exception):
    """Primary outage budget cannot be met at this operating point."""


class SecondaryInfeasible(Exception):
    """The secondary rate demands exceed the frame's service capacity."""


@dataclass(frozen=True)
class QosSolution:
    feasible: bool
    omega: tuple           # slot-share per secondary user, sums to 1 when feasible
    zeta: float            # slot split in effect (echoed from the config)
    lambda_k_max: float    # largest throughput still available to the tagged user
    slack: float           # f - sum(lambda_s): unused service probability
    k: int                 # tagged user index


def secondary_success_prob(cfg: SystemConfig) -> float:
    """Probability a scheduled secondary transmission meets its own rate."""
    return exp(-snr_threshold(cfg.secondary_rate()) / cfg.gamma_s)


def secondary_throughput(cfg: SystemConfig, omega_j: float) -> float:
    """Long-run packet rate of a user scheduled a fraction omega_j of slots."""
    if not 0.0 <= omega_j <= 1.0:
        raise ValueError("omega_j must lie in [0, 1]")
    return omega_j * secondary_success_prob(cfg)


def _check_k(cfg: SystemConfig, k: int) -> int:
    k = int(k)
    if not 0 <= k < cfg.M:
        raise ValueError(f"k must index a secondary user (0..{cfg.M - 1})")
    return k


def _check_primary(cfg: SystemConfig) -> None:
    nu = outage_probability(cfg).nu
    if cfg.lambda_p > 1.0 - nu:
        raise PrimaryInfeasible(
            f"primary needs throughput {cfg.lambda_p} but the link sustains {1.0 - nu:.6g}"
        )


def max_lambda_k(cfg: SystemConfig, k: int) -> float:
    """Largest extra throughput user k can be promised on top of the others.

    Raises PrimaryInfeasible when the primary outage budget already fails;
    clamps to 0 when the other users alone exhaust the frame.
    """
    k = _check_k(cfg, k)
    _check_primary(cfg)
    others = fsum(lam for j, lam in enumerate(cfg.lambda_s) if j != k)
    return max(0.0, secondary_success_prob(cfg) - others)


def solve_assignment(cfg: SystemConfig, k: int) -> QosSolution:
    """Slot shares meeting every lambda_j with the leftover given to user k."""
    k = _check_k(cfg, k)
    _check_primary(cfg)
    f = secondary_success_prob(cfg)
    total = fsum(cfg.lambda_s)
    if total > f:
        raise SecondaryInfeasible(
            f"rate demands sum to {total:.6g} > service probability {f:.6g}"
        )
    omega = [lam / f for lam in cfg.lambda_s]
    omega[k] = max(0.0, 1.0 - fsum(w for j, w in enumerate(omega) if j != k))
    others = fsum(lam for j, lam in enumerate(cfg.lambda_s) if j != k)
    return QosSolution(
        feasible=True,
        omega=tuple(omega),
        zeta=cfg.zeta,
        lambda_k_max=max(0.0, f - others),
        slack=f - total,
        k=k,
    )


def search_zeta(cfg: SystemConfig, k: int, grid_size: int = 999) -> QosSolution:
    """Best slot split for the no-direct-link case by exhaustive grid scan.

    Evaluates zeta = i/(grid_size+1) for i = 1..grid_size and keeps the
    feasible point with the largest slack (ties: larger lambda_k_max, then
    smaller zeta).  Returns an infeasible marker solution when no grid point
    satisfies both the primary and secondary constraints.
    """
    if cfg.case is not Case.NO_DIRECT_LINK:
        raise InvalidCase("search_zeta applies to the no-direct-link case only")
    k = _check_k(cfg, k)
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    best = None
    for i in range(1, grid_size + 1):
        zeta = i / (grid_size + 1)
        try:
            sol = solve_assignment(replace(cfg, zeta=zeta), k)
        except (PrimaryInfeasible, SecondaryInfeasible):
            continue
        if best is None or (sol.slack, sol.lambda_k_max) > (best.slack, best.lambda_k_max):
            best = sol
    if best is None:
        return QosSolution(feasible=False, omega=(nan,) * cfg.M, zeta=nan,
                           lambda_k_max=0.0, slack=nan, k=k)
    return best
