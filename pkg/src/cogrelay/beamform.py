"""Zero-forcing distributed beamforming across the decoding relays.

The K decoding relays choose a unit-norm weight vector g that nulls their
aggregate signal at the secondary destination while maximizing the gain at
the primary destination:

    maximize |g' h_pd|^2   s.t.   g' h_sd = 0,  ||g|| = 1

(' denotes conjugate transpose).  The optimum is the normalized projection
of h_pd onto the orthogonal complement of h_sd, and the achieved gain
alpha = ||Psi h_pd||^2 is Gamma(K-1, 1) distributed for i.i.d. unit
complex-Gaussian channels.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig

# squared-norm floor; below this a channel vector counts as numerically null
_DEGENERACY_FLOOR = 1e-30


class DegenerateChannel(Exception):
    """A (probability-zero) numerically null channel configuration."""


@dataclass(frozen=True)
class BeamformerResult:
    g: np.ndarray       # unit-norm complex weights, shape (K,)
    alpha: float        # beamforming gain |g' h_pd|^2 = ||Psi h_pd||^2
    leakage: float      # residual |g' h_sd|^2 at the secondary destination


def _project_out(h_sd: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply Psi x = x - h_sd (h_sd' x)/||h_sd||^2 without forming the matrix."""
    b2 = float(np.real(np.vdot(h_sd, h_sd)))
    if b2 < _DEGENERACY_FLOOR:
        raise DegenerateChannel(f"||h_sd||^2 = {b2:.3e} below degeneracy floor")
    return x - h_sd * (np.vdot(h_sd, x) / b2)


def projection_matrix(h_sd: np.ndarray) -> np.ndarray:
    """Orthogonal projector Psi = I - h_sd h_sd'/||h_sd||^2 (Hermitian, idempotent).

    Materialized K x K form, mainly for verification; the solver itself uses
    the O(K) rank-1 update.
    """
    h_sd = np.asarray(h_sd, dtype=complex)
    b2 = float(np.real(np.vdot(h_sd, h_sd)))
    if b2 < _DEGENERACY_FLOOR:
        raise DegenerateChannel(f"||h_sd||^2 = {b2:.3e} below degeneracy floor")
    return np.eye(len(h_sd), dtype=complex) - np.outer(h_sd, h_sd.conj()) / b2


def optimal_weights(h_pd: np.ndarray, h_sd: np.ndarray) -> BeamformerResult:
    """g* = Psi h_pd / ||Psi h_pd|| and the achieved gain/leakage.

    alpha is computed as ||Psi h_pd||^2 (identical to |g*' h_pd|^2
    analytically, but free of one cancellation-prone inner product).
    """
    h_pd = np.asarray(h_pd, dtype=complex)
    h_sd = np.asarray(h_sd, dtype=complex)
    proj = _project_out(h_sd, h_pd)
    alpha = float(np.real(np.vdot(proj, proj)))
    if alpha < _DEGENERACY_FLOOR:
        raise DegenerateChannel(
            f"h_pd numerically inside span(h_sd): ||Psi h_pd||^2 = {alpha:.3e}"
        )
    g = proj / np.sqrt(alpha)
    leakage = float(np.abs(np.vdot(g, h_sd)) ** 2)
    return BeamformerResult(g=g, alpha=alpha, leakage=leakage)


def received_sinr_pd(result: BeamformerResult, cfg: SystemConfig, alpha_v_pd: float) -> float:
    """Beamformed-branch SINR at the primary destination.

    alpha_v_pd is the squared source->pd channel gain |h_v_pd|^2; the
    scheduled secondary's transmission is the only interference left after
    zero-forcing: SINR = alpha*gamma_p / (1 + gamma_s*alpha_v_pd).
    """
    return result.alpha * cfg.gamma_p / (1.0 + cfg.gamma_s * alpha_v_pd)


def effective_gain(h_pd: np.ndarray, h_sd: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Batched alpha over (n, M-1) channel arrays restricted to mask.

    alpha = sum|h_pd|^2 - |<h_sd, h_pd>|^2 / sum|h_sd|^2 over the masked
    relays; rows whose masked h_sd is numerically null (or with fewer than
    one relay) get alpha = 0, matching the zero-gain fallback.
    """
    a2 = np.sum(np.abs(h_pd) ** 2, axis=1, where=mask, initial=0.0)
    b2 = np.sum(np.abs(h_sd) ** 2, axis=1, where=mask, initial=0.0)
    ip = np.sum(h_sd.conj() * h_pd * mask, axis=1)
    safe = b2 > _DEGENERACY_FLOOR
    alpha = a2 - np.abs(ip) ** 2 / np.where(safe, b2, 1.0)
    return np.where(safe, np.clip(alpha, 0.0, None), 0.0)
