"""System configuration for the cooperative cognitive relaying model.

One primary transmitter shares a TDMA frame with M secondary users.  In
every slot one secondary acts as source while the remaining M-1 listen to
the primary broadcast and, if they decode it, forward it with a
zero-forcing beamformer on top of the secondary transmission.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class Case(str, Enum):
    """Topology variant.

    DIRECT_LINK: the primary destination also hears the primary transmitter,
    so the slot is split in half and both hops run at rate 2R.
    NO_DIRECT_LINK: the destination only hears the relays; the slot is split
    zeta / (1 - zeta) between broadcast and forwarding.
    """

    DIRECT_LINK = "direct"
    NO_DIRECT_LINK = "nodirect"


@dataclass(frozen=True)
class SystemConfig:
    M: int                      # number of secondary users (>= 2)
    gamma_p: float              # primary transmit SNR
    gamma_s: float              # secondary transmit SNR
    R: float                    # primary target rate (bits/s/Hz, per full slot)
    case: Case = Case.DIRECT_LINK
    zeta: float = 0.5           # broadcast-phase fraction, only meaningful without direct link
    lambda_p: float = 0.0       # primary throughput target (packets/slot)
    lambda_s: tuple[float, ...] | None = None  # per-SU throughput targets, length M (default zeros)

    def __post_init__(self):
        if not isinstance(self.case, Case):
            object.__setattr__(self, "case", Case(self.case))
        if self.lambda_s is None:
            object.__setattr__(self, "lambda_s", (0.0,) * self.M)
        else:
            object.__setattr__(self, "lambda_s", tuple(float(x) for x in self.lambda_s))
        if self.M < 2:
            raise ValueError(f"need at least two secondary users, got M={self.M}")
        if self.gamma_p <= 0 or self.gamma_s <= 0:
            raise ValueError("SNRs must be positive")
        if self.R < 0:
            raise ValueError(f"rate must be nonnegative, got R={self.R}")
        if not 0.0 < self.zeta < 1.0:
            raise ValueError(f"zeta must lie strictly inside (0, 1), got {self.zeta}")
        if not 0.0 <= self.lambda_p <= 1.0:
            raise ValueError(f"lambda_p must be a rate in [0, 1], got {self.lambda_p}")
        if len(self.lambda_s) != self.M:
            raise ValueError(f"lambda_s needs one entry per secondary user ({self.M}), got {len(self.lambda_s)}")
        if any(not 0.0 <= lam <= 1.0 for lam in self.lambda_s):
            raise ValueError("secondary throughput targets must lie in [0, 1]")

    # --- effective per-phase rates -------------------------------------
    # With a direct link both phases occupy half the slot; without one the
    # broadcast phase takes zeta of the slot and forwarding the rest.

    def broadcast_rate(self) -> float:
        """Rate the primary packet must survive at during the broadcast phase."""
        if self.case is Case.DIRECT_LINK:
            return 2.0 * self.R
        return self.R / self.zeta

    def forward_rate(self) -> float:
        """Rate of the relayed transmission toward the primary destination."""
        if self.case is Case.DIRECT_LINK:
            return 2.0 * self.R
        return self.R / (1.0 - self.zeta)

    def secondary_rate(self) -> float:
        """Rate of the secondary source's own transmission (same phase as forwarding)."""
        return self.forward_rate()


def snr_threshold(rate: float) -> float:
    """Minimum SNR for rate to be supported: 2**rate - 1.

    Saturates to inf past the float range (rates beyond ~1024 bits arise for
    slot splits zeta near 0 or 1, where the outage is genuinely certain).
    """
    try:
        return math.expm1(rate * math.log(2.0))
    except OverflowError:
        return math.inf
