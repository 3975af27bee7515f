"""Learning rules and losses."""

from .losses import (
    HybridUpdateParams,
    TransferLossConfig,
    hybrid_update,
    linear_cka,
    sigmoid,
    temporal_consistency_loss,
    transfer_loss,
    transfer_loss_from_alignment,
)
from .reward import DopamineBaseline, EligibilityTrace, rstdp_apply, update_eligibility
from .stdp import (
    AdaptiveStdpConfig,
    AdaptiveStdpState,
    OnlineStdp,
    StdpParams,
    apply_adaptive_stdp,
    stdp_delta,
)

__all__ = [
    "AdaptiveStdpConfig",
    "AdaptiveStdpState",
    "DopamineBaseline",
    "EligibilityTrace",
    "HybridUpdateParams",
    "OnlineStdp",
    "StdpParams",
    "TransferLossConfig",
    "apply_adaptive_stdp",
    "hybrid_update",
    "linear_cka",
    "rstdp_apply",
    "sigmoid",
    "stdp_delta",
    "temporal_consistency_loss",
    "transfer_loss",
    "transfer_loss_from_alignment",
    "update_eligibility",
]
