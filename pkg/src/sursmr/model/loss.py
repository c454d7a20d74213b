"""Joint weighted L1 objective over the two predicted ratios.

loss = alpha * |pred_sur - sur| * [sur on] + beta * |pred_smr - smr| * [smr on],
averaged over the batch. Masks select the single-task training regimes.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import Tensor

from ..errors import ValidationError


@dataclass(frozen=True)
class LossWeights:
    alpha: float = 0.5
    beta: float = 0.5
    sur_mask: bool = True
    smr_mask: bool = True

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValidationError("loss weights must be >= 0")
        if not (self.sur_mask or self.smr_mask):
            raise ValidationError("at least one of sur_mask/smr_mask must be true")


def joint_loss(
    predictions: Tensor,
    sur_targets: Tensor | None,
    smr_targets: Tensor | None,
    weights: LossWeights,
) -> Tensor:
    """Batch-mean masked L1 loss.

    `predictions` is (B, 2); a masked-off target tensor may be None.
    """
    if not (weights.sur_mask or weights.smr_mask):
        raise ValidationError("at least one of sur_mask/smr_mask must be true")
    batch = predictions.shape[0]
    total = predictions.new_zeros(batch)
    if weights.sur_mask:
        if sur_targets is None:
            raise ValidationError("sur_mask is on but no sur targets were given")
        total = total + weights.alpha * torch.abs(predictions[:, 0] - sur_targets)
    if weights.smr_mask:
        if smr_targets is None:
            raise ValidationError("smr_mask is on but no smr targets were given")
        total = total + weights.beta * torch.abs(predictions[:, 1] - smr_targets)
    return total.mean()
