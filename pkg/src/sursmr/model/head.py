"""Regression head: three affine layers squashed to paired (sur, smr) ratios."""

from __future__ import annotations

import torch
from torch import Tensor, nn


class RegressionHead(nn.Module):
    """width -> width/2 -> width/4 -> 2 with GELU between, sigmoid output.

    Both outputs are ratios, so they are squashed into the open interval
    (0, 1); column 0 is the user ratio, column 1 the machine ratio.
    """

    def __init__(self, width: int):
        super().__init__()
        h1 = max(width // 2, 2)
        h2 = max(width // 4, 2)
        self.layers = nn.Sequential(
            nn.Linear(width, h1),
            nn.GELU(),
            nn.Linear(h1, h2),
            nn.GELU(),
            nn.Linear(h2, 2),
        )

    def forward(self, token: Tensor) -> Tensor:
        return torch.sigmoid(self.layers(token))
