"""Fusion of the pooled (Y, Z) representation into one prediction token.

The default fusion prepends a learnable regression token and runs mixer
layers: a token-mixing MLP across the Y+1 rows, then a channel-mixing MLP
across the Z columns, each residual with a pre-LayerNorm over channels. The
regression token's final state is the fused output. Ablation variants swap
the mixer for standard transformer encoder layers or one affine layer over
the flattened representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import Tensor, nn

from ..errors import ValidationError


@dataclass(frozen=True)
class MixerConfig:
    token_count: int  # Y + 1, including the regression token
    channels: int
    layer_count: int = 4
    token_hidden: int | None = None
    channel_hidden: int | None = None

    def __post_init__(self):
        if self.token_count < 2:
            raise ValidationError("mixer needs the regression token plus >= 1 token")
        if self.token_hidden is None:
            object.__setattr__(self, "token_hidden", 4 * self.token_count)
        if self.channel_hidden is None:
            object.__setattr__(self, "channel_hidden", 4 * self.channels)


class MixerBlock(nn.Module):
    def __init__(self, config: MixerConfig):
        super().__init__()
        t, z = config.token_count, config.channels
        self.token_norm = nn.LayerNorm(z)
        self.token_mlp = nn.Sequential(
            nn.Linear(t, config.token_hidden),
            nn.GELU(),
            nn.Linear(config.token_hidden, t),
        )
        self.channel_norm = nn.LayerNorm(z)
        self.channel_mlp = nn.Sequential(
            nn.Linear(z, config.channel_hidden),
            nn.GELU(),
            nn.Linear(config.channel_hidden, z),
        )

    def forward(self, s: Tensor) -> Tensor:
        mixed = self.token_mlp(self.token_norm(s).transpose(-2, -1)).transpose(-2, -1)
        s = s + mixed
        s = s + self.channel_mlp(self.channel_norm(s))
        return s


class MixerFusion(nn.Module):
    """Regression-token mixer; returns the token's post-mixing state."""

    def __init__(self, config: MixerConfig):
        super().__init__()
        self.config = config
        self.reg_token = nn.Parameter(torch.zeros(1, config.channels))
        self.blocks = nn.Sequential(*[MixerBlock(config) for _ in range(config.layer_count)])

    def forward(self, pooled: Tensor) -> Tensor:
        b, y, z = pooled.shape
        if y + 1 != self.config.token_count:
            raise ValidationError(
                f"fusion built for {self.config.token_count - 1} tokens, got {y}"
            )
        token = self.reg_token.unsqueeze(0).expand(b, -1, -1)
        s = torch.cat([token, pooled], dim=1)
        s = self.blocks(s)
        return s[:, 0, :]


class TransformerFusion(nn.Module):
    """Ablation fusion: standard transformer encoder layers over the tokens."""

    def __init__(self, channels: int, layer_count: int = 4, heads: int = 8):
        super().__init__()
        if channels % heads != 0:
            raise ValidationError(f"channels {channels} not divisible by {heads} heads")
        self.reg_token = nn.Parameter(torch.zeros(1, channels))
        layer = nn.TransformerEncoderLayer(
            d_model=channels,
            nhead=heads,
            dim_feedforward=4 * channels,
            dropout=0.0,
            activation="gelu",
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=layer_count)

    def forward(self, pooled: Tensor) -> Tensor:
        b = pooled.shape[0]
        token = self.reg_token.unsqueeze(0).expand(b, -1, -1)
        s = torch.cat([token, pooled], dim=1)
        return self.encoder(s)[:, 0, :]


class FlattenLinearFusion(nn.Module):
    """Ablation fusion: one affine layer over the flattened (Y*Z) vector."""

    def __init__(self, query_count: int, channels: int):
        super().__init__()
        self.proj = nn.Linear(query_count * channels, channels)

    def forward(self, pooled: Tensor) -> Tensor:
        return self.proj(pooled.flatten(1))
