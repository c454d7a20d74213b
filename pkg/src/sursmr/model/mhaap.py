"""Multi-head attention aggregation and pooling of multi-stage differences.

All stage maps are bilinearly resized to one spatial grid, concatenated on
channels, flattened to spatial tokens, and normalized per token. A small set
of learnable queries cross-attends to the tokens (keys/values are projected,
the queries are free parameters), and a linear layer pools the attended
channels down to the output width. The token axis is summed out, so the
output is invariant to spatial permutation of the input tokens.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import Tensor, nn

from ..errors import ValidationError


@dataclass(frozen=True)
class MHAAPConfig:
    concat_channels: int
    query_count: int = 49
    head_count: int = 8
    output_channels: int = 512
    target_spatial: tuple[int, int] = (14, 14)

    def __post_init__(self):
        object.__setattr__(self, "target_spatial", tuple(self.target_spatial))
        if self.concat_channels % self.head_count != 0:
            raise ValidationError(
                f"concat channels {self.concat_channels} not divisible by "
                f"{self.head_count} heads"
            )
        if self.output_channels >= self.concat_channels:
            raise ValidationError(
                f"output channels {self.output_channels} must be smaller than "
                f"concat channels {self.concat_channels}"
            )
        n_tokens = self.target_spatial[0] * self.target_spatial[1]
        if self.query_count >= n_tokens:
            warnings.warn(
                f"query count {self.query_count} is not small relative to the "
                f"{n_tokens} spatial tokens; aggregation will not compress",
                stacklevel=2,
            )


def _fuse_stage_maps(stage_maps: tuple[Tensor, ...], target: tuple[int, int]) -> Tensor:
    """Resize every stage map to `target` and concatenate on channels."""
    resized = [
        F.interpolate(m, size=target, mode="bilinear", align_corners=False)
        for m in stage_maps
    ]
    return torch.cat(resized, dim=1)


class MHAAP(nn.Module):
    """Learnable-query cross-attention pooling to a (Y, Z) representation."""

    def __init__(self, config: MHAAPConfig):
        super().__init__()
        self.config = config
        c = config.concat_channels
        self.query = nn.Parameter(torch.empty(config.query_count, c))
        nn.init.trunc_normal_(self.query, std=0.02)
        self.token_norm = nn.LayerNorm(c)
        self.key_proj = nn.Linear(c, c)
        self.value_proj = nn.Linear(c, c)
        self.pool = nn.Linear(c, config.output_channels)

    def forward(self, stage_maps: tuple[Tensor, ...]) -> Tensor:
        cfg = self.config
        fused = _fuse_stage_maps(stage_maps, cfg.target_spatial)
        b, c, h, w = fused.shape
        if c != cfg.concat_channels:
            raise ValidationError(
                f"got {c} concatenated channels, configured for {cfg.concat_channels}"
            )
        tokens = fused.flatten(2).transpose(1, 2)  # (B, N, C)
        tokens = self.token_norm(tokens)
        return self.attend(tokens)

    def attend(self, tokens: Tensor) -> Tensor:
        """Cross-attention over already-normalized tokens of shape (B, N, C)."""
        cfg = self.config
        b, n, c = tokens.shape
        heads, head_dim = cfg.head_count, c // cfg.head_count

        k = self.key_proj(tokens).view(b, n, heads, head_dim).transpose(1, 2)
        v = self.value_proj(tokens).view(b, n, heads, head_dim).transpose(1, 2)
        q = self.query.view(cfg.query_count, heads, head_dim).transpose(0, 1)

        scale = 1.0 / math.sqrt(c / heads)
        attn = torch.softmax(q.unsqueeze(0) @ k.transpose(-2, -1) * scale, dim=-1)
        out = attn @ v  # (B, heads, Y, head_dim)
        out = out.transpose(1, 2).reshape(b, cfg.query_count, c)
        return self.pool(out)


class ConvPoolAggregator(nn.Module):
    """Ablation aggregator: 1x1 conv to Z then global average pooling.

    The single pooled vector is broadcast to the query count so downstream
    fusion sees the same (Y, Z) shape as with attention.
    """

    def __init__(self, config: MHAAPConfig):
        super().__init__()
        self.config = config
        self.proj = nn.Conv2d(config.concat_channels, config.output_channels, 1)

    def forward(self, stage_maps: tuple[Tensor, ...]) -> Tensor:
        cfg = self.config
        fused = _fuse_stage_maps(stage_maps, cfg.target_spatial)
        pooled = self.proj(fused).mean(dim=(2, 3))  # (B, Z)
        return pooled.unsqueeze(1).expand(-1, cfg.query_count, -1)
