"""Four-stage siamese feature extractor: conv mixing early, attention late.

The stage layout is fixed at (conv, conv, attention, attention) with spatial
strides 4/8/16/32 relative to the input, so local texture is mixed first and
global structure last. Widths and depths are configurable; desk-scale tests
run a tiny instance while pretrained weights of a full-size instance can be
loaded through the checkpoint format.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import Tensor, nn

from ..errors import ValidationError

STAGE_MIXERS = ("conv", "conv", "attention", "attention")
STAGE_STRIDES = (4, 8, 16, 32)


@dataclass(frozen=True)
class BackboneConfig:
    stage_channels: tuple[int, int, int, int] = (64, 128, 320, 512)
    stage_depths: tuple[int, int, int, int] = (2, 2, 6, 2)
    input_size: tuple[int, int] = (224, 224)
    attn_head_dim: int = 32
    mlp_ratio: int = 4
    mean: tuple[float, float, float] = (0.485, 0.456, 0.406)
    std: tuple[float, float, float] = (0.229, 0.224, 0.225)

    def __post_init__(self):
        for name in ("stage_channels", "stage_depths", "input_size", "mean", "std"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if len(self.stage_channels) != 4 or len(self.stage_depths) != 4:
            raise ValidationError("backbone needs exactly 4 stages")
        if any(c < 1 for c in self.stage_channels) or any(d < 1 for d in self.stage_depths):
            raise ValidationError("stage channels and depths must be positive")
        h, w = self.input_size
        if h % 32 != 0 or w % 32 != 0:
            raise ValidationError(f"input size {self.input_size} must be divisible by 32")
        for stage in (2, 3):
            c = self.stage_channels[stage]
            heads = max(1, c // self.attn_head_dim)
            if c % heads != 0:
                raise ValidationError(
                    f"stage {stage + 1} channels {c} not divisible by {heads} attention heads"
                )

    def stage_spatial(self, stage: int) -> tuple[int, int]:
        """Spatial size of stage `stage` (0-based) features."""
        stride = STAGE_STRIDES[stage]
        return (self.input_size[0] // stride, self.input_size[1] // stride)

    @property
    def concat_channels(self) -> int:
        return sum(self.stage_channels)


class LayerNorm2d(nn.Module):
    """LayerNorm over the channel axis of (B, C, H, W) maps."""

    def __init__(self, channels: int):
        super().__init__()
        self.norm = nn.LayerNorm(channels)

    def forward(self, x: Tensor) -> Tensor:
        x = x.permute(0, 2, 3, 1)
        x = self.norm(x)
        return x.permute(0, 3, 1, 2)


class ConvMixerBlock(nn.Module):
    """Separable-conv token mixing plus a pointwise channel MLP, both residual."""

    def __init__(self, channels: int, mlp_ratio: int):
        super().__init__()
        expanded = 2 * channels
        hidden = mlp_ratio * channels
        self.mix_norm = LayerNorm2d(channels)
        self.mix = nn.Sequential(
            nn.Conv2d(channels, expanded, 1),
            nn.GELU(),
            nn.Conv2d(expanded, expanded, 7, padding=3, groups=expanded),
            nn.Conv2d(expanded, channels, 1),
        )
        self.mlp_norm = LayerNorm2d(channels)
        self.mlp = nn.Sequential(
            nn.Conv2d(channels, hidden, 1),
            nn.GELU(),
            nn.Conv2d(hidden, channels, 1),
        )

    def forward(self, x: Tensor) -> Tensor:
        x = x + self.mix(self.mix_norm(x))
        x = x + self.mlp(self.mlp_norm(x))
        return x


class SelfAttention(nn.Module):
    def __init__(self, dim: int, heads: int):
        super().__init__()
        self.heads = heads
        self.head_dim = dim // heads
        self.scale = self.head_dim**-0.5
        self.qkv = nn.Linear(dim, 3 * dim)
        self.proj = nn.Linear(dim, dim)

    def forward(self, x: Tensor) -> Tensor:
        b, n, c = x.shape
        qkv = self.qkv(x).reshape(b, n, 3, self.heads, self.head_dim)
        q, k, v = qkv.permute(2, 0, 3, 1, 4)
        attn = torch.softmax((q @ k.transpose(-2, -1)) * self.scale, dim=-1)
        out = (attn @ v).transpose(1, 2).reshape(b, n, c)
        return self.proj(out)


class AttentionBlock(nn.Module):
    """Self-attention token mixing plus a channel MLP, both residual."""

    def __init__(self, channels: int, heads: int, mlp_ratio: int):
        super().__init__()
        hidden = mlp_ratio * channels
        self.mix_norm = nn.LayerNorm(channels)
        self.mix = SelfAttention(channels, heads)
        self.mlp_norm = nn.LayerNorm(channels)
        self.mlp = nn.Sequential(
            nn.Linear(channels, hidden),
            nn.GELU(),
            nn.Linear(hidden, channels),
        )

    def forward(self, x: Tensor) -> Tensor:
        b, c, h, w = x.shape
        tokens = x.flatten(2).transpose(1, 2)
        tokens = tokens + self.mix(self.mix_norm(tokens))
        tokens = tokens + self.mlp(self.mlp_norm(tokens))
        return tokens.transpose(1, 2).reshape(b, c, h, w)


class FourStageBackbone(nn.Module):
    """Shared-weight extractor producing one feature map per stage."""

    def __init__(self, config: BackboneConfig):
        super().__init__()
        self.config = config
        self.register_buffer(
            "pixel_mean", torch.tensor(config.mean).view(1, 3, 1, 1), persistent=True
        )
        self.register_buffer(
            "pixel_std", torch.tensor(config.std).view(1, 3, 1, 1), persistent=True
        )

        downsamples = []
        stages = []
        in_ch = 3
        for stage, (channels, depth) in enumerate(
            zip(config.stage_channels, config.stage_depths)
        ):
            if stage == 0:
                downsamples.append(
                    nn.Sequential(
                        nn.Conv2d(in_ch, channels, 7, stride=4, padding=3),
                        LayerNorm2d(channels),
                    )
                )
            else:
                downsamples.append(
                    nn.Sequential(
                        nn.Conv2d(in_ch, channels, 3, stride=2, padding=1),
                        LayerNorm2d(channels),
                    )
                )
            blocks: list[nn.Module] = []
            for _ in range(depth):
                if STAGE_MIXERS[stage] == "conv":
                    blocks.append(ConvMixerBlock(channels, config.mlp_ratio))
                else:
                    heads = max(1, channels // config.attn_head_dim)
                    blocks.append(AttentionBlock(channels, heads, config.mlp_ratio))
            stages.append(nn.Sequential(*blocks))
            in_ch = channels
        self.downsamples = nn.ModuleList(downsamples)
        self.stages = nn.ModuleList(stages)

    def forward(self, image: Tensor) -> tuple[Tensor, ...]:
        expected = self.config.input_size
        if image.shape[-2:] != torch.Size(expected):
            raise ValidationError(
                f"input spatial size {tuple(image.shape[-2:])} != configured {expected}"
            )
        x = (image - self.pixel_mean) / self.pixel_std
        features = []
        for down, stage in zip(self.downsamples, self.stages):
            x = down(x)
            x = stage(x)
            features.append(x)
        return tuple(features)


def extract_features(
    backbone: FourStageBackbone, original: Tensor, compressed: Tensor
) -> tuple[tuple[Tensor, ...], tuple[Tensor, ...]]:
    """Run the shared backbone over both images of a pair."""
    if original.shape != compressed.shape:
        raise ValidationError(
            f"pair size mismatch: {tuple(original.shape)} vs {tuple(compressed.shape)}"
        )
    return backbone(original), backbone(compressed)
