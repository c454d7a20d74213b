"""Residual refinement of raw per-stage feature differences.

Each stage's difference map passes through three 3x3 convolutions with GELU
between them; the result is added back onto the raw difference. The final
convolution starts zero-initialized, so an untrained refiner is exactly the
identity and training departs from the plain-subtraction baseline.
"""

from __future__ import annotations

from torch import Tensor, nn

from ..errors import ValidationError


def diff_features(
    original_features: tuple[Tensor, ...], compressed_features: tuple[Tensor, ...]
) -> tuple[Tensor, ...]:
    """Elementwise per-stage subtraction: original minus compressed."""
    if len(original_features) != len(compressed_features):
        raise ValidationError("feature pyramids have different stage counts")
    diffs = []
    for stage, (f0, fq) in enumerate(zip(original_features, compressed_features)):
        if f0.shape != fq.shape:
            raise ValidationError(
                f"stage {stage + 1} shape mismatch: {tuple(f0.shape)} vs {tuple(fq.shape)}"
            )
        diffs.append(f0 - fq)
    return tuple(diffs)


class DiffRefineBlock(nn.Module):
    """One stage's refiner: x + Conv3(GELU(Conv2(GELU(Conv1(x)))))."""

    def __init__(self, channels: int, kernel_size: int = 3):
        super().__init__()
        padding = kernel_size // 2
        self.conv1 = nn.Conv2d(channels, channels, kernel_size, padding=padding)
        self.conv2 = nn.Conv2d(channels, channels, kernel_size, padding=padding)
        self.conv3 = nn.Conv2d(channels, channels, kernel_size, padding=padding)
        self.act = nn.GELU()
        nn.init.zeros_(self.conv3.weight)
        nn.init.zeros_(self.conv3.bias)

    def forward(self, x: Tensor) -> Tensor:
        return x + self.conv3(self.act(self.conv2(self.act(self.conv1(x)))))


class DFRL(nn.Module):
    """Per-stage difference refiners; channel- and spatial-preserving."""

    def __init__(self, stage_channels: tuple[int, ...], kernel_size: int = 3):
        super().__init__()
        self.blocks = nn.ModuleList(
            DiffRefineBlock(c, kernel_size) for c in stage_channels
        )

    def forward(self, diffs: tuple[Tensor, ...]) -> tuple[Tensor, ...]:
        if len(diffs) != len(self.blocks):
            raise ValidationError(
                f"expected {len(self.blocks)} stage diffs, got {len(diffs)}"
            )
        return tuple(block(d) for block, d in zip(self.blocks, diffs))


class IdentityRefiner(nn.Module):
    """Drop-in refiner that leaves raw differences untouched."""

    def forward(self, diffs: tuple[Tensor, ...]) -> tuple[Tensor, ...]:
        return diffs
