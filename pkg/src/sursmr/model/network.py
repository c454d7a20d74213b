"""Assembled prediction network and its ablation variants.

Pipeline: shared four-stage backbone over both images, per-stage feature
differences, residual refinement, attention aggregation and pooling, token
fusion, regression head. Variants swap single components:

  full                the whole pipeline
  no_dfrl             raw differences pass through unrefined
  no_mhaap            1x1 conv + global average pooling replaces attention
  transformer_fusion  4 transformer encoder layers replace the mixer
  mlp_fusion          one affine layer over the flattened pooled features
  all_features        aggregation sees original, compressed, and refined
                      difference features concatenated per stage
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import torch
from torch import Tensor, nn

from ..errors import ValidationError
from .backbone import BackboneConfig, FourStageBackbone
from .dfrl import DFRL, IdentityRefiner, diff_features
from .fusion import FlattenLinearFusion, MixerConfig, MixerFusion, TransformerFusion
from .head import RegressionHead
from .mhaap import MHAAP, ConvPoolAggregator, MHAAPConfig

VARIANTS = (
    "full",
    "no_dfrl",
    "no_mhaap",
    "transformer_fusion",
    "mlp_fusion",
    "all_features",
)


@dataclass(frozen=True)
class Prediction:
    sur: float
    smr: float


@dataclass(frozen=True)
class NetworkConfig:
    variant: str = "full"
    backbone: BackboneConfig = field(default_factory=BackboneConfig)
    query_count: int = 49
    head_count: int = 8
    output_channels: int = 512
    target_spatial: tuple[int, int] | None = None  # None: stage-3 spatial size
    mixer_layers: int = 4
    token_hidden: int | None = None
    channel_hidden: int | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValidationError(
                f"unknown variant {self.variant!r}; choose from {VARIANTS}"
            )
        if self.target_spatial is not None:
            object.__setattr__(self, "target_spatial", tuple(self.target_spatial))

    def resolved_target_spatial(self) -> tuple[int, int]:
        if self.target_spatial is not None:
            return self.target_spatial
        return self.backbone.stage_spatial(2)

    def concat_channels(self) -> int:
        c = self.backbone.concat_channels
        return 3 * c if self.variant == "all_features" else c

    def mhaap_config(self) -> MHAAPConfig:
        return MHAAPConfig(
            concat_channels=self.concat_channels(),
            query_count=self.query_count,
            head_count=self.head_count,
            output_channels=self.output_channels,
            target_spatial=self.resolved_target_spatial(),
        )

    def mixer_config(self) -> MixerConfig:
        return MixerConfig(
            token_count=self.query_count + 1,
            channels=self.output_channels,
            layer_count=self.mixer_layers,
            token_hidden=self.token_hidden,
            channel_hidden=self.channel_hidden,
        )

    def to_dict(self) -> dict:
        b = self.backbone
        return {
            "variant": self.variant,
            "backbone": {
                "stage_channels": list(b.stage_channels),
                "stage_depths": list(b.stage_depths),
                "input_size": list(b.input_size),
                "attn_head_dim": b.attn_head_dim,
                "mlp_ratio": b.mlp_ratio,
                "mean": list(b.mean),
                "std": list(b.std),
            },
            "query_count": self.query_count,
            "head_count": self.head_count,
            "output_channels": self.output_channels,
            "target_spatial": list(self.target_spatial) if self.target_spatial else None,
            "mixer_layers": self.mixer_layers,
            "token_hidden": self.token_hidden,
            "channel_hidden": self.channel_hidden,
        }

    @staticmethod
    def from_dict(data: dict) -> "NetworkConfig":
        backbone = BackboneConfig(**data["backbone"])
        rest = {k: v for k, v in data.items() if k != "backbone"}
        return NetworkConfig(backbone=backbone, **rest)


class SurSmrNet(nn.Module):
    """Joint satisfied-user / satisfied-machine ratio predictor."""

    def __init__(self, config: NetworkConfig):
        super().__init__()
        self.config = config
        self.backbone = FourStageBackbone(config.backbone)

        if config.variant == "no_dfrl":
            self.refiner: nn.Module = IdentityRefiner()
        else:
            self.refiner = DFRL(config.backbone.stage_channels)

        mhaap_cfg = config.mhaap_config()
        if config.variant == "no_mhaap":
            self.aggregator: nn.Module = ConvPoolAggregator(mhaap_cfg)
        else:
            self.aggregator = MHAAP(mhaap_cfg)

        if config.variant == "transformer_fusion":
            self.fusion: nn.Module = TransformerFusion(
                config.output_channels, layer_count=config.mixer_layers
            )
        elif config.variant == "mlp_fusion":
            self.fusion = FlattenLinearFusion(config.query_count, config.output_channels)
        else:
            self.fusion = MixerFusion(config.mixer_config())

        self.head = RegressionHead(config.output_channels)

    def refined_diffs(
        self, original: Tensor, compressed: Tensor
    ) -> tuple[tuple[Tensor, ...], tuple[Tensor, ...]]:
        """Raw and refined per-stage differences (probe surface for tests)."""
        f0 = self.backbone(original)
        fq = self.backbone(compressed)
        diffs = diff_features(f0, fq)
        return diffs, self.refiner(diffs)

    def forward(self, original: Tensor, compressed: Tensor) -> Tensor:
        f0 = self.backbone(original)
        fq = self.backbone(compressed)
        diffs = diff_features(f0, fq)
        refined = self.refiner(diffs)
        if self.config.variant == "all_features":
            agg_input = tuple(
                torch.cat([a, b, r], dim=1) for a, b, r in zip(f0, fq, refined)
            )
        else:
            agg_input = refined
        pooled = self.aggregator(agg_input)
        token = self.fusion(pooled)
        return self.head(token)

    def predict_one(self, original: Tensor, compressed: Tensor) -> Prediction:
        """Single-pair inference returning plain floats."""
        self.eval()
        with torch.no_grad():
            out = self.forward(original.unsqueeze(0), compressed.unsqueeze(0))[0]
        return Prediction(sur=float(out[0]), smr=float(out[1]))


def build_network(config: NetworkConfig) -> SurSmrNet:
    return SurSmrNet(config)


def build_variant(name: str, config: NetworkConfig) -> SurSmrNet:
    """Assemble the named architecture variant on top of shared base configs."""
    if name not in VARIANTS:
        raise ValidationError(f"unknown variant {name!r}; choose from {VARIANTS}")
    return SurSmrNet(replace(config, variant=name))
