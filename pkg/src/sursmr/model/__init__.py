from .backbone import BackboneConfig, FourStageBackbone, extract_features
from .dfrl import DFRL, DiffRefineBlock, IdentityRefiner, diff_features
from .fusion import FlattenLinearFusion, MixerConfig, MixerFusion, TransformerFusion
from .head import RegressionHead
from .loss import LossWeights, joint_loss
from .mhaap import MHAAP, ConvPoolAggregator, MHAAPConfig
from .network import (
    VARIANTS,
    NetworkConfig,
    Prediction,
    SurSmrNet,
    build_network,
    build_variant,
)

__all__ = [
    "BackboneConfig",
    "FourStageBackbone",
    "extract_features",
    "DFRL",
    "DiffRefineBlock",
    "IdentityRefiner",
    "diff_features",
    "MixerConfig",
    "MixerFusion",
    "TransformerFusion",
    "FlattenLinearFusion",
    "RegressionHead",
    "LossWeights",
    "joint_loss",
    "MHAAP",
    "ConvPoolAggregator",
    "MHAAPConfig",
    "VARIANTS",
    "NetworkConfig",
    "Prediction",
    "SurSmrNet",
    "build_network",
    "build_variant",
]
