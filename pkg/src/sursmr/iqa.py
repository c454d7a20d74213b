"""Built-in full-reference quality scorers: PSNR and single-scale SSIM.

Both operate on 8-bit-range images (arrays in [0, 255], any float or integer
dtype) and are higher-is-better. The remaining ensemble members enter through
external score tables; see the score-table file format.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import convolve2d

from .errors import ValidationError
from .proxy_labels import Polarity, ScorerDescriptor, ScorerOrigin

#: PSNR returned for bit-identical images instead of infinity.
PSNR_CAP_DB = 100.0

BUILTIN_SCORERS = {
    "psnr": ScorerDescriptor("psnr", Polarity.HIGHER_BETTER, ScorerOrigin.BUILTIN),
    "ssim": ScorerDescriptor("ssim", Polarity.HIGHER_BETTER, ScorerOrigin.BUILTIN),
}


def _check_pair(reference: np.ndarray, distorted: np.ndarray) -> None:
    if reference.shape != distorted.shape:
        raise ValidationError(
            f"image dimension mismatch: {reference.shape} vs {distorted.shape}"
        )
    if reference.ndim not in (2, 3):
        raise ValidationError(f"expected 2D or 3D image, got ndim={reference.ndim}")


def psnr(reference: np.ndarray, distorted: np.ndarray, cap_db: float = PSNR_CAP_DB) -> float:
    """Peak signal-to-noise ratio in dB over an 8-bit dynamic range.

    Identical images return `cap_db` rather than infinity so downstream
    normalization stays finite.
    """
    _check_pair(reference, distorted)
    ref = np.asarray(reference, dtype=np.float64)
    dis = np.asarray(distorted, dtype=np.float64)
    mse = np.mean((ref - dis) ** 2)
    if mse == 0.0:
        return cap_db
    return min(cap_db, 10.0 * np.log10(255.0**2 / mse))


def _gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g1d = np.exp(-(coords**2) / (2.0 * sigma**2))
    win = np.outer(g1d, g1d)
    return win / win.sum()


def _ssim_single_channel(ref: np.ndarray, dis: np.ndarray, window: np.ndarray) -> float:
    k1, k2, dynamic_range = 0.01, 0.03, 255.0
    c1 = (k1 * dynamic_range) ** 2
    c2 = (k2 * dynamic_range) ** 2

    mu_x = convolve2d(ref, window, mode="valid")
    mu_y = convolve2d(dis, window, mode="valid")
    mu_xx = mu_x * mu_x
    mu_yy = mu_y * mu_y
    mu_xy = mu_x * mu_y

    sigma_xx = convolve2d(ref * ref, window, mode="valid") - mu_xx
    sigma_yy = convolve2d(dis * dis, window, mode="valid") - mu_yy
    sigma_xy = convolve2d(ref * dis, window, mode="valid") - mu_xy

    ssim_map = ((2 * mu_xy + c1) * (2 * sigma_xy + c2)) / (
        (mu_xx + mu_yy + c1) * (sigma_xx + sigma_yy + c2)
    )
    return float(np.mean(ssim_map))


def ssim(reference: np.ndarray, distorted: np.ndarray) -> float:
    """Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), mean over the map.

    Multichannel images are scored per channel and averaged.
    """
    _check_pair(reference, distorted)
    ref = np.asarray(reference, dtype=np.float64)
    dis = np.asarray(distorted, dtype=np.float64)
    if min(ref.shape[0], ref.shape[1]) < 11:
        raise ValidationError(
            f"image too small for the 11x11 SSIM window: {ref.shape}"
        )
    window = _gaussian_window()
    if ref.ndim == 2:
        return _ssim_single_channel(ref, dis, window)
    channels = [
        _ssim_single_channel(ref[..., c], dis[..., c], window)
        for c in range(ref.shape[2])
    ]
    return float(np.mean(channels))


def score_builtin(scorer_id: str, reference: np.ndarray, distorted: np.ndarray) -> float:
    if scorer_id == "psnr":
        return psnr(reference, distorted)
    if scorer_id == "ssim":
        return ssim(reference, distorted)
    raise ValidationError(
        f"unknown builtin scorer {scorer_id!r}; choose from {sorted(BUILTIN_SCORERS)}"
    )
