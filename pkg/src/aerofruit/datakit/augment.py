"""Photometric train-set augmentations.

All four transforms leave geometry untouched, so annotation lists pass
through bit-for-bit. Augmenting val/test members is refused when the
split is supplied: evaluation data must stay untouched.
"""

from __future__ import annotations

import numpy as np

from .records import ImageRecord
from .splitting import DatasetSplit

__all__ = ["augment", "AUGMENT_OPS", "AugmentError", "AugmentParams"]


class AugmentError(ValueError):
    pass


class AugmentParams:
    """Default knobs for each transform, all on the 8-bit pixel scale."""

    gaussian_sigma = 10.0
    salt_pepper_p = 0.02
    brighten_gain = 1.25
    darken_gain = 0.75


def _gaussian_noise(img: np.ndarray, rng: np.random.Generator, sigma: float) -> np.ndarray:
    noisy = img.astype(np.float64) + rng.normal(0.0, sigma, size=img.shape)
    return np.clip(np.rint(noisy), 0, 255).astype(np.uint8)


def _salt_pepper(img: np.ndarray, rng: np.random.Generator, p: float) -> np.ndarray:
    out = img.copy()
    if p <= 0:
        return out
    mask = rng.random(img.shape[:2])
    out[mask < p / 2] = 0
    out[(mask >= p / 2) & (mask < p)] = 255
    return out


def _gain(img: np.ndarray, gain: float) -> np.ndarray:
    return np.clip(np.rint(img.astype(np.float64) * gain), 0, 255).astype(np.uint8)


AUGMENT_OPS = ("gaussian_noise", "salt_pepper", "brighten", "darken")


def augment(
    rec: ImageRecord,
    op: str,
    seed: int,
    *,
    split: DatasetSplit | None = None,
    params: AugmentParams | None = None,
) -> ImageRecord:
    """Apply one photometric transform, returning a new augmented record."""
    if op not in AUGMENT_OPS:
        raise AugmentError(f"unknown augmentation {op!r}; choose from {AUGMENT_OPS}")
    if split is not None and rec.image_id not in split.train:
        raise AugmentError(
            f"refusing to augment {rec.image_id!r}: not a train-split member"
        )
    params = params or AugmentParams()
    img = rec.require_pixels()
    rng = np.random.default_rng(seed)

    if op == "gaussian_noise":
        out = _gaussian_noise(img, rng, params.gaussian_sigma)
    elif op == "salt_pepper":
        out = _salt_pepper(img, rng, params.salt_pepper_p)
    elif op == "brighten":
        out = _gain(img, params.brighten_gain)
    else:
        out = _gain(img, params.darken_gain)

    return rec.with_(
        image_id=f"{rec.image_id}_{op}",
        pixels=out,
        provenance="augmented",
        annotations=list(rec.annotations),
    )
