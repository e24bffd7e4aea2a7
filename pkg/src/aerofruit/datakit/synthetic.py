"""Synthetic clustered-orchard image generator.

Draws reddish fruit disks in clusters over a textured green canopy, with
elongated brown/green strokes standing in for branches and leaves. Every
fruit's occlusion class is derived from the actual raster geometry:

* class 1 (fruit occluded)       -- disks drawn later cover > 20% of it
* class 2 (branch/leaf occluded) -- stroke pixels cover > 20% of it
* class 0 (clear)                -- otherwise

Ground truth boxes are the disks' bounding boxes. Output is byte-stable
for a fixed rng_seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import cv2
import numpy as np

from .records import (
    OCCLUSION_BRANCH_LEAF,
    OCCLUSION_FRUIT,
    OCCLUSION_NONE,
    BoxAnnotation,
    ImageRecord,
)

__all__ = ["SynthConfig", "PackingError", "generate_synthetic", "classify_occlusion"]

# Fraction of a disk that must be covered before it counts as occluded.
OVERLAP_THRESHOLD = 0.20
# A new fruit may cover at most this fraction of any earlier fruit, else
# it is re-drawn; near-total duplicates make useless ground truth.
MAX_PAIR_COVER = 0.80
PLACEMENT_RETRIES = 60


class PackingError(RuntimeError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    image_size: int = 256
    num_images: int = 16
    fruit_count_range: tuple[int, int] = (4, 9)
    fruit_radius_range_px: tuple[int, int] = (10, 18)
    cluster_count_range: tuple[int, int] = (1, 3)
    cluster_spread_px: float = 36.0
    leaf_stroke_density: float = 0.5  # expected strokes per fruit
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("fruit_count_range", "fruit_radius_range_px", "cluster_count_range"):
            lo, hi = getattr(self, name)
            if lo <= 0 or hi < lo:
                raise ValueError(f"{name} must be a non-empty positive range, got ({lo}, {hi})")
        if self.image_size <= 0 or self.num_images <= 0:
            raise ValueError("image_size and num_images must be positive")
        if self.leaf_stroke_density < 0:
            raise ValueError("leaf_stroke_density must be >= 0")


@dataclass
class _Fruit:
    cx: int
    cy: int
    radius: int


def _disk_mask(size: int, fruit: _Fruit) -> np.ndarray:
    mask = np.zeros((size, size), dtype=np.uint8)
    cv2.circle(mask, (fruit.cx, fruit.cy), fruit.radius, 1, thickness=-1)
    return mask.astype(bool)


def _canopy_background(size: int, rng: np.random.Generator) -> np.ndarray:
    base = np.empty((size, size, 3), dtype=np.float64)
    base[..., 0] = 44  # R
    base[..., 1] = 96  # G
    base[..., 2] = 40  # B
    base += rng.normal(0, 9, size=(size, size, 3))
    # a few blurred dark blotches for low-frequency canopy structure
    blotch = np.zeros((size, size), dtype=np.float64)
    for _ in range(max(3, size // 48)):
        x, y = rng.integers(0, size, 2)
        r = int(rng.integers(size // 10, size // 4))
        cv2.circle(blotch, (int(x), int(y)), r, float(rng.uniform(-22, 22)), -1)
    blotch = cv2.GaussianBlur(blotch, (0, 0), sigmaX=size / 24)
    base += blotch[..., None]
    return np.clip(base, 0, 255).astype(np.uint8)


def _place_fruits(cfg: SynthConfig, rng: np.random.Generator) -> list[_Fruit]:
    size = cfg.image_size
    n = int(rng.integers(cfg.fruit_count_range[0], cfg.fruit_count_range[1] + 1))
    n_clusters = int(rng.integers(cfg.cluster_count_range[0], cfg.cluster_count_range[1] + 1))
    r_lo, r_hi = cfg.fruit_radius_range_px
    if 2 * r_hi >= size:
        raise PackingError(f"fruit radius up to {r_hi}px cannot fit a {size}px image")

    margin = r_hi + 1
    centers = rng.uniform(margin, size - margin, size=(n_clusters, 2))

    fruits: list[_Fruit] = []
    for _ in range(n):
        radius = int(rng.integers(r_lo, r_hi + 1))
        placed = False
        for _ in range(PLACEMENT_RETRIES):
            cx, cy = centers[int(rng.integers(0, n_clusters))] + rng.normal(
                0, cfg.cluster_spread_px, 2
            )
            cx, cy = int(round(cx)), int(round(cy))
            if not (radius <= cx < size - radius and radius <= cy < size - radius):
                continue
            cand = _Fruit(cx, cy, radius)
            if all(_pair_cover(prev, cand) <= MAX_PAIR_COVER for prev in fruits):
                fruits.append(cand)
                placed = True
                break
        if not placed:
            raise PackingError(
                f"could not place fruit {len(fruits) + 1}/{n} after "
                f"{PLACEMENT_RETRIES} retries (image {size}px, radius {radius}px)"
            )
    return fruits


def _pair_cover(covered: _Fruit, coverer: _Fruit) -> float:
    """Fraction of `covered` disk area hidden by `coverer` (circle overlap)."""
    d = float(np.hypot(covered.cx - coverer.cx, covered.cy - coverer.cy))
    r1, r2 = covered.radius, coverer.radius
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r2 - r1) and r2 >= r1:
        return 1.0
    if d <= abs(r2 - r1):
        return (r2 / r1) ** 2
    a1 = r1 * r1 * np.arccos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = r2 * r2 * np.arccos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    a3 = 0.5 * np.sqrt(
        max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
    )
    return float((a1 + a2 - a3) / (np.pi * r1 * r1))


def _draw_strokes(
    img: np.ndarray, fruits: list[_Fruit], cfg: SynthConfig, rng: np.random.Generator
) -> np.ndarray:
    """Draw branch/leaf strokes on top of everything; returns their mask."""
    size = cfg.image_size
    mask = np.zeros((size, size), dtype=np.uint8)
    n_strokes = int(round(cfg.leaf_stroke_density * len(fruits)))
    for _ in range(n_strokes):
        # bias strokes toward fruit neighborhoods so occlusion actually happens
        anchor = fruits[int(rng.integers(0, len(fruits)))]
        ax = anchor.cx + rng.normal(0, anchor.radius)
        ay = anchor.cy + rng.normal(0, anchor.radius)
        angle = rng.uniform(0, np.pi)
        length = rng.uniform(0.3, 0.9) * size
        dx, dy = np.cos(angle) * length / 2, np.sin(angle) * length / 2
        p1 = (int(round(ax - dx)), int(round(ay - dy)))
        p2 = (int(round(ax + dx)), int(round(ay + dy)))
        thickness = int(rng.integers(2, max(3, anchor.radius // 2) + 1))
        if rng.random() < 0.5:
            color = (74, 52, 28)  # branch brown
        else:
            color = (30, 64, 24)  # leaf dark green
        cv2.line(img, p1, p2, color, thickness, lineType=cv2.LINE_8)
        cv2.line(mask, p1, p2, 1, thickness, lineType=cv2.LINE_8)
    return mask.astype(bool)


def classify_occlusion(
    size: int, fruits: list[_Fruit], stroke_mask: np.ndarray
) -> list[int]:
    """Derive each fruit's class from raster masks (draw order matters)."""
    disk_masks = [_disk_mask(size, f) for f in fruits]
    classes: list[int] = []
    later_union = np.zeros((size, size), dtype=bool)
    unions: list[np.ndarray] = []
    for m in reversed(disk_masks):  # union of strictly-later disks, per fruit
        unions.append(later_union.copy())
        later_union = later_union | m
    unions.reverse()
    for m, later in zip(disk_masks, unions):
        area = int(m.sum())
        if area == 0:
            classes.append(OCCLUSION_NONE)
            continue
        if int((m & later).sum()) > OVERLAP_THRESHOLD * area:
            classes.append(OCCLUSION_FRUIT)
        elif int((m & stroke_mask).sum()) > OVERLAP_THRESHOLD * area:
            classes.append(OCCLUSION_BRANCH_LEAF)
        else:
            classes.append(OCCLUSION_NONE)
    return classes


def _render_one(cfg: SynthConfig, index: int, rng: np.random.Generator) -> ImageRecord:
    size = cfg.image_size
    img = _canopy_background(size, rng)
    fruits = _place_fruits(cfg, rng)

    for f in fruits:
        tint = rng.integers(-18, 19, 3)
        color = tuple(int(np.clip(c + t, 0, 255)) for c, t in zip((204, 48, 56), tint))
        cv2.circle(img, (f.cx, f.cy), f.radius, color, thickness=-1, lineType=cv2.LINE_8)
        # small specular dot keeps disks from being perfectly flat
        hx = f.cx - f.radius // 3
        hy = f.cy - f.radius // 3
        cv2.circle(img, (hx, hy), max(1, f.radius // 4), (236, 140, 140), -1, cv2.LINE_8)

    stroke_mask = _draw_strokes(img, fruits, cfg, rng)
    classes = classify_occlusion(size, fruits, stroke_mask)

    annotations = [
        BoxAnnotation.from_pixels(
            cls,
            max(0, f.cx - f.radius),
            max(0, f.cy - f.radius),
            min(size, f.cx + f.radius),
            min(size, f.cy + f.radius),
            size,
            size,
        )
        for f, cls in zip(fruits, classes)
    ]
    return ImageRecord(
        image_id=f"synth_{cfg.rng_seed:04d}_{index:04d}",
        pixel_size=(size, size),
        annotations=annotations,
        provenance="synthetic",
        pixels=img,
    )


def generate_synthetic(cfg: SynthConfig) -> list[ImageRecord]:
    rng = np.random.default_rng(cfg.rng_seed)
    return [_render_one(cfg, i, rng) for i in range(cfg.num_images)]
