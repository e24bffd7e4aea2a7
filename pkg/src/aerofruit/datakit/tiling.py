"""Sliding-window tiling of large aerial frames.

Frames are cut into tile_size x tile_size windows on a regular stride
grid; edge remainders are zero-padded up to the full tile. Boxes are
clipped to each window and kept only while they retain at least
``min_area_frac`` of their original area (default 30%), so slivers left
by the cut do not become unlearnable targets.
"""

from __future__ import annotations

import math

import numpy as np

from .records import BoxAnnotation, ImageRecord

__all__ = ["tile_image", "tile_grid", "DEFAULT_TILE", "DEFAULT_MIN_AREA_FRAC"]

DEFAULT_TILE = 1024
DEFAULT_MIN_AREA_FRAC = 0.30


def tile_grid(frame_w: int, frame_h: int, tile: int, stride: int) -> list[tuple[int, int]]:
    """Top-left corners (x0, y0) of every window covering the frame."""
    def starts(extent: int) -> list[int]:
        if extent <= tile:
            return [0]
        n = math.ceil((extent - tile) / stride) + 1
        return [i * stride for i in range(n)]

    return [(x0, y0) for y0 in starts(frame_h) for x0 in starts(frame_w)]


def tile_image(
    frame: ImageRecord,
    tile: int = DEFAULT_TILE,
    stride: int | None = None,
    min_area_frac: float = DEFAULT_MIN_AREA_FRAC,
) -> list[ImageRecord]:
    """Cut one frame into padded tiles with re-normalized annotations."""
    stride = tile if stride is None else stride
    if tile <= 0 or stride <= 0:
        raise ValueError(f"tile and stride must be positive, got {tile}, {stride}")
    frame_w, frame_h = frame.pixel_size
    pixels = frame.require_pixels()

    out: list[ImageRecord] = []
    for x0, y0 in tile_grid(frame_w, frame_h, tile, stride):
        crop = pixels[y0 : min(y0 + tile, frame_h), x0 : min(x0 + tile, frame_w)]
        if crop.shape[0] != tile or crop.shape[1] != tile:
            padded = np.zeros((tile, tile) + crop.shape[2:], dtype=crop.dtype)
            padded[: crop.shape[0], : crop.shape[1]] = crop
            crop = padded
        else:
            crop = crop.copy()

        kept: list[BoxAnnotation] = []
        for ann in frame.annotations:
            bx1, by1, bx2, by2 = ann.to_pixels(frame_w, frame_h)
            cx1, cy1 = max(bx1, x0), max(by1, y0)
            cx2, cy2 = min(bx2, x0 + tile), min(by2, y0 + tile)
            if cx2 <= cx1 or cy2 <= cy1:
                continue
            orig_area = (bx2 - bx1) * (by2 - by1)
            if (cx2 - cx1) * (cy2 - cy1) < min_area_frac * orig_area:
                continue
            kept.append(
                BoxAnnotation.from_pixels(
                    ann.class_id, cx1 - x0, cy1 - y0, cx2 - x0, cy2 - y0, tile, tile
                )
            )

        out.append(
            ImageRecord(
                image_id=f"{frame.image_id}_x{x0}_y{y0}",
                pixel_size=(tile, tile),
                annotations=kept,
                provenance="tiled",
                pixels=crop,
                tile_origin=(x0, y0),
            )
        )
    return out
