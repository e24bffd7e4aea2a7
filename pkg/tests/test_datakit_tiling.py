import numpy as np
import pytest

from aerofruit.datakit import BoxAnnotation, ImageRecord, tile_grid, tile_image


def make_frame(w, h, annotations=()):
    rng = np.random.default_rng(0)
    return ImageRecord(
        image_id="frame",
        pixel_size=(w, h),
        annotations=list(annotations),
        pixels=rng.integers(0, 255, size=(h, w, 3), dtype=np.uint8),
    )


def rect_clip_area(box, rect):
    """Brute-force clipping oracle: intersection area of two rectangles."""
    (bx1, by1, bx2, by2), (rx1, ry1, rx2, ry2) = box, rect
    w = max(0.0, min(bx2, rx2) - max(bx1, rx1))
    h = max(0.0, min(by2, ry2) - max(by1, ry1))
    return w * h


def test_4096x2160_gives_12_tiles():
    tiles = tile_image(make_frame(4096, 2160), tile=1024, stride=1024)
    assert len(tiles) == 12
    assert all(t.pixel_size == (1024, 1024) for t in tiles)
    assert all(t.provenance == "tiled" for t in tiles)
    # bottom row is padded: pixels beyond source height must be zero
    bottom = [t for t in tiles if t.tile_origin[1] == 2048]
    assert len(bottom) == 4
    for t in bottom:
        assert np.all(t.pixels[2160 - 2048 :, :, :] == 0)


def test_grid_covers_frame():
    grid = tile_grid(4096, 2160, 1024, 1024)
    assert len(grid) == 12
    xs = sorted({x for x, _ in grid})
    ys = sorted({y for _, y in grid})
    assert xs == [0, 1024, 2048, 3072]
    assert ys == [0, 1024, 2048]


def test_box_inside_one_tile_transforms_exactly():
    # 100x80 box at (1124, 324) lands wholly in tile (1024, 0)
    ann = BoxAnnotation.from_pixels(0, 1124, 324, 1224, 404, 4096, 2048)
    tiles = tile_image(make_frame(4096, 2048, [ann]), tile=1024, stride=1024)
    owners = [t for t in tiles if t.annotations]
    assert len(owners) == 1
    t = owners[0]
    assert t.tile_origin == (1024, 0)
    got = t.annotations[0].to_pixels(1024, 1024)
    assert got == pytest.approx((100, 324, 200, 404), abs=1e-9)


def test_straddling_box_kept_in_both_tiles():
    # 100 px wide box split 70/30 across the x=1024 boundary
    ann = BoxAnnotation.from_pixels(1, 954, 100, 1054, 200, 2048, 1024)
    frame = make_frame(2048, 1024, [ann])
    tiles = tile_image(frame, tile=1024, stride=1024)
    with_box = {t.tile_origin: t for t in tiles if t.annotations}
    assert set(with_box) == {(0, 0), (1024, 0)}

    # oracle: clipped fractions are 70% and 30% of the original area
    box_px = ann.to_pixels(2048, 1024)
    orig = (box_px[2] - box_px[0]) * (box_px[3] - box_px[1])
    left = rect_clip_area(box_px, (0, 0, 1024, 1024)) / orig
    right = rect_clip_area(box_px, (1024, 0, 2048, 1024)) / orig
    assert left == pytest.approx(0.7)
    assert right == pytest.approx(0.3)

    left_box = with_box[(0, 0)].annotations[0].to_pixels(1024, 1024)
    assert left_box == pytest.approx((954, 100, 1024, 200), abs=1e-9)
    right_box = with_box[(1024, 0)].annotations[0].to_pixels(1024, 1024)
    assert right_box == pytest.approx((0, 100, 30, 200), abs=1e-9)


def test_sliver_below_threshold_dropped():
    # 100 px wide box split 80/20: the 20% side falls below the 30% cut
    ann = BoxAnnotation.from_pixels(0, 944, 100, 1044, 200, 2048, 1024)
    tiles = tile_image(make_frame(2048, 1024, [ann]), tile=1024, stride=1024)
    with_box = [t.tile_origin for t in tiles if t.annotations]
    assert with_box == [(0, 0)]


def test_offsets_reconstruct_absolute_coordinates():
    # integer-pixel oracle: unclipped boxes must reassemble exactly
    rng = np.random.default_rng(7)
    anns = []
    for _ in range(24):
        w = int(rng.integers(16, 120))
        h = int(rng.integers(16, 120))
        x1 = int(rng.integers(0, 2048 - w))
        y1 = int(rng.integers(0, 1024 - h))
        anns.append(BoxAnnotation.from_pixels(0, x1, y1, x1 + w, y1 + h, 2048, 1024))
    frame = make_frame(2048, 1024, anns)
    tiles = tile_image(frame, tile=1024, stride=1024)

    originals = {
        tuple(int(round(v)) for v in a.to_pixels(2048, 1024)) for a in anns
    }
    reconstructed = set()
    for t in tiles:
        ox, oy = t.tile_origin
        for a in t.annotations:
            x1, y1, x2, y2 = a.to_pixels(1024, 1024)
            reconstructed.add(
                (int(round(x1 + ox)), int(round(y1 + oy)), int(round(x2 + ox)), int(round(y2 + oy)))
            )
    # every original box whose area survived intact in some tile is recovered exactly
    assert originals & reconstructed == {
        tuple(int(round(v)) for v in a.to_pixels(2048, 1024))
        for a in anns
        if any(
            rect_clip_area(a.to_pixels(2048, 1024), (ox, oy, ox + 1024, oy + 1024))
            == pytest.approx(
                (a.to_pixels(2048, 1024)[2] - a.to_pixels(2048, 1024)[0])
                * (a.to_pixels(2048, 1024)[3] - a.to_pixels(2048, 1024)[1])
            )
            for ox, oy in tile_grid(2048, 1024, 1024, 1024)
        )
    }


def test_small_frame_single_padded_tile():
    tiles = tile_image(make_frame(600, 400), tile=1024, stride=1024)
    assert len(tiles) == 1
    assert tiles[0].pixel_size == (1024, 1024)
    assert np.all(tiles[0].pixels[400:, :, :] == 0)
    assert np.all(tiles[0].pixels[:, 600:, :] == 0)


def test_rejects_bad_tile_args():
    with pytest.raises(ValueError):
        tile_image(make_frame(100, 100), tile=0)
    with pytest.raises(ValueError):
        tile_image(make_frame(100, 100), tile=64, stride=-1)


def test_missing_pixels_rejected():
    rec = ImageRecord("nopix", (2048, 1024))
    with pytest.raises(ValueError):
        tile_image(rec)
