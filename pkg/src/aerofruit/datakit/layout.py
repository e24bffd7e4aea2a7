"""On-disk dataset layout.

    root/
      images/{train,val,test}/<id>.png
      labels/{train,val,test}/<id>.txt
      split.json        {seed, train: [...], val: [...], test: [...]}
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from .records import BoxAnnotation, ImageRecord, read_labels, write_labels
from .splitting import DatasetSplit

__all__ = ["write_dataset", "load_split", "iter_split", "save_image", "load_image"]

BUCKETS = ("train", "val", "test")


def save_image(path, pixels: np.ndarray) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    ok = cv2.imwrite(str(path), cv2.cvtColor(pixels, cv2.COLOR_RGB2BGR))
    if not ok:
        raise IOError(f"failed to write image {path}")


def load_image(path) -> np.ndarray:
    bgr = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if bgr is None:
        raise IOError(f"failed to read image {path}")
    return cv2.cvtColor(bgr, cv2.COLOR_BGR2RGB)


def write_dataset(root, records: list[ImageRecord], split: DatasetSplit) -> None:
    """Materialize records under root according to the split."""
    root = Path(root)
    by_id = {r.image_id: r for r in records}
    missing = [i for b in BUCKETS for i in getattr(split, b) if i not in by_id]
    if missing:
        raise ValueError(f"split references unknown image ids: {missing[:5]}")

    for bucket in BUCKETS:
        for image_id in getattr(split, bucket):
            rec = by_id[image_id]
            save_image(root / "images" / bucket / f"{image_id}.png", rec.require_pixels())
            label_path = root / "labels" / bucket / f"{image_id}.txt"
            label_path.parent.mkdir(parents=True, exist_ok=True)
            write_labels(label_path, rec.annotations)
    split.save(root / "split.json")


def load_split(root) -> DatasetSplit:
    return DatasetSplit.load(Path(root) / "split.json")


def iter_split(root, bucket: str):
    """Yield (image_id, pixels, annotations) for one bucket, sorted by id."""
    root = Path(root)
    if bucket not in BUCKETS:
        raise ValueError(f"bucket must be one of {BUCKETS}, got {bucket!r}")
    image_dir = root / "images" / bucket
    label_dir = root / "labels" / bucket
    for img_path in sorted(image_dir.glob("*.png")):
        image_id = img_path.stem
        label_path = label_dir / f"{image_id}.txt"
        if not label_path.exists():
            raise FileNotFoundError(
                f"label file missing for {bucket} image {image_id!r}: {label_path}"
            )
        yield image_id, load_image(img_path), read_labels(label_path)


def append_records(root, records: list[ImageRecord], bucket: str) -> list[str]:
    """Add extra records (e.g. augmented ones) to an existing bucket."""
    root = Path(root)
    ids = []
    for rec in records:
        save_image(root / "images" / bucket / f"{rec.image_id}.png", rec.require_pixels())
        label_path = root / "labels" / bucket / f"{rec.image_id}.txt"
        label_path.parent.mkdir(parents=True, exist_ok=True)
        write_labels(label_path, rec.annotations)
        ids.append(rec.image_id)
    return ids
