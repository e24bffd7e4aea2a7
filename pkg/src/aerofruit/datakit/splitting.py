"""Deterministic 7:2:1 train/val/test splitting.

The split shuffles ids with a seeded generator, then takes floor(0.2 n)
for val and floor(0.1 n) for test; the remainder goes to train so the
partition is sum-preserving for any n.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["DatasetSplit", "split_dataset", "SPLIT_FRACTIONS"]

SPLIT_FRACTIONS = {"train": 0.7, "val": 0.2, "test": 0.1}


@dataclass(frozen=True)
class DatasetSplit:
    seed: int
    train: list[str] = field(default_factory=list)
    val: list[str] = field(default_factory=list)
    test: list[str] = field(default_factory=list)

    def __post_init__(self):
        buckets = [set(self.train), set(self.val), set(self.test)]
        total = sum(len(b) for b in buckets)
        union = set().union(*buckets)
        if total != len(self.train) + len(self.val) + len(self.test):
            raise ValueError("split buckets contain duplicate ids")
        if len(union) != total:
            raise ValueError("split buckets overlap")

    def bucket_of(self, image_id: str) -> str:
        for name in ("train", "val", "test"):
            if image_id in getattr(self, name):
                return name
        raise KeyError(image_id)

    def to_json(self) -> str:
        return json.dumps(
            {"seed": self.seed, "train": self.train, "val": self.val, "test": self.test},
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "DatasetSplit":
        d = json.loads(text)
        return DatasetSplit(seed=d["seed"], train=d["train"], val=d["val"], test=d["test"])

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @staticmethod
    def load(path) -> "DatasetSplit":
        return DatasetSplit.from_json(Path(path).read_text())


def split_dataset(ids: list[str], seed: int) -> DatasetSplit:
    """Partition ids 7:2:1, deterministically for a fixed seed."""
    if not ids:
        raise ValueError("cannot split an empty id list")
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate ids rejected: {dupes[:5]}")

    shuffled = sorted(ids)  # order-independent base
    random.Random(seed).shuffle(shuffled)

    n = len(shuffled)
    n_val = int(n * SPLIT_FRACTIONS["val"])
    n_test = int(n * SPLIT_FRACTIONS["test"])
    val = shuffled[:n_val]
    test = shuffled[n_val : n_val + n_test]
    train = shuffled[n_val + n_test :]
    return DatasetSplit(seed=seed, train=train, val=val, test=test)
