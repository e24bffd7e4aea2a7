"""Model configuration and its flat on-disk form."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

__all__ = ["ModelConfig"]


@dataclass(frozen=True)
class ModelConfig:
    width_multiple: float = 0.5
    depth_multiple: float = 0.5
    num_classes: int = 3
    strides: tuple[int, ...] = (8, 16, 32)
    input_size: int = 1024
    use_c3msr: bool = False
    use_f3: bool = False
    use_litchi_head: bool = False
    # family-convention stage widths/depths before multipliers
    base_widths: tuple[int, ...] = (64, 128, 256, 512, 768)
    base_depths: tuple[int, ...] = (3, 6, 6, 3)
    neck_base_depth: int = 3
    head_trunk_width: int = 96

    def __post_init__(self):
        if self.width_multiple <= 0 or self.depth_multiple <= 0:
            raise ValueError("multipliers must be positive")
        if self.input_size % max(self.strides):
            raise ValueError(
                f"input_size {self.input_size} not divisible by max stride {max(self.strides)}"
            )
        if len(self.base_widths) != 5 or len(self.base_depths) != 4:
            raise ValueError("expected 5 stage widths and 4 stage depths")

    def width(self, base: int) -> int:
        """Scale a base width and snap to a multiple of 4 (min 8)."""
        return max(8, int(round(base * self.width_multiple / 4)) * 4)

    def depth(self, base: int) -> int:
        return max(1, round(base * self.depth_multiple))

    @property
    def toggles(self) -> tuple[bool, bool, bool]:
        return (self.use_c3msr, self.use_f3, self.use_litchi_head)

    def with_toggles(self, use_c3msr=None, use_f3=None, use_litchi_head=None) -> "ModelConfig":
        return replace(
            self,
            use_c3msr=self.use_c3msr if use_c3msr is None else use_c3msr,
            use_f3=self.use_f3 if use_f3 is None else use_f3,
            use_litchi_head=self.use_litchi_head if use_litchi_head is None else use_litchi_head,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("strides", "base_widths", "base_depths"):
            d[key] = list(d[key])
        return d

    @staticmethod
    def from_dict(d: dict) -> "ModelConfig":
        d = dict(d)
        for key in ("strides", "base_widths", "base_depths"):
            if key in d:
                d[key] = tuple(d[key])
        return ModelConfig(**d)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @staticmethod
    def load(path) -> "ModelConfig":
        return ModelConfig.from_dict(json.loads(Path(path).read_text()))
