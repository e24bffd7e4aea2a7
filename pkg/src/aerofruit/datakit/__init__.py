"""Dataset construction: tiling, splitting, augmentation, synthesis, label I/O."""

from .augment import AUGMENT_OPS, AugmentError, AugmentParams, augment
from .layout import append_records, iter_split, load_image, load_split, save_image, write_dataset
from .records import (
    CLASS_NAMES,
    NUM_CLASSES,
    OCCLUSION_BRANCH_LEAF,
    OCCLUSION_FRUIT,
    OCCLUSION_NONE,
    BoxAnnotation,
    ImageRecord,
    LabelFormatError,
    read_labels,
    write_labels,
)
from .splitting import DatasetSplit, split_dataset
from .synthetic import PackingError, SynthConfig, classify_occlusion, generate_synthetic
from .tiling import tile_grid, tile_image

__all__ = [
    "AUGMENT_OPS",
    "AugmentError",
    "AugmentParams",
    "augment",
    "append_records",
    "iter_split",
    "load_image",
    "load_split",
    "save_image",
    "write_dataset",
    "CLASS_NAMES",
    "NUM_CLASSES",
    "OCCLUSION_BRANCH_LEAF",
    "OCCLUSION_FRUIT",
    "OCCLUSION_NONE",
    "BoxAnnotation",
    "ImageRecord",
    "LabelFormatError",
    "read_labels",
    "write_labels",
    "DatasetSplit",
    "split_dataset",
    "PackingError",
    "SynthConfig",
    "classify_occlusion",
    "generate_synthetic",
    "tile_grid",
    "tile_image",
]
