from .crop import AnnotationError, CropAnnotation, CropOutOfBoundsError, crop_and_resize, load_annotations
from .io import (
    DatasetError,
    ManifestEntry,
    read_label_map,
    read_manifest,
    read_sample,
    write_label_map,
    write_manifest,
    write_sample,
)
from .metrics import ShapeMismatchError, confusion, miou, per_image_miou
from .splits import InsufficientSamplesError, make_splits
from .stats import LabelStats, compute_stats
