"""Handwritten character descriptor (shadow, centroid, distance and
quad-tree longest-run features) with a momentum-trained MLP classifier."""

from .descriptor import DescriptorConfig, LabeledSample, extract_descriptor
from .imagecore import GrayImage, Point, Rect, binarize, parse_pgm, preprocess, serialize_pgm
from .mlp import EvalReport, Mlp, MlpLayout, TrainConfig, evaluate, train, train_epoch
from .quadtree import Direction, PartitionMode, QuadTree, build_quadtree, longest_run

__all__ = [
    "DescriptorConfig", "LabeledSample", "extract_descriptor",
    "GrayImage", "Point", "Rect", "binarize", "parse_pgm", "preprocess", "serialize_pgm",
    "EvalReport", "Mlp", "MlpLayout", "TrainConfig", "evaluate", "train", "train_epoch",
    "Direction", "PartitionMode", "QuadTree", "build_quadtree", "longest_run",
]
__version__ = "0.1.0"
