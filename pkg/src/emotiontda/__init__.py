"""Topological signatures of talking-face videos for emotion classification."""

from .cellcomplex import Cell, CellComplex, ComplexError, closed_star, euler_characteristic, validate
from .complexbuild import AudioSignal, LandmarkFrame, build_path_complex, build_stacked_complex
from .dataset import (
    EMOTIONS,
    DataError,
    VideoRecord,
    load_landmark_track,
    load_wav,
    parse_ravdess_filename,
    split_dataset,
    synth_dataset,
)
from .delaunay import DegenerateInputError, Triangulation2D, delaunay2d
from .filtration import PLANE_LABELS, FilterFunction, Filtration, lower_star_filtration, plane_filters
from .mlp import MLPParams, TrainConfig, gradient_check, load_model, save_model, train
from .persistence import (
    PersistenceDiagram,
    betti_oracle,
    cap_infinite,
    compute_persistence,
    persistent_entropy,
)
from .signature import SignatureOptions, TopologicalSignature, extract_signature

__version__ = "0.1.0"
