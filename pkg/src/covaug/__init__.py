"""Covariance-based augmentation of PDE datasets.

Random smooth coordinate maps of the unit interval/square, the laws that
carry a solved PDE triple to new coordinates, reference solvers and
closed-form solutions, dataset recipes, and residual checks.
"""
from .covariance import augment_dataset, augment_sample, resample_field, transform_fields
from .datasets import Dataset, DatasetSpec, generate_dataset, read_dataset, write_dataset
from .grid import Grid
from .maps import (Map1D, Map2D, TrigDensityParams, check_calculus_identities, jacobi_jet,
                   random_map_1d, random_map_2d)
from .metrics import ResidualReport, rel_l2_error, relative_gain, residual_norm

__version__ = "0.1.0"

__all__ = [
    "Grid", "Map1D", "Map2D", "TrigDensityParams", "jacobi_jet", "check_calculus_identities",
    "random_map_1d", "random_map_2d", "resample_field", "transform_fields", "augment_sample",
    "augment_dataset", "Dataset", "DatasetSpec", "generate_dataset", "read_dataset",
    "write_dataset", "ResidualReport", "residual_norm", "rel_l2_error", "relative_gain",
]
