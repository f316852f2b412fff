"""Spectral and bispectral phenotyping of annual spatial panels."""

from specphen._core import (
    band_power,
    bispectral_intensity,
    demean,
    dft,
    find_breakpoint,
    kmeans,
    moran_permutation,
    morans_i,
    periodogram,
    run_pipeline,
    spearman,
    spectrum,
)

__all__ = [
    "band_power",
    "bispectral_intensity",
    "demean",
    "dft",
    "find_breakpoint",
    "kmeans",
    "moran_permutation",
    "morans_i",
    "periodogram",
    "run_pipeline",
    "spearman",
    "spectrum",
]
