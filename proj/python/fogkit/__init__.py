"""Python front end for the fogkit C++ core."""

from ._core import (
    ClassError,
    FogkitError,
    FormatError,
    LengthError,
    NotFound,
    SpecError,
    band_power,
    config_keys,
    emg_features,
    evaluate_independent,
    freezing_index,
    metrics,
    pfg,
    rhythm_energies,
    roc_auc,
    sample_entropy,
    svm_decision,
    svm_train,
    synth,
    total_wavelet_entropy,
    window_starts,
)

__all__ = [
    "ClassError",
    "FogkitError",
    "FormatError",
    "LengthError",
    "NotFound",
    "SpecError",
    "band_power",
    "config_keys",
    "emg_features",
    "evaluate_independent",
    "freezing_index",
    "metrics",
    "pfg",
    "rhythm_energies",
    "roc_auc",
    "sample_entropy",
    "svm_decision",
    "svm_train",
    "synth",
    "total_wavelet_entropy",
    "window_starts",
]
