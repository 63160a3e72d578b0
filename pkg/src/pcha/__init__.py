"""Principal-component highly adaptive lasso (PCHAL) and ridge (PCHAR) regression."""

from .data import Dataset, Scaler, load_covariates_csv, load_csv, make_folds, scale_apply, scale_fit
from .errors import DataError, InfeasibleError, ModelFileError, NumericError, PCHAError
from .estimators import FittedModel, fit_model, fit_pchal, fit_pchar, predict
from .kernel import KernelConfig, center_cross, center_gram, cross_gram, gram
from .modelio import load_model, save_model
from .spectral import eig_sym, sine_eigensystem
from .tuning import TuningGrid, TuningReport, profile_m, tune

__version__ = "0.1.0"

__all__ = [
    "Dataset", "Scaler", "load_csv", "load_covariates_csv", "make_folds", "scale_fit",
    "scale_apply", "PCHAError", "DataError", "ModelFileError", "NumericError",
    "InfeasibleError", "FittedModel", "fit_model", "fit_pchal", "fit_pchar", "predict",
    "KernelConfig", "gram", "cross_gram", "center_gram", "center_cross", "load_model",
    "save_model", "eig_sym", "sine_eigensystem", "TuningGrid", "TuningReport", "profile_m",
    "tune",
]
