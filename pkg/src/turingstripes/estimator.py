"""Scikit-learn style wrapper around the leading-order stripe classifier."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .boundaries import EIGEN_NAMES, FLAG_NAMES, RegionLabel, classify_arrays, leading_eigen_arrays
from .coefficients import compute_coefficients
from .errors import ConfigError
from .model import SystemSpec, designed_example, linear_coeffs

__all__ = ["StripeStabilityClassifier"]

INSTABILITIES = ("zigzag", "eckhaus", "square", "hex", "quasihex")


def _resolve_system(system, epsilon):
    if isinstance(system, SystemSpec):
        return system
    if system == "designed_example":
        return designed_example(epsilon)
    raise ConfigError(f"unknown system {system!r}; pass a SystemSpec or 'designed_example'")


class StripeStabilityClassifier(TransformerMixin, BaseEstimator):
    """Classify stripes at parameter points ``(alpha, beta, kappa_tilde[, q])``.

    Parameters
    ----------
    system
        A :class:`SystemSpec` or the preset name ``"designed_example"``.
    epsilon
        Quadratic strength for the preset.
    q_eff
        Effective quadratic coefficient; ``None`` uses the computed ``q``
        (scaled by ``q_scale``).  A fourth input column overrides it per row.
    theta, ell_tilde_square
        Quasi-hexagonal detuning parameter and quasi-square detuning.
    q_scale
        Calibration factor applied to the computed ``q``.
    """

    def __init__(self, system="designed_example", epsilon=0.4, q_eff=None, theta=1.0,
                 ell_tilde_square=0.0, q_scale=1.0):
        self.system = system
        self.epsilon = epsilon
        self.q_eff = q_eff
        self.theta = theta
        self.ell_tilde_square = ell_tilde_square
        self.q_scale = q_scale

    def fit(self, X=None, y=None):
        """Compute the linear data and expansion coefficients; ``X`` is only validated."""
        sys = _resolve_system(self.system, self.epsilon)
        if not (0.0 < self.theta <= 1.0):
            raise ConfigError(f"theta must lie in (0, 1], got {self.theta}")
        self.turing_ = linear_coeffs(sys)
        self.coeffs_ = compute_coefficients(sys, self.turing_, q_scale=self.q_scale)
        self.q_ = float(self.coeffs_.q if self.q_eff is None else self.q_eff)
        if X is not None:
            X = self._validate(X, reset=True)
        else:
            self.n_features_in_ = 3
        return self

    def _validate(self, X, reset=False):
        X = check_array(X, dtype=float, ensure_2d=True)
        if X.shape[1] not in (3, 4):
            raise ValueError(f"X must have 3 or 4 columns (alpha, beta, kappa_tilde[, q]); got {X.shape[1]}")
        if reset:
            self.n_features_in_ = X.shape[1]
        return X

    def _columns(self, X):
        check_is_fitted(self, "coeffs_")
        X = self._validate(X)
        q = X[:, 3] if X.shape[1] == 4 else np.full(len(X), self.q_)
        return X[:, 0], X[:, 1], X[:, 2], q

    def predict_flags(self, X) -> np.ndarray:
        """Boolean array with columns ordered as :data:`FLAG_NAMES`."""
        a, b, k, q = self._columns(X)
        f = classify_arrays(self.coeffs_, self.turing_, a, b, k, q, self.theta, self.ell_tilde_square)
        return np.column_stack([f[name] for name in FLAG_NAMES])

    def predict_labels(self, X) -> list[RegionLabel]:
        a, b, k, q = self._columns(X)
        f = classify_arrays(self.coeffs_, self.turing_, a, b, k, q, self.theta, self.ell_tilde_square)
        return [RegionLabel(*(bool(f[name][i]) for name in FLAG_NAMES), bool(f["marginal"][i]))
                for i in range(len(a))]

    def predict(self, X) -> np.ndarray:
        """``"absent"``, ``"stable"`` or the active instabilities joined by ``+``."""
        flags = self.predict_flags(X)
        idx = {name: i for i, name in enumerate(FLAG_NAMES)}
        out = []
        for row in flags:
            if not row[idx["exists"]]:
                out.append("absent")
            elif row[idx["stable"]]:
                out.append("stable")
            else:
                out.append("+".join(name for name in INSTABILITIES if row[idx[name]]))
        return np.array(out, dtype=object)

    def transform(self, X) -> np.ndarray:
        """Leading-order indicators with columns ordered as :data:`EIGEN_NAMES`."""
        a, b, k, q = self._columns(X)
        lam = leading_eigen_arrays(self.coeffs_, self.turing_, a, b, k, q, self.theta, self.ell_tilde_square)
        return np.column_stack([lam[name] for name in EIGEN_NAMES])
