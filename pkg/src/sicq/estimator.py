"""scikit-learn adapter: the state <-> probability dictionary as a transformer.

``SicStateTransformer`` wraps frame construction in ``fit`` and the
rho -> p / p -> rho maps in ``transform`` / ``inverse_transform``, so the
representation drops into sklearn pipelines alongside ordinary feature
transforms.  Samples are density matrices, stacked (n, d, d) or flattened
row-major (n, d*d).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .sicframe import known_sic, search_sic
from .sicrep import prob_to_rho, rho_to_prob
from .validation import check_prob_vector


def _as_state_stack(X, d: int, name: str = "X") -> np.ndarray:
    """Accept (n, d, d) stacks or (n, d*d) row-major flattenings."""
    arr = np.asarray(X, dtype=complex)
    if arr.ndim == 2 and arr.shape == (d, d):
        arr = arr[None, :, :]
    elif arr.ndim == 2 and arr.shape[1] == d * d:
        arr = arr.reshape(-1, d, d)
    if arr.ndim != 3 or arr.shape[1:] != (d, d):
        raise ValueError(f"{name} must be (n, {d}, {d}) or (n, {d * d}), got {np.shape(X)}")
    return arr


class SicStateTransformer(TransformerMixin, BaseEstimator):
    """Map density matrices to SIC outcome probabilities and back.

    Parameters
    ----------
    dim : Hilbert-space dimension d.
    mode : "auto" uses the analytic frame for d in {2, 3} and searches
        otherwise; "search" always searches; "analytic" requires d in {2, 3}.
    seeds : seed list for the search (tried in order, first success wins).
    max_iters, target_residual : search budget and acceptance residual.
    validate : check that inputs are density operators before transforming.

    Attributes
    ----------
    frame_ : the fitted :class:`~sicq.sicframe.SicFrame`.
    """

    def __init__(self, dim=2, mode="auto", seeds=tuple(range(16)),
                 max_iters=1500, target_residual=1e-8, validate=True):
        self.dim = dim
        self.mode = mode
        self.seeds = seeds
        self.max_iters = max_iters
        self.target_residual = target_residual
        self.validate = validate

    def fit(self, X=None, y=None):
        """Build the SIC frame; X is ignored (the frame depends only on dim)."""
        d = int(self.dim)
        if self.mode not in ("auto", "search", "analytic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "analytic" or (self.mode == "auto" and d in (2, 3)):
            self.frame_ = known_sic(d)
        else:
            self.frame_ = search_sic(d, self.seeds, max_iters=self.max_iters,
                                     target_residual=self.target_residual)
        self.n_features_in_ = d * d
        return self

    def _check_fitted(self):
        if not hasattr(self, "frame_"):
            raise NotFittedError("SicStateTransformer is not fitted; call fit() first")

    def transform(self, X) -> np.ndarray:
        """Density matrices -> (n, d^2) probability rows."""
        self._check_fitted()
        d = self.frame_.dim
        states = _as_state_stack(X, d)
        if self.validate:
            return np.stack([rho_to_prob(self.frame_, rho) for rho in states])
        p = np.real(np.einsum("nab,iba->ni", states, self.frame_.projectors)) / d
        return p

    def inverse_transform(self, P) -> np.ndarray:
        """(n, d^2) probability rows -> density matrices (n, d, d)."""
        self._check_fitted()
        d = self.frame_.dim
        arr = np.asarray(P, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != d * d:
            raise ValueError(f"P must be (n, {d * d}), got {arr.shape}")
        if self.validate:
            for row in arr:
                check_prob_vector(row, length=d * d)
        return np.stack([prob_to_rho(self.frame_, row) for row in arr])
