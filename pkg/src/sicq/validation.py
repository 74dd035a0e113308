"""Input validation helpers.

Quantum objects are plain numpy arrays throughout the package: operators are
(d, d) complex matrices, POVMs are (m, d, d) stacks of effects, probability
vectors are (n,) floats, conditional matrices are (m, n) column-stochastic
floats.  The helpers here coerce array-likes, check the defining invariants
to tolerance, and raise ValueError with a message naming the offending input.

Default tolerances: DEFAULT_TOL (1e-9) for validity checks on arbitrary
inputs, EXACT_TOL (1e-12) for identities on analytically constructed ones.
"""

from __future__ import annotations

import os

import numpy as np

DEFAULT_TOL = 1e-9
EXACT_TOL = 1e-12

_TOL_ENV_VAR = "SICQ_DEFAULT_TOL"


def default_tol() -> float:
    """Default validity tolerance, overridable via the SICQ_DEFAULT_TOL env var."""
    raw = os.environ.get(_TOL_ENV_VAR)
    return float(raw) if raw else DEFAULT_TOL


def as_complex_matrix(a, dim: int | None = None, name: str = "matrix") -> np.ndarray:
    """Coerce to a square (d, d) complex array, optionally pinning d."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise ValueError(f"{name} has dimension {m.shape[0]}, expected {dim}")
    return m


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T)))


def check_hermitian(a, tol: float | None = None, name: str = "matrix") -> np.ndarray:
    m = as_complex_matrix(a, name=name)
    tol = default_tol() if tol is None else tol
    err = hermiticity_error(m)
    if err > tol:
        raise ValueError(f"{name} is not Hermitian: max|A - A^dag| = {err:.3e} > {tol:.1e}")
    return m


def min_eigenvalue(a: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix (symmetric eigensolver)."""
    return float(np.linalg.eigvalsh(a)[0])


def is_psd_cholesky(a: np.ndarray, tol: float | None = None) -> bool:
    """PSD check via Cholesky of A + tol*I; independent route from eigenvalues."""
    tol = default_tol() if tol is None else tol
    d = a.shape[0]
    try:
        np.linalg.cholesky(a + tol * np.eye(d))
        return True
    except np.linalg.LinAlgError:
        return False


def check_density_operator(rho, dim: int | None = None, tol: float | None = None,
                           name: str = "state") -> np.ndarray:
    """Validate a density operator: Hermitian, unit trace, PSD to tolerance."""
    tol = default_tol() if tol is None else tol
    m = check_hermitian(rho, tol=tol, name=name)
    if dim is not None and m.shape[0] != dim:
        raise ValueError(f"{name} has dimension {m.shape[0]}, expected {dim}")
    trace_err = abs(np.trace(m) - 1.0)
    if trace_err > tol:
        raise ValueError(f"{name} trace deviates from 1 by {trace_err:.3e}")
    lam_min = min_eigenvalue((m + m.conj().T) / 2)
    if lam_min < -tol:
        raise ValueError(f"{name} is not PSD: min eigenvalue {lam_min:.3e}")
    return m


def check_unitary(u, dim: int | None = None, tol: float | None = None,
                  name: str = "unitary") -> np.ndarray:
    tol = default_tol() if tol is None else tol
    m = as_complex_matrix(u, dim=dim, name=name)
    err = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
    if err > tol:
        raise ValueError(f"{name} is not unitary: max|U^dag U - I| = {err:.3e}")
    return m


def check_povm(effects, dim: int | None = None, tol: float | None = None,
               name: str = "povm") -> np.ndarray:
    """Validate a POVM given as an (m, d, d) stack of effects.

    Each effect must be Hermitian PSD to tolerance and the effects must sum
    to the identity.
    """
    tol = default_tol() if tol is None else tol
    arr = np.asarray(effects, dtype=complex)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError(f"{name} must have shape (m, d, d), got {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"{name} acts on dimension {arr.shape[1]}, expected {dim}")
    d = arr.shape[1]
    herm = float(np.max(np.abs(arr - arr.conj().transpose(0, 2, 1))))
    if herm > tol:
        raise ValueError(f"{name} effects not Hermitian: residual {herm:.3e}")
    for j, f in enumerate(arr):
        lam = min_eigenvalue((f + f.conj().T) / 2)
        if lam < -tol:
            raise ValueError(f"{name} effect {j} not PSD: min eigenvalue {lam:.3e}")
    comp = float(np.max(np.abs(arr.sum(axis=0) - np.eye(d))))
    if comp > tol:
        raise ValueError(f"{name} effects do not sum to identity: residual {comp:.3e}")
    return arr


def check_prob_vector(p, length: int | None = None, tol: float = EXACT_TOL,
                      name: str = "probability vector") -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-d, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise ValueError(f"{name} has length {arr.shape[0]}, expected {length}")
    if arr.min() < -tol or arr.max() > 1 + tol:
        raise ValueError(f"{name} has entries outside [0, 1]: min {arr.min():.3e}, max {arr.max():.3e}")
    gap = abs(arr.sum() - 1.0)
    if gap > max(tol, 1e-12):
        raise ValueError(f"{name} sums to {arr.sum()!r}, off by {gap:.3e}")
    return arr


def check_conditional_matrix(r, n_sky: int | None = None, tol: float = EXACT_TOL,
                             name: str = "conditional matrix") -> np.ndarray:
    """Validate r(j|i): shape (m, n), nonnegative, each column a distribution."""
    arr = np.asarray(r, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got shape {arr.shape}")
    if n_sky is not None and arr.shape[1] != n_sky:
        raise ValueError(f"{name} has {arr.shape[1]} columns, expected {n_sky}")
    if arr.min() < -tol:
        raise ValueError(f"{name} has negative entry {arr.min():.3e}")
    col_err = float(np.max(np.abs(arr.sum(axis=0) - 1.0)))
    if col_err > tol:
        raise ValueError(f"{name} columns not stochastic: max deviation {col_err:.3e}")
    return arr


def clamp_probabilities(q: np.ndarray, tol: float | None = None,
                        name: str = "probabilities") -> np.ndarray:
    """Snap floating-point noise onto the exact simplex.

    Entries in [-tol, 0) are set to 0 and the vector renormalized; anything
    below -tol or above 1 + tol is a genuine invalidity and raises.
    """
    tol = default_tol() if tol is None else tol
    q = np.asarray(q, dtype=float)
    if q.min() < -tol:
        raise ValueError(f"{name} entry {q.min():.3e} below -{tol:.1e}")
    if q.max() > 1 + tol:
        raise ValueError(f"{name} entry {q.max():.6f} above 1 + {tol:.1e}")
    gap = abs(q.sum() - 1.0)
    if gap > max(tol, EXACT_TOL):
        raise ValueError(f"{name} sum to {q.sum()!r}, off by {gap:.3e}")
    q = np.clip(q, 0.0, None)
    return q / q.sum()
