"""Complex operator algebra for finite dimension d.

Density operators, POVM effects and unitaries are plain (d, d) / (m, d, d)
complex numpy arrays; see :mod:`sicq.validation` for the invariant checks.
All functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import numpy as np

from .validation import (
    as_complex_matrix,
    check_density_operator,
    check_hermitian,
    check_povm,
    clamp_probabilities,
    default_tol,
)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product tr(A^dag B)."""
    am = as_complex_matrix(a, name="a")
    bm = as_complex_matrix(b, name="b")
    if am.shape != bm.shape:
        raise ValueError(f"dimension mismatch: {am.shape[0]} vs {bm.shape[0]}")
    return complex(np.sum(am.conj() * bm))


def is_rank_one_projector(a, tol: float | None = None) -> bool:
    """True iff Hermitian a satisfies tr a^2 = tr a^3 = 1 to tolerance.

    For Hermitian matrices those two trace conditions hold exactly when the
    spectrum is a single 1 and zeros, i.e. a rank-1 projection.
    """
    tol = default_tol() if tol is None else tol
    m = check_hermitian(a, tol=tol, name="a")
    m2 = m @ m
    t2 = np.trace(m2).real
    t3 = np.trace(m2 @ m).real
    return abs(t2 - 1.0) <= tol and abs(t3 - 1.0) <= tol


def born_direct(rho, povm, tol: float | None = None) -> np.ndarray:
    """Outcome probabilities q(j) = tr(rho F_j) straight from the trace rule.

    This is the oracle side of every urgleichung comparison in the package:
    it never touches a SIC frame.  Output is validated against [0, 1] and
    unit sum, then clamped onto the exact simplex.
    """
    tol = default_tol() if tol is None else tol
    r = check_density_operator(rho, tol=tol)
    effects = check_povm(povm, dim=r.shape[0], tol=tol)
    q = np.real(np.einsum("jab,ba->j", effects, r))
    return clamp_probabilities(q, tol=tol, name="born probabilities")
