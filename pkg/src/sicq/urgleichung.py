"""The Born rule as a deformed law of total probability.

With a SIC measurement "in the sky" assigning probabilities p(i) and any
measurement "on the ground" with conditionals r(j|i) = tr(Pi_i F_j), the
trace rule becomes

    q(j) = (d+1) sum_i p(i) r(j|i) - (1/d) sum_i r(j|i)

which differs from the classical law s(j) = sum_i p(i) r(j|i) only by an
affine deformation.  For rank-1 von Neumann grounds the last term is 1; for
a complete-MUB sky it becomes (1/(d+1)) sum_i r(j|i).  Requiring the output
to stay inside [0, 1] for all allowed inputs is what carves quantum state
space out of the simplex, so out-of-range results raise instead of clamping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .sicframe import MubFrame, SicFrame
from .validation import (
    check_conditional_matrix,
    check_density_operator,
    check_prob_vector,
    check_unitary,
    clamp_probabilities,
    default_tol,
)

# Out-of-band q beyond this is a diagnostic signal (invalid inputs), not noise.
URUNGLEICHUNG_TOL = 1e-8


class UrungleichungError(ValueError):
    """The computed ground distribution left [0, 1]: the inputs were not
    a valid (state, conditional) pair."""


def _finish(q: np.ndarray, name: str) -> np.ndarray:
    if q.min() < -URUNGLEICHUNG_TOL or q.max() > 1 + URUNGLEICHUNG_TOL:
        raise UrungleichungError(
            f"{name} left [0, 1]: min {q.min():.3e}, max {q.max():.6f}; "
            "the inputs violate the urungleichung"
        )
    q = np.clip(q, 0.0, None)
    return q / q.sum()


def conditional_from_projectors(sky_projectors: np.ndarray, ground) -> np.ndarray:
    """Conditional matrix r(j|i) = tr(Pi_i F_j); columns are distributions."""
    projs = np.asarray(sky_projectors, dtype=complex)
    effects = np.asarray(ground, dtype=complex)
    if effects.ndim != 3 or effects.shape[1:] != projs.shape[1:]:
        raise ValueError(
            f"ground effects shape {effects.shape} does not match sky dimension {projs.shape[1]}")
    return np.real(np.einsum("iab,jba->ji", projs, effects))


def conditional_from_frame(frame: SicFrame, ground) -> np.ndarray:
    """r(j|i) for a SIC sky.  Rows sum to d tr(F_j): d for rank-1 grounds,
    1 when the ground is the SIC itself."""
    return conditional_from_projectors(frame.projectors, ground)


def conditional_from_mub(mub: MubFrame, ground) -> np.ndarray:
    """r(j|i) for a complete-MUB sky (rows sum to (d+1) tr(F_j))."""
    return conditional_from_projectors(mub.projectors, ground)


def classical_ltp(p, r) -> np.ndarray:
    """Classical law of total probability s(j) = sum_i p(i) r(j|i).

    The comparator: what coherence alone would give if the sky measurement
    were actually performed.  Always a valid distribution.
    """
    r = check_conditional_matrix(r)
    p = check_prob_vector(p, length=r.shape[1])
    return r @ p


def urgleichung_vn(p, r, d: int, row_tol: float | None = None) -> np.ndarray:
    """q(j) = (d+1) sum_i p(i) r(j|i) - 1, the von Neumann special case.

    Valid only when the ground effects are rank-1 projectors, which is
    certified by every row of r summing to d; other grounds raise.
    """
    row_tol = default_tol() if row_tol is None else row_tol
    r = check_conditional_matrix(r, n_sky=d * d)
    p = check_prob_vector(p, length=d * d)
    rows = r.sum(axis=1)
    dev = float(np.max(np.abs(rows - d)))
    if dev > row_tol * d:
        raise ValueError(
            f"ground is not a rank-1 von Neumann measurement: row sums deviate from d by {dev:.3e}")
    q = (d + 1) * (r @ p) - 1.0
    return _finish(q, "von Neumann urgleichung output")


def urgleichung_general(p, r, d: int) -> np.ndarray:
    """The full quantum law: q(j) = (d+1) sum_i p(i) r(j|i) - (1/d) sum_i r(j|i).

    Reproduces the trace rule for an arbitrary ground POVM.  When the
    ground equals the sky the map is the identity on valid states.
    """
    r = check_conditional_matrix(r, n_sky=d * d)
    p = check_prob_vector(p, length=d * d)
    q = (d + 1) * (r @ p) - r.sum(axis=1) / d
    return _finish(q, "urgleichung output")


def urgleichung_mub(p, r, d: int) -> np.ndarray:
    """MUB-sky variant: q(j) = (d+1) sum_i p(i) r(j|i) - (1/(d+1)) sum_i r(j|i).

    p ranges over the d(d+1) outcomes of the complete-MUB POVM
    E_i = Pi_i/(d+1); only the summation range and the second coefficient
    differ from the SIC case.
    """
    n = d * (d + 1)
    r = check_conditional_matrix(r, n_sky=n)
    p = check_prob_vector(p, length=n)
    q = (d + 1) * (r @ p) - r.sum(axis=1) / (d + 1)
    return _finish(q, "MUB urgleichung output")


def mub_prob(mub: MubFrame, rho, tol: float | None = None) -> np.ndarray:
    """Outcome probabilities of the complete-MUB POVM, p(i) = tr(rho Pi_i)/(d+1)."""
    tol = default_tol() if tol is None else tol
    rho = check_density_operator(rho, dim=mub.dim, tol=tol)
    p = np.real(np.einsum("iab,ba->i", mub.effects, rho))
    return clamp_probabilities(p, tol=tol, name="MUB probabilities")


def unitary_to_stochastic(frame: SicFrame, u, tol: float | None = None) -> np.ndarray:
    """Doubly stochastic matrix r(j|i) = tr(U Pi_i U^dag Pi_j)/d of a unitary.

    Feeding it to :func:`evolve_prob` reproduces the SIC probabilities of
    U rho U^dag, so unitary dynamics looks like stochastic evolution with
    the same affine deformation as the Born rule.
    """
    tol = default_tol() if tol is None else tol
    d = frame.dim
    um = check_unitary(u, dim=d, tol=tol)
    rotated = np.einsum("ab,ibc,dc->iad", um, frame.projectors, um.conj())
    return np.real(np.einsum("iad,jda->ji", rotated, frame.projectors)) / d


def evolve_prob(p, r, d: int) -> np.ndarray:
    """Evolve SIC probabilities: q(j) = (d+1) sum_i p(i) r(j|i) - 1/d.

    The map is affine, not linear, so composing unitaries means recomputing
    r from the product U2 U1 (or evolving step by step); multiplying the
    stochastic matrices themselves is wrong.
    """
    r = check_conditional_matrix(r, n_sky=d * d)
    p = check_prob_vector(p, length=d * d)
    q = (d + 1) * (r @ p) - 1.0 / d
    return _finish(q, "evolved distribution")


# ---------------------------------------------------------------------------
# generalized coefficients

@dataclass(frozen=True)
class GeneralizedParams:
    """Solution of the generalized-law constraints for an m-outcome ground."""

    m: int
    n: int
    alpha: Fraction
    beta: Fraction

    def to_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "alpha": _frac_json(self.alpha),
                "beta": _frac_json(self.beta)}


def _frac_json(x: Fraction):
    return int(x) if x.denominator == 1 else str(x)


def solve_generalized(m: int) -> GeneralizedParams:
    """Recover the quantum constants from the abstract law q = alpha LTP - beta sum r.

    Normalization forces n beta = alpha - 1; a maximal certainty-achieving
    ISU ground adds alpha m = n(m+1) beta; identifying one of its posteriors
    with a basis distribution adds alpha m = n + n beta.  The unique
    simultaneous solution is n = m^2, alpha = m + 1, beta = 1/m -- exactly
    the SIC values with m playing the role of the dimension.  Exact rational
    arithmetic throughout.
    """
    if m < 2:
        raise ValueError(f"need m >= 2 (a single-outcome ground is degenerate), got {m}")
    return GeneralizedParams(m=m, n=m * m, alpha=Fraction(m + 1), beta=Fraction(1, m))


def certainty_gram(m: int, n: int, alpha, beta) -> tuple:
    """Gram spectrum of m+1 would-be certainty posteriors, in centered coordinates.

    The candidate vectors have Gram entries a = alpha m/n - beta on the
    diagonal and -beta off it; eigenvalues are lambda0 = alpha m/n - (m+1) beta
    (once) and alpha m/n (m times).  lambda0 = 0 exactly at the extremal m
    where alpha/beta = n(m+1)/m; returns (lambda0, lambda_rest), exact when
    fed rationals.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    exact = all(isinstance(x, (int, Fraction)) for x in (alpha, beta))
    if exact:
        alpha = Fraction(alpha)
        beta = Fraction(beta)
        if n * beta != alpha - 1:
            raise ValueError(f"constraint n*beta = alpha - 1 violated: {n * beta} != {alpha - 1}")
        lam_rest = alpha * Fraction(m, n)
        lam0 = lam_rest - (m + 1) * beta
        return lam0, lam_rest
    alpha = float(alpha)
    beta = float(beta)
    if abs(n * beta - (alpha - 1)) > 1e-12:
        raise ValueError(f"constraint n*beta = alpha - 1 violated by {abs(n * beta - alpha + 1):.3e}")
    lam_rest = alpha * m / n
    return lam_rest - (m + 1) * beta, lam_rest
