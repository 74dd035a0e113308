"""State-space geometry inside the probability simplex.

Valid states live on or inside a sphere of squared radius (d-1)/(d^2(d+1))
centered on the flat distribution; the bounds below (zero counts, mutual
distances, excision of over-orthogonal vectors) all follow from requiring
that the deformed law of total probability only ever produces probabilities.
Closed-form quantities are computed in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .validation import EXACT_TOL, default_tol


def basis_distribution(d: int, k: int) -> np.ndarray:
    """e_k: probability vector of SIC outcome k itself (0-based index).

    1/d in slot k and 1/(d(d+1)) elsewhere; satisfies
    sum e_k(i)^2 = 2/(d(d+1)) exactly.
    """
    n = d * d
    if not 0 <= k < n:
        raise ValueError(f"index k={k} out of range for d={d} (0..{n-1})")
    e = np.full(n, 1.0 / (d * (d + 1)))
    e[k] = 1.0 / d
    return e


@dataclass(frozen=True)
class GeometryReport:
    dim: int
    sphere_radius_sq: Fraction  # (d-1)/(d^2(d+1))
    center: np.ndarray          # flat distribution
    max_zeros: int              # d(d-1)/2
    max_equidistant: int        # d
    flat_poke_threshold: int    # below this zero count the sphere exits the simplex

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "sphere_radius_sq": str(self.sphere_radius_sq),
            "center": self.center.tolist(),
            "max_zeros": self.max_zeros,
            "max_equidistant": self.max_equidistant,
            "flat_poke_threshold": self.flat_poke_threshold,
        }


def bloch_geometry(d: int) -> GeometryReport:
    """Exact constants of the generalized Bloch sphere in dimension d."""
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    return GeometryReport(
        dim=d,
        sphere_radius_sq=Fraction(d - 1, d * d * (d + 1)),
        center=np.full(d * d, 1.0 / (d * d)),
        max_zeros=d * (d - 1) // 2,
        max_equidistant=d,
        flat_poke_threshold=d * (d - 1) // 2,
    )


def nflat_min_distance(d: int, n_zeros: int) -> Fraction:
    """Squared distance from the simplex center to the nearest n-flat.

    An n-flat is the face with n vanishing components; the minimum squared
    distance is n/(d^2 (d^2 - n)).  The state sphere pokes outside the
    simplex on that flat iff this is below the sphere radius, i.e. iff
    n < d(d-1)/2.
    """
    n = d * d
    if not 0 <= n_zeros < n:
        raise ValueError(f"n_zeros={n_zeros} out of range for d={d}")
    return Fraction(n_zeros, n * (n - n_zeros))


@dataclass(frozen=True)
class GramEquidistantReport:
    dim: int
    n_points: int
    lambda0: Fraction
    lambda_rest: Fraction
    feasible: bool
    rank: int

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "n_points": self.n_points,
            "lambda0": str(self.lambda0),
            "lambda_rest": str(self.lambda_rest),
            "feasible": self.feasible,
            "rank": self.rank,
        }


def gram_equidistant(d: int, n_points: int) -> GramEquidistantReport:
    """Existence test for n mutually maximally distant sphere states.

    Centering the candidate states on the flat distribution, their Gram
    matrix must have eigenvalues lambda0 = (d - n)/(d^2(d+1)) (once) and
    1/(d(d+1)) (n-1 times); PSD-ness caps n at d, where the Gram drops to
    rank d-1.
    """
    if n_points < 2:
        raise ValueError(f"need at least two points, got {n_points}")
    lam0 = Fraction(d - n_points, d * d * (d + 1))
    lam_rest = Fraction(1, d * (d + 1))
    feasible = lam0 >= 0
    rank = n_points - 1 + (0 if lam0 == 0 else 1)
    return GramEquidistantReport(
        dim=d, n_points=n_points, lambda0=lam0, lambda_rest=lam_rest,
        feasible=feasible, rank=rank,
    )


def flat_zeros_vector(d: int, zero_positions) -> np.ndarray:
    """Sphere point with the maximal d(d-1)/2 zeros, flat elsewhere.

    Zeros at the given (0-based) positions, 2/(d(d+1)) on the remaining
    d(d+1)/2 slots.  By construction it satisfies the purity quadratic
    sum z^2 = 2/(d(d+1)) exactly.
    """
    n = d * d
    want = d * (d - 1) // 2
    positions = sorted(int(i) for i in zero_positions)
    if len(positions) != want:
        raise ValueError(f"need exactly {want} zero positions for d={d}, got {len(positions)}")
    if len(set(positions)) != len(positions):
        raise ValueError("duplicate zero positions")
    if positions and (positions[0] < 0 or positions[-1] >= n):
        raise ValueError(f"zero positions out of range 0..{n-1}")
    z = np.full(n, 2.0 / (d * (d + 1)))
    z[positions] = 0.0
    return z


@dataclass(frozen=True)
class ZerosOverlapReport:
    dim: int
    shared_nonzeros: int   # g
    overlap: float         # <<z|z'>> = g (2/(d(d+1)))^2
    min_admissible_overlap: float  # 1/(d(d+1))
    admissible: bool

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "shared_nonzeros": self.shared_nonzeros,
            "overlap": self.overlap,
            "min_admissible_overlap": self.min_admissible_overlap,
            "admissible": self.admissible,
        }


def zeros_overlap_test(z1, z2, d: int) -> ZerosOverlapReport:
    """Mutual-overlap admissibility of two flat zeros-bound vectors.

    Their overlap is g (2/(d(d+1)))^2 with g the count of shared nonzero
    slots; it stays above the floor 1/(d(d+1)) iff 4g >= d(d+1).  An
    inadmissible pair means at least one vector must be excised from any
    maximal state space.  Admissibility is necessary only--final validity
    always defers to the reconstruction test.
    """
    n = d * d
    value = 2.0 / (d * (d + 1))
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    for name, z in (("z1", z1), ("z2", z2)):
        if z.shape != (n,):
            raise ValueError(f"{name} must have length {n}")
        nonzero = z > EXACT_TOL
        if int(nonzero.sum()) != d * (d + 1) // 2 or np.max(np.abs(z[nonzero] - value)) > EXACT_TOL:
            raise ValueError(f"{name} is not a flat zeros-bound vector for d={d}")
    g = int(np.sum((z1 > EXACT_TOL) & (z2 > EXACT_TOL)))
    overlap = g * value * value
    floor = 1.0 / (d * (d + 1))
    return ZerosOverlapReport(
        dim=d, shared_nonzeros=g, overlap=overlap,
        min_admissible_overlap=floor, admissible=4 * g >= d * (d + 1),
    )


def delsarte_bound(f: int, c) -> Fraction:
    """Bound v <= f(1-c)/(1-fc) on equiangular rank-1 projectors.

    At most that many rank-1 projectors with common pairwise overlap c fit
    in (real or complex) dimension f.  Vacuous (raises) when fc >= 1.
    """
    c = Fraction(c) if not isinstance(c, Fraction) else c
    if not 0 < c:
        raise ValueError(f"overlap c must be positive, got {c}")
    if f * c >= 1:
        raise ValueError(f"bound is vacuous: f*c = {f * c} >= 1")
    return Fraction(f) * (1 - c) / (1 - f * c)


@dataclass(frozen=True)
class IsuReport:
    dim: int
    n_ground: int
    isu: bool
    expected_column_sum: float      # d^2/m over sky outcomes, per ground row
    max_column_sum_deviation: float
    max_posterior_self_overlap: float
    self_overlap_bound: float       # (d+m)/(d^2(d+1))
    bound_satisfied: bool

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "n_ground": self.n_ground,
            "isu": self.isu,
            "expected_column_sum": self.expected_column_sum,
            "max_column_sum_deviation": self.max_column_sum_deviation,
            "max_posterior_self_overlap": self.max_posterior_self_overlap,
            "self_overlap_bound": self.self_overlap_bound,
            "bound_satisfied": self.bound_satisfied,
        }


def isu_bound_check(frame, ground, tol: float | None = None) -> IsuReport:
    """In-step unpredictability test for a ground measurement.

    A ground POVM is ISU when a flat sky distribution forces a flat ground
    distribution: sum_i r(j|i) = d^2/m for every outcome j (equivalently all
    effect traces are equal).  For ISU grounds, each posterior
    p_j = (m/d^2) r(j|.) must obey sum_i p_j(i)^2 <= (d+m)/(d^2(d+1)).
    """
    tol = default_tol() if tol is None else tol
    d = frame.dim
    effects = np.asarray(ground, dtype=complex)
    if effects.ndim != 3 or effects.shape[1:] != (d, d):
        raise ValueError(f"ground effects must have shape (m, {d}, {d}), got {effects.shape}")
    m = effects.shape[0]
    r = np.real(np.einsum("iab,jba->ji", frame.projectors, effects))  # r(j|i)
    sums = r.sum(axis=1)
    expected = d * d / m
    dev = float(np.max(np.abs(sums - expected)))
    isu = dev <= tol * d * d
    posteriors = r / sums[:, None]
    self_overlap = float(np.max(np.sum(posteriors ** 2, axis=1)))
    bound = (d + m) / (d * d * (d + 1))
    return IsuReport(
        dim=d, n_ground=m, isu=isu, expected_column_sum=expected,
        max_column_sum_deviation=dev, max_posterior_self_overlap=self_overlap,
        self_overlap_bound=bound, bound_satisfied=isu and self_overlap <= bound + tol,
    )
