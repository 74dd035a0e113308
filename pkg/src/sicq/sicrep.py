"""The state <-> probability dictionary over a SIC frame.

A density operator rho maps to p(i) = tr(rho Pi_i)/d and back through
rho = sum_i ((d+1) p(i) - 1/d) Pi_i.  The triple products of the frame
projectors give structure tensors that characterize purity and validity
entirely inside the probability simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sicframe import SicFrame, verify_sic
from .validation import (
    check_density_operator,
    check_prob_vector,
    clamp_probabilities,
    default_tol,
    min_eigenvalue,
)


def rho_to_prob(frame: SicFrame, rho, tol: float | None = None) -> np.ndarray:
    """SIC outcome probabilities p(i) = tr(rho E_i) of a density operator."""
    tol = frame.tolerance() if tol is None else tol
    d = frame.dim
    r = check_density_operator(rho, dim=d, tol=tol)
    p = np.real(np.einsum("iab,ba->i", frame.projectors, r)) / d
    if p.max() > 1.0 / d + tol:
        raise ValueError(f"SIC probability {p.max():.6f} exceeds the 1/d component bound")
    return clamp_probabilities(p, tol=tol, name="SIC probabilities")


def prob_to_rho(frame: SicFrame, p) -> np.ndarray:
    """Reconstruct the operator rho = sum_i ((d+1) p(i) - 1/d) Pi_i.

    Always Hermitian with unit trace; positivity is exactly what
    :func:`validity_test` decides, so it is not enforced here.
    """
    d = frame.dim
    p = check_prob_vector(p, length=d * d)
    coeff = (d + 1) * p - 1.0 / d
    return np.einsum("i,iab->ab", coeff, frame.projectors)


@dataclass(frozen=True)
class ValidityReport:
    min_eigenvalue: float
    trace_error: float
    valid: bool

    def to_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "trace_error": self.trace_error,
            "valid": self.valid,
        }


def validity_test(frame: SicFrame, p, tol: float | None = None) -> ValidityReport:
    """Is p the SIC image of an actual quantum state?

    Only some simplex points are: the reconstructed operator must be PSD.
    Tolerance defaults to the frame's working tolerance (10x the search
    residual for searched frames).
    """
    tol = frame.tolerance() if tol is None else tol
    rho = prob_to_rho(frame, p)
    lam = min_eigenvalue((rho + rho.conj().T) / 2)
    trace_err = float(abs(np.trace(rho).real - 1.0))
    return ValidityReport(min_eigenvalue=lam, trace_error=trace_err, valid=lam >= -tol)


# ---------------------------------------------------------------------------
# structure tensors

DENSE_STRUCTURE_DIM_MAX = 8


@dataclass
class StructureTensor:
    """Triple-product data of a SIC frame.

    ``alpha[i,j,k]`` are the expansion coefficients of Pi_i Pi_j in the
    projector basis and ``c[i,j,k] = Re tr(Pi_i Pi_j Pi_k)`` their totally
    symmetric real companion.  Dense n^3 arrays are materialized for
    d <= 8; above that the contractions recompute triple traces on demand
    from the vector Gram matrix (tr Pi_i Pi_j Pi_k = G_ij G_jk G_ki).
    Instances are read-only once built and safe to share across threads.
    """

    dim: int
    gram: np.ndarray  # (n, n) complex vector Gram matrix
    alpha: np.ndarray | None = field(default=None, repr=False)
    c: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.dim * self.dim

    def triple(self, i: int, j: int, k: int) -> complex:
        """tr(Pi_i Pi_j Pi_k)."""
        g = self.gram
        return complex(g[i, j] * g[j, k] * g[k, i])

    def c_matrix(self, k: int) -> np.ndarray:
        """C_k with entries (C_k)_ij = c_ijk."""
        if not 0 <= k < self.n:
            raise ValueError(f"index k={k} out of range (0..{self.n - 1})")
        if self.c is not None:
            return self.c[:, :, k]
        g = self.gram
        return np.real(g * np.outer(g[k, :], g[:, k]))

    def quad_form(self, x, y=None) -> np.ndarray:
        """Per-k contraction sum_ij c_ijk x_i y_j without materializing c.

        Uses T_ijk = G_ij G_jk G_ki: with A[i,k] = x_i G_ki and
        B[j,k] = y_j G_jk this is Re diag(A^T G B), an O(n^3) einsum.
        """
        x = np.asarray(x, dtype=float)
        y = x if y is None else np.asarray(y, dtype=float)
        g = self.gram
        a = x[:, None] * g.T  # a[i, k] = x_i G[k, i]
        b = y[:, None] * g    # b[j, k] = y_j G[j, k]
        return np.real(np.einsum("ik,ij,jk->k", a, g, b, optimize=True))

    def cubic_form(self, p) -> float:
        """sum_ijk c_ijk p_i p_j p_k."""
        p = np.asarray(p, dtype=float)
        return float(p @ self.quad_form(p))


def build_structure(frame: SicFrame, require_verified: bool = True) -> StructureTensor:
    """Structure tensors of a frame, refusing unverified frames by default."""
    if require_verified:
        report = verify_sic(frame, tol=frame.tolerance())
        if not report.passed:
            raise ValueError(
                f"frame failed verification (overlap error {report.max_overlap_error:.3e}); "
                "pass require_verified=False to override"
            )
    d = frame.dim
    gram = np.ascontiguousarray(frame.gram())
    gram.setflags(write=False)
    st = StructureTensor(dim=d, gram=gram)
    if d <= DENSE_STRUCTURE_DIM_MAX:
        n = d * d
        t = np.einsum("ij,jk,ki->ijk", gram, gram, gram)
        delta = np.eye(n)
        alpha = ((d + 1) * t - ((d * delta + 1.0) / (d + 1))[:, :, None]) / d
        c = np.ascontiguousarray(t.real)
        alpha.setflags(write=False)
        c.setflags(write=False)
        st.alpha = alpha
        st.c = c
    return st


# ---------------------------------------------------------------------------
# purity

@dataclass(frozen=True)
class PurityReport:
    quadratic_residual: float
    cubic_residual: float
    fixed_point_residual: float
    tol: float
    pure: bool

    def to_dict(self) -> dict:
        return {
            "quadratic_residual": self.quadratic_residual,
            "cubic_residual": self.cubic_residual,
            "fixed_point_residual": self.fixed_point_residual,
            "tol": self.tol,
            "pure": self.pure,
        }


def purity_check(structure, p, tol: float | None = None) -> PurityReport:
    """Three redundant purity tests on a probability vector.

    A valid p represents a pure state iff all of
      quadratic:    sum_i p(i)^2               = 2/(d(d+1))
      cubic:        sum_ijk c_ijk p_i p_j p_k  = (d+7)/(d+1)^3
      fixed point:  p(k) = ((d+1)^2/(3d)) sum_ij c_ijk p_i p_j - 1/(3d)
    hold; the redundancy doubles as a consistency check on the frame.
    Reports each residual; pure requires all three within tol.  Accepts a
    StructureTensor or a SicFrame (tensors built on the fly).
    """
    if isinstance(structure, SicFrame):
        structure = build_structure(structure)
    tol = default_tol() if tol is None else tol
    d = structure.dim
    p = check_prob_vector(p, length=structure.n)
    quad = abs(float(np.sum(p ** 2)) - 2.0 / (d * (d + 1)))
    quad_k = structure.quad_form(p)
    cubic = abs(float(p @ quad_k) - (d + 7.0) / (d + 1) ** 3)
    fixed = float(np.max(np.abs(p - (d + 1) ** 2 / (3.0 * d) * quad_k + 1.0 / (3.0 * d))))
    return PurityReport(
        quadratic_residual=quad, cubic_residual=cubic, fixed_point_residual=fixed,
        tol=tol, pure=quad <= tol and cubic <= tol and fixed <= tol,
    )


# ---------------------------------------------------------------------------
# C_k decomposition

RANK_EIGENVALUE_SPLIT = 0.5  # spectrum of Q_k is provably near {0, 1}


@dataclass(frozen=True)
class MagmaReport:
    k: int
    rank: int
    expected_rank: int
    idempotency_residual: float
    symmetry_residual: float
    m_k_residual: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "rank": self.rank,
            "expected_rank": self.expected_rank,
            "idempotency_residual": self.idempotency_residual,
            "symmetry_residual": self.symmetry_residual,
            "m_k_residual": self.m_k_residual,
        }


def magma_decomposition_check(structure: StructureTensor, k: int) -> MagmaReport:
    """Decompose C_k = |m_k><m_k| + (d/(2(d+1))) Q_k and grade Q_k.

    m_k has 1 in slot k and 1/(d+1) elsewhere.  For a true SIC frame Q_k is
    a symmetric projection of rank 2d-2 annihilating m_k; the report carries
    the idempotency residual max|Q^2 - Q|, the symmetry residual, |Q m_k|,
    and the rank counted as eigenvalues above 0.5.
    """
    d = structure.dim
    n = structure.n
    if not 0 <= k < n:
        raise ValueError(f"index k={k} out of range (0..{n - 1})")
    c_k = structure.c_matrix(k)
    m_k = np.full(n, 1.0 / (d + 1))
    m_k[k] = 1.0
    q = (2.0 * (d + 1) / d) * (c_k - np.outer(m_k, m_k))
    idem = float(np.max(np.abs(q @ q - q)))
    sym = float(np.max(np.abs(q - q.T)))
    mk_res = float(np.max(np.abs(q @ m_k)))
    eigs = np.linalg.eigvalsh((q + q.T) / 2)
    rank = int(np.sum(eigs > RANK_EIGENVALUE_SPLIT))
    return MagmaReport(
        k=k, rank=rank, expected_rank=2 * d - 2, idempotency_residual=idem,
        symmetry_residual=sym, m_k_residual=mk_res,
    )


# ---------------------------------------------------------------------------
# square-root parameterization

def ellipsoid_residual(b, d: int) -> float:
    """|(sum b)^2 + d sum b^2 - (d+1)|: zero exactly on the parameter ellipsoid."""
    b = np.asarray(b, dtype=float)
    return abs(b.sum() ** 2 + d * float(np.sum(b ** 2)) - (d + 1))


def project_to_ellipsoid(b, d: int) -> np.ndarray:
    """Radially rescale b onto the ellipsoid (sum b)^2 + d sum b^2 = d + 1."""
    b = np.asarray(b, dtype=float)
    quad = b.sum() ** 2 + d * float(np.sum(b ** 2))
    if quad <= 0:
        raise ValueError("cannot project the zero vector")
    return b * np.sqrt((d + 1) / quad)


def sqrt_parameterize(structure: StructureTensor, b, tol: float | None = None) -> np.ndarray:
    """Valid probability vector p(k) = (1/d) sum_ij c_ijk b_i b_j.

    The operator B = sum b_i Pi_i squares to a PSD unit-trace operator
    whenever b lies on the parameter ellipsoid, so the output always passes
    the validity test.  Raises if the ellipsoid constraint is violated
    beyond tol.
    """
    tol = default_tol() if tol is None else tol
    d = structure.dim
    b = np.asarray(b, dtype=float)
    if b.shape != (structure.n,):
        raise ValueError(f"b must have length {structure.n}, got {b.shape}")
    res = ellipsoid_residual(b, d)
    if res > tol:
        raise ValueError(f"ellipsoid constraint violated by {res:.3e} (> {tol:.1e})")
    p = structure.quad_form(b) / d
    return clamp_probabilities(p, tol=max(tol, 1e-12), name="sqrt-parameterized vector")


def sic_inner(p, q, d: int) -> float:
    """Hilbert-Schmidt inner product in SIC coordinates: d(d+1) <<p|q>> - 1.

    Equals tr(rho sigma) of the represented operators; for valid states it
    lies in [0, 1], so state overlaps can never fall below 1/(d(d+1)).
    """
    n = d * d
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != (n,) or q.shape != (n,):
        raise ValueError(f"both vectors must have length {n} for d={d}")
    return d * (d + 1) * float(p @ q) - 1.0
