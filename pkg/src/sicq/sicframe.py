"""SIC frames: construction, numerical search, verification; MUB two-designs.

A SIC frame in dimension d is a set of d^2 unit vectors whose rank-1
projectors Pi_i are equiangular, tr(Pi_i Pi_j) = (d delta_ij + 1)/(d + 1).
The effects E_i = Pi_i / d then form a minimal informationally complete POVM.
Analytic frames ship for d = 2 (Bloch tetrahedron) and d = 3; other
dimensions are found by seeded multi-start minimization of the Frobenius
objective, polished by a least-squares pass on the equiangularity residuals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize

from .geometry import delsarte_bound
from .validation import as_complex_matrix, default_tol

SEARCH_DIM_MAX = 12
MUB_DIM_MAX = 11

# Maximal known counts of equiangular rank-1 projectors in real dimension d
# at the overlap 1/(d+2) demanded by a minimal real IC frame.
KNOWN_REAL_EQUIANGULAR_MAX = {4: 6, 15: 36}


class SicSearchError(RuntimeError):
    """No search seed converged below the target residual."""

    def __init__(self, dim: int, seeds, best_residual: float, target: float):
        self.dim = dim
        self.seeds = list(seeds)
        self.best_residual = best_residual
        self.target = target
        super().__init__(
            f"SIC search failed in d={dim}: best residual {best_residual:.3e} "
            f"> target {target:.1e} over seeds {self.seeds}"
        )


def sic_overlap_target(d: int, n: int | None = None) -> np.ndarray:
    """The (n, n) matrix of target overlaps tr(Pi_i Pi_j) = (d delta + 1)/(d+1)."""
    n = d * d if n is None else n
    t = np.full((n, n), 1.0 / (d + 1))
    np.fill_diagonal(t, 1.0)
    return t


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Provenance:
    kind: str  # "analytic" or "searched"
    seed: int | None = None
    iterations: int | None = None
    residual: float | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "searched":
            out.update(seed=self.seed, iterations=self.iterations, residual=self.residual)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Provenance":
        return cls(
            kind=data.get("kind", "analytic"),
            seed=data.get("seed"),
            iterations=data.get("iterations"),
            residual=data.get("residual"),
        )


@dataclass(frozen=True)
class SicFrame:
    """d^2 equiangular rank-1 projectors, immutable once built.

    ``vectors`` holds the defining unit vectors (n, d) when known; frames
    loaded from projector-only data recover them by eigendecomposition.
    """

    dim: int
    projectors: np.ndarray  # (d^2, d, d) complex
    vectors: np.ndarray | None = None  # (d^2, d) complex
    provenance: Provenance = field(default_factory=lambda: Provenance("analytic"))

    def __post_init__(self):
        n = self.dim * self.dim
        p = np.asarray(self.projectors, dtype=complex)
        if p.shape != (n, self.dim, self.dim):
            raise ValueError(f"expected {n} projectors of shape ({self.dim},{self.dim}), got {p.shape}")
        object.__setattr__(self, "projectors", _readonly(p))
        if self.vectors is not None:
            v = np.asarray(self.vectors, dtype=complex)
            if v.shape != (n, self.dim):
                raise ValueError(f"expected vectors of shape ({n},{self.dim}), got {v.shape}")
            object.__setattr__(self, "vectors", _readonly(v))

    @classmethod
    def from_vectors(cls, vectors, provenance: Provenance | None = None) -> "SicFrame":
        v = np.asarray(vectors, dtype=complex)
        n, d = v.shape
        if n != d * d:
            raise ValueError(f"a SIC frame in d={d} needs {d*d} vectors, got {n}")
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        projs = np.einsum("ia,ib->iab", v, v.conj())
        return cls(dim=d, projectors=projs, vectors=v,
                   provenance=provenance or Provenance("analytic"))

    @property
    def n_outcomes(self) -> int:
        return self.dim * self.dim

    @property
    def effects(self) -> np.ndarray:
        """The SIC POVM effects E_i = Pi_i / d."""
        return self.projectors / self.dim

    def frame_vectors(self) -> np.ndarray:
        """Unit vectors spanning the projectors, recovering them if needed."""
        if self.vectors is not None:
            return self.vectors
        vecs = np.empty((self.n_outcomes, self.dim), dtype=complex)
        for i, p in enumerate(self.projectors):
            w, u = np.linalg.eigh(p)
            v = u[:, -1]
            k = int(np.argmax(np.abs(v)))
            v = v * (np.conj(v[k]) / abs(v[k]))  # fix the free phase deterministically
            vecs[i] = v
        return vecs

    def gram(self) -> np.ndarray:
        """Vector Gram matrix G[a, b] = <v_a | v_b>."""
        v = self.frame_vectors()
        return v.conj() @ v.T

    def overlap_deviation(self) -> float:
        """max_ij |tr(Pi_i Pi_j) - (d delta_ij + 1)/(d + 1)|."""
        g = np.abs(self.gram()) ** 2
        return float(np.max(np.abs(g - sic_overlap_target(self.dim))))

    def tolerance(self) -> float:
        """Working tolerance for downstream checks on this frame.

        Analytic frames get the default; searched frames get 10x their
        residual, since frame error propagates linearly into reconstruction.
        """
        base = default_tol()
        if self.provenance.kind == "searched" and self.provenance.residual:
            return max(base, 10.0 * self.provenance.residual)
        return base


# ---------------------------------------------------------------------------
# analytic frames

def _tetrahedron_vectors() -> np.ndarray:
    # Bloch directions (1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1) / sqrt(3):
    # the even-sign tetrahedron, pairwise tr(Pi_i Pi_j) = 1/3.
    axes = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float) / np.sqrt(3)
    vecs = np.empty((4, 2), dtype=complex)
    for i, (nx, ny, nz) in enumerate(axes):
        theta = np.arccos(nz)
        phi = np.arctan2(ny, nx)
        vecs[i] = [np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]
    return vecs


def _dim3_vectors() -> np.ndarray:
    # Nine vectors built from a third root of unity; each is a cyclic shift
    # of (1, w^k, 0)/sqrt(2) for k = 0, 1, 2.
    w = np.exp(2j * np.pi / 3)
    wb = np.conj(w)
    raw = [
        (1, 1, 0), (0, 1, 1), (1, 0, 1),
        (1, w, 0), (0, 1, w), (w, 0, 1),
        (1, wb, 0), (0, 1, wb), (wb, 0, 1),
    ]
    return np.array(raw, dtype=complex) / np.sqrt(2)


def known_sic(d: int) -> SicFrame:
    """Analytic SIC frame for d in {2, 3}."""
    if d == 2:
        return SicFrame.from_vectors(_tetrahedron_vectors())
    if d == 3:
        return SicFrame.from_vectors(_dim3_vectors())
    raise ValueError(f"no analytic SIC frame shipped for d={d} (supported: 2, 3)")


# ---------------------------------------------------------------------------
# Frobenius objective

def frobenius_objective(povm) -> float:
    """Squared Frobenius distance of the effect Gram matrix from identity.

    F = sum_ij (delta_ij - tr E_i E_j)^2, over a POVM with exactly d^2
    effects.  Minimized (at the Schwarz bound) exactly by SIC effects.
    """
    effects = np.asarray(povm, dtype=complex)
    if effects.ndim != 3 or effects.shape[1] != effects.shape[2]:
        raise ValueError(f"expected an (m, d, d) effect stack, got {effects.shape}")
    m, d, _ = effects.shape
    if m != d * d:
        raise ValueError(f"Frobenius objective needs d^2 = {d*d} effects, got {m}")
    gram = np.real(np.einsum("iab,jba->ij", effects, effects))
    return float(np.sum((np.eye(m) - gram) ** 2))


def frobenius_minimum(d: int) -> float:
    """Analytic minimum of the Frobenius objective, attained iff SIC."""
    n = d * d
    return n * (1 - 1 / n) ** 2 + n * (n - 1) * (1.0 / (n * (d + 1))) ** 2


# ---------------------------------------------------------------------------
# search

def _unpack(x: np.ndarray, n: int, d: int) -> np.ndarray:
    m = n * d
    return (x[:m] + 1j * x[m:]).reshape(n, d)


def _pack(v: np.ndarray) -> np.ndarray:
    return np.concatenate([v.real.ravel(), v.imag.ravel()])


def _fpot_and_grad(x: np.ndarray, n: int, d: int):
    """Scale-invariant pairwise objective sum_{i!=j} ghat_ij^2 with gradient.

    ghat_ij = |<v_i|v_j>|^2 / (|v_i|^2 |v_j|^2).  On unit vectors this is the
    Frobenius objective up to an additive constant and the d^4 scale, so its
    minimizers are exactly the SIC frames.
    """
    v = _unpack(x, n, d)
    g = v.conj() @ v.T
    nrm = np.real(np.diag(g))
    ghat = np.abs(g) ** 2 / np.outer(nrm, nrm)
    np.fill_diagonal(ghat, 0.0)
    f = float(np.sum(ghat ** 2))
    coef_j = 4 * ghat * np.conj(g) / np.outer(nrm, nrm)
    coef_i = 4 * (ghat ** 2).sum(axis=1) / nrm
    grad_v = coef_j @ v - coef_i[:, None] * v
    return f, np.concatenate([2 * grad_v.real.ravel(), 2 * grad_v.imag.ravel()])


def _equiangular_residuals(x: np.ndarray, n: int, d: int) -> np.ndarray:
    v = _unpack(x, n, d)
    g = v.conj() @ v.T
    gg = np.abs(g) ** 2
    iu = np.triu_indices(n, k=1)
    return np.concatenate([gg[iu] - 1.0 / (d + 1), np.real(np.diag(g)) - 1.0])


def _equiangular_jacobian(x: np.ndarray, n: int, d: int) -> np.ndarray:
    v = _unpack(x, n, d)
    g = v.conj() @ v.T
    iu, ju = np.triu_indices(n, k=1)
    npair = len(iu)
    jac = np.zeros((npair + n, 2 * n * d))
    for row, (i, j) in enumerate(zip(iu, ju)):
        dvi = np.conj(g[i, j]) * v[j]  # d|g_ij|^2 / d conj(v_i)
        dvj = g[i, j] * v[i]
        jac[row, i * d:(i + 1) * d] = 2 * dvi.real
        jac[row, n * d + i * d:n * d + (i + 1) * d] = 2 * dvi.imag
        jac[row, j * d:(j + 1) * d] = 2 * dvj.real
        jac[row, n * d + j * d:n * d + (j + 1) * d] = 2 * dvj.imag
    for i in range(n):
        jac[npair + i, i * d:(i + 1) * d] = 2 * v[i].real
        jac[npair + i, n * d + i * d:n * d + (i + 1) * d] = 2 * v[i].imag
    return jac


def _search_one_seed_exact(d: int, seed: int, max_iters: int):
    """Frame-potential descent from one seed, then least-squares polish."""
    n = d * d
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal(2 * n * d)
    stage1 = minimize(
        _fpot_and_grad, x0, args=(n, d), jac=True, method="L-BFGS-B",
        options={"maxiter": max_iters, "ftol": 1e-18, "gtol": 1e-14},
    )
    v = _unpack(stage1.x, n, d)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    stage2 = least_squares(
        _equiangular_residuals, _pack(v), jac=_equiangular_jacobian, args=(n, d),
        method="trf", max_nfev=max_iters, xtol=3e-16, ftol=3e-16, gtol=3e-16,
    )
    v = _unpack(stage2.x, n, d)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v, int(stage1.nit) + int(stage2.nfev)


def _wh_displacements(d: int) -> np.ndarray:
    """Shift/clock displacement operators X^a Z^b, flattened over (a, b)."""
    w = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)  # X|k> = |k+1>
    clock = np.diag(w ** np.arange(d))
    out = np.empty((d * d, d, d), dtype=complex)
    xa = np.eye(d, dtype=complex)
    for a in range(d):
        zb = np.eye(d, dtype=complex)
        for b in range(d):
            out[a * d + b] = xa @ zb
            zb = zb @ clock
        xa = xa @ shift
    return out


def _search_one_seed_wh(d: int, seed: int, max_iters: int):
    """Search over a single fiducial vector; the frame is its WH orbit."""
    disp = _wh_displacements(d)

    def resid(x):
        f = x[:d] + 1j * x[d:]
        norm2 = np.real(np.vdot(f, f))
        ov = np.abs(np.einsum("a,iab,b->i", f.conj(), disp[1:], f)) ** 2 / norm2 ** 2
        return np.concatenate([ov - 1.0 / (d + 1), [norm2 - 1.0]])

    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal(2 * d)
    sol = least_squares(resid, x0, method="trf", max_nfev=max_iters,
                        xtol=3e-16, ftol=3e-16, gtol=3e-16)
    f = sol.x[:d] + 1j * sol.x[d:]
    f /= np.linalg.norm(f)
    v = np.einsum("iab,b->ia", disp, f)
    return v, int(sol.nfev)


def search_sic(d: int, seeds, max_iters: int = 1500, target_residual: float = 1e-8,
               mode: str = "exact") -> SicFrame:
    """Find a SIC frame in dimension d by seeded multi-start optimization.

    Seeds are tried in order and the first one whose frame reaches
    ``target_residual`` (max pairwise overlap deviation) wins, so results are
    deterministic given the seed list.  ``mode="wh"`` restricts the search to
    Weyl-Heisenberg covariant frames (a single fiducial vector), which is
    much faster; the exact mode optimizes all d^2 vectors independently.

    Raises SicSearchError (carrying the best residual seen) if no seed
    converges.
    """
    if not 2 <= d <= SEARCH_DIM_MAX:
        raise ValueError(f"search supports 2 <= d <= {SEARCH_DIM_MAX}, got {d}")
    if mode not in ("exact", "wh"):
        raise ValueError(f"unknown search mode {mode!r}")
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValueError("need at least one seed")

    best = np.inf
    target = sic_overlap_target(d)
    for seed in seeds:
        if mode == "exact":
            v, iters = _search_one_seed_exact(d, seed, max_iters)
        else:
            v, iters = _search_one_seed_wh(d, seed, max_iters)
        res = float(np.max(np.abs(np.abs(v.conj() @ v.T) ** 2 - target)))
        if res <= target_residual:
            return SicFrame.from_vectors(
                v, Provenance("searched", seed=seed, iterations=iters, residual=res))
        best = min(best, res)
    raise SicSearchError(d, seeds, best, target_residual)


# ---------------------------------------------------------------------------
# verification

@dataclass(frozen=True)
class SicVerification:
    dim: int
    tol: float
    max_overlap_error: float
    completeness_error: float
    max_rank_one_error: float
    gram_rank: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "tol": self.tol,
            "max_overlap_error": self.max_overlap_error,
            "completeness_error": self.completeness_error,
            "max_rank_one_error": self.max_rank_one_error,
            "gram_rank": self.gram_rank,
            "full_rank": self.gram_rank == self.dim ** 2,
            "passed": self.passed,
        }


def verify_sic(frame: SicFrame, tol: float | None = None) -> SicVerification:
    """Check every defining invariant of a SIC frame; always returns a report.

    Reports the max pairwise overlap deviation, the resolution-of-identity
    error of (1/d) sum_i Pi_i, the worst rank-1 deviation |tr Pi^2 - 1| /
    |tr Pi^3 - 1|, and the rank of the projector Gram matrix (must be d^2:
    informational completeness).
    """
    tol = default_tol() if tol is None else tol
    d, n = frame.dim, frame.n_outcomes
    projs = frame.projectors

    gram_full = np.real(np.einsum("iab,jba->ij", projs, projs))
    overlap_err = float(np.max(np.abs(gram_full - sic_overlap_target(d))))
    completeness_err = float(np.max(np.abs(projs.sum(axis=0) / d - np.eye(d))))

    p2 = np.einsum("iab,ibc->iac", projs, projs)
    t2 = np.real(np.einsum("iaa->i", p2))
    t3 = np.real(np.einsum("iab,iba->i", p2, projs))
    herm = np.max(np.abs(projs - projs.conj().transpose(0, 2, 1)))
    rank_one_err = float(max(np.max(np.abs(t2 - 1)), np.max(np.abs(t3 - 1)), herm))

    # linear independence of the frame: d^2 x d^2 Gram of full rank
    svals = np.linalg.svd(gram_full, compute_uv=False)
    gram_rank = int(np.sum(svals > n * svals[0] * np.finfo(float).eps))

    passed = (overlap_err <= tol and completeness_err <= tol
              and rank_one_err <= tol and gram_rank == n)
    return SicVerification(
        dim=d, tol=tol, max_overlap_error=overlap_err,
        completeness_error=completeness_err, max_rank_one_error=rank_one_err,
        gram_rank=gram_rank, passed=passed,
    )


# ---------------------------------------------------------------------------
# MUB two-designs (prime dimension)

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class MubFrame:
    """d(d+1) projectors in d+1 mutually unbiased bases, flattened i = r*d + s."""

    dim: int
    projectors: np.ndarray  # (d(d+1), d, d)
    vectors: np.ndarray | None = None

    def __post_init__(self):
        n = self.dim * (self.dim + 1)
        p = np.asarray(self.projectors, dtype=complex)
        if p.shape != (n, self.dim, self.dim):
            raise ValueError(f"expected {n} projectors, got shape {p.shape}")
        object.__setattr__(self, "projectors", _readonly(p))
        if self.vectors is not None:
            object.__setattr__(self, "vectors",
                               _readonly(np.asarray(self.vectors, dtype=complex)))

    @property
    def n_outcomes(self) -> int:
        return self.dim * (self.dim + 1)

    @property
    def effects(self) -> np.ndarray:
        """POVM effects E_i = Pi_i / (d + 1)."""
        return self.projectors / (self.dim + 1)

    def basis(self, r: int) -> np.ndarray:
        """Projectors of basis r (0 <= r <= d)."""
        d = self.dim
        return self.projectors[r * d:(r + 1) * d]


def build_mub(d: int) -> MubFrame:
    """Complete set of d+1 mutually unbiased bases for prime d <= 11.

    d = 2 uses the Pauli Z/X/Y eigenbases; odd primes use the quadratic
    Gauss-sum construction: basis b has vectors with components
    w^(b l^2 + s l)/sqrt(d), preceded by the computational basis.
    """
    if not is_prime(d) or d > MUB_DIM_MAX:
        raise ValueError(f"MUB construction needs prime d <= {MUB_DIM_MAX}, got {d}")
    if d == 2:
        s2 = 1 / np.sqrt(2)
        rows = [
            [1, 0], [0, 1],            # Z
            [s2, s2], [s2, -s2],       # X
            [s2, 1j * s2], [s2, -1j * s2],  # Y
        ]
        vecs = np.array(rows, dtype=complex)
    else:
        w = np.exp(2j * np.pi / d)
        ls = np.arange(d)
        blocks = [np.eye(d, dtype=complex)]
        for b in range(d):
            rows = [w ** ((b * ls * ls + s * ls) % d) for s in range(d)]
            blocks.append(np.array(rows, dtype=complex) / np.sqrt(d))
        vecs = np.concatenate(blocks, axis=0)
    projs = np.einsum("ia,ib->iab", vecs, vecs.conj())
    return MubFrame(dim=d, projectors=projs, vectors=vecs)


def depolarize_check(mub: MubFrame, x) -> float:
    """Deviation of the MUB averaging map from ((tr X) I + X)/(d + 1).

    sum_{r,s} Pi^r_s X Pi^r_s / (d+1) equals that closed form for every
    matrix X exactly when the bases form a two-design; returns the max
    entrywise deviation.
    """
    d = mub.dim
    xm = as_complex_matrix(x, dim=d, name="x")
    projs = mub.projectors
    lhs = np.einsum("iab,bc,icd->ad", projs, xm, projs) / (d + 1)
    rhs = (np.trace(xm) * np.eye(d) + xm) / (d + 1)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# real Hilbert space feasibility

@dataclass(frozen=True)
class RealFeasibilityReport:
    dim: int
    required_count: int
    required_overlap: object  # Fraction 1/(d+2)
    delsarte_bound: object
    known_max: int | None
    verdict: str  # "infeasible" or "unknown"

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "required_count": self.required_count,
            "required_overlap": str(self.required_overlap),
            "delsarte_bound": str(self.delsarte_bound),
            "known_max": self.known_max,
            "verdict": self.verdict,
        }


def real_sic_feasibility(d: int) -> RealFeasibilityReport:
    """Can a minimal IC frame of the SIC kind exist over real Hilbert space?

    Real symmetric operators on R^d span d(d+1)/2 dimensions, so a minimal
    IC frame needs that many equiangular projectors; the trace-preservation
    and fixed-point constraints force their common overlap to 1/(d + 2).
    The verdict is "infeasible" when the best known equiangular count in
    dimension d falls short of the requirement, "unknown" otherwise.
    """
    from fractions import Fraction

    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    required = d * (d + 1) // 2
    overlap = Fraction(1, d + 2)
    bound = delsarte_bound(d, overlap)
    known = KNOWN_REAL_EQUIANGULAR_MAX.get(d)
    verdict = "infeasible" if known is not None and known < required else "unknown"
    return RealFeasibilityReport(
        dim=d, required_count=required, required_overlap=overlap,
        delsarte_bound=bound, known_max=known, verdict=verdict,
    )
