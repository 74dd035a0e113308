"""Seeded random generators for states, unitaries and POVMs.

Used by the self-check suites, the geometry sweep and the tests.  Every
generator takes a ``numpy.random.Generator`` (or a seed) so sweeps are
reproducible; independent seeds may run in parallel.
"""

from __future__ import annotations

import numpy as np


def get_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_state_vector(d: int, rng) -> np.ndarray:
    """Haar-random unit vector in C^d."""
    rng = get_rng(rng)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_pure_state(d: int, rng) -> np.ndarray:
    v = random_state_vector(d, rng)
    return np.outer(v, v.conj())


def random_density_operator(d: int, rng, rank: int | None = None) -> np.ndarray:
    """Random mixed state from the Ginibre ensemble: GG^dag / tr."""
    rng = get_rng(rng)
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_mixed_state(d: int, rng, floor: float = 0.05) -> np.ndarray:
    """Random state bounded away from the pure-state boundary.

    A plain Ginibre draw can land arbitrarily close to a pure state; blending
    in a maximally-mixed floor keeps the purity gap 1 - tr(rho^2) above
    ~floor, so tests that need detectably mixed states stay deterministic.
    """
    rho = random_density_operator(d, rng)
    return (1 - floor) * rho + floor * np.eye(d) / d


def random_hermitian(d: int, rng) -> np.ndarray:
    rng = get_rng(rng)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


def random_unitary(d: int, rng) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fixing."""
    rng = get_rng(rng)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_povm(d: int, m: int, rng) -> np.ndarray:
    """Random m-outcome POVM: Ginibre positives whitened to sum to identity."""
    if m < 1:
        raise ValueError("POVM needs at least one outcome")
    rng = get_rng(rng)
    raw = []
    for _ in range(m):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        raw.append(g @ g.conj().T)
    total = np.sum(raw, axis=0)
    w, u = np.linalg.eigh(total)
    inv_sqrt = u @ np.diag(w ** -0.5) @ u.conj().T
    return np.array([inv_sqrt @ a @ inv_sqrt for a in raw])


def complete_basis(v: np.ndarray) -> np.ndarray:
    """Orthonormal von Neumann basis (as projectors) whose first element is v.

    Deterministic: the remaining directions come from Gram-Schmidt against
    identity columns, dropping the one most parallel to v.
    """
    d = v.shape[0]
    imax = int(np.argmax(np.abs(v)))
    eye = np.eye(d, dtype=complex)
    cols = [v] + [eye[:, j] for j in range(d) if j != imax]
    q, _ = np.linalg.qr(np.column_stack(cols))
    return np.einsum("ai,bi->iab", q, q.conj())
