"""Device embeddability: eigendecomposition, scaling, squeezing, photon budget.

A coded graph fits the device iff the nonzero singular values of its 4x4
submatrix are all equal.  The matrix is then rescaled so those values become
tanh(1), which pins every active two-mode squeezer at parameter r = 1 and
fixes the per-mode mean photon number at rank * sinh^2(1)/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import graphs
from .errors import InternalError, NotEmbeddableError, ValidationError

#: Squeezing parameter forced by the device on every active pair.
SQUEEZING = 1.0

#: Per-mode mean photon number contributed by a single substructure.
MEAN_PHOTON_SINGLE = math.sinh(SQUEEZING) ** 2 / 4.0

#: Singular values below this count as zero; nonzero ones must agree within it.
SINGULAR_TOL = 1e-9

_JACOBI_TOL = 1e-12
_MAX_SWEEPS = 50


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Factorisation m = basis @ diag(eigenvalues) @ basis.T."""

    eigenvalues: np.ndarray
    basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.basis @ np.diag(self.eigenvalues) @ self.basis.T


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    # One Jacobi rotation in the (p, q) plane, zeroing a[p, q].
    theta = 0.5 * math.atan2(2.0 * a[p, q], a[q, q] - a[p, p])
    c, s = math.cos(theta), math.sin(theta)
    col_p, col_q = a[:, p].copy(), a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p, row_q = a[p, :].copy(), a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    v_p, v_q = v[:, p].copy(), v[:, q].copy()
    v[:, p] = c * v_p - s * v_q
    v[:, q] = s * v_p + c * v_q


def symmetric_eigendecomposition(m, tol: float = _JACOBI_TOL) -> EigenDecomposition:
    """Diagonalise a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps the upper triangle, zeroing one off-diagonal entry per rotation,
    until every off-diagonal magnitude falls below ``tol``.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {a.shape}")
    if np.abs(a - a.T).max(initial=0.0) > 1e-12:
        raise ValidationError("matrix must be symmetric within 1e-12")
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(_MAX_SWEEPS):
        off = np.abs(a - np.diag(np.diagonal(a))).max()
        if off < tol:
            return EigenDecomposition(np.diagonal(a).copy(), v)
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) >= tol:
                    _rotate(a, v, p, q)
    raise InternalError("Jacobi iteration failed to converge")


@dataclass(frozen=True)
class Embeddability:
    """Outcome of the equal-singular-value test on a submatrix."""

    embeddable: bool
    rank: int
    singular_values: tuple[float, ...]   # all four, sorted descending
    reason: str | None = None


def embeddability_check(m) -> Embeddability:
    """Decide whether the submatrix can be prepared with equal squeezing.

    Embeddable iff the matrix is nonzero and all nonzero singular values
    (absolute eigenvalues, for a real symmetric matrix) coincide; the rank is
    then the number of active squeezed pairs.
    """
    m = graphs.validate_submatrix(m)
    eig = symmetric_eigendecomposition(m)
    sigma = tuple(sorted((abs(float(x)) for x in eig.eigenvalues), reverse=True))
    nonzero = [s for s in sigma if s > SINGULAR_TOL]
    if not nonzero:
        return Embeddability(False, 0, sigma, "no edges")
    if max(nonzero) - min(nonzero) > SINGULAR_TOL:
        listed = ", ".join(f"{s:.6f}" for s in nonzero)
        return Embeddability(
            False, 0, sigma, f"unequal nonzero singular values ({listed})")
    return Embeddability(True, len(nonzero), sigma)


@dataclass(frozen=True, eq=False)
class EmbeddingSpec:
    """Scaled matrix and squeezing data for one embeddable graph."""

    code: str
    scaled_matrix: np.ndarray            # c * M, nonzero singular values tanh(1)
    scale_c: float
    singular_values: tuple[float, ...]   # of the unscaled matrix
    rank: int
    squeezing: tuple[float, ...]
    mean_photon_per_mode: float


def make_embedding(code: str) -> EmbeddingSpec:
    """Embedding parameters for ``code``; raises if it is not embeddable."""
    m = graphs.decode_code(code)
    emb = embeddability_check(m)
    if not emb.embeddable:
        raise NotEmbeddableError(code, emb.reason)
    # The common nonzero singular value, exactly: all nonzero eigenvalues of
    # M^2 are equal, so rank * sigma^2 = trace(M^2) = number of unit entries.
    # This keeps the scale bit-identical under mode permutations, which the
    # Jacobi floats alone would not.
    sigma = math.sqrt(int(m.sum()) / emb.rank)
    c = math.tanh(SQUEEZING) / sigma
    return EmbeddingSpec(
        code=code,
        scaled_matrix=c * m,
        scale_c=c,
        singular_values=emb.singular_values,
        rank=emb.rank,
        squeezing=(SQUEEZING,) * emb.rank,
        mean_photon_per_mode=emb.rank * MEAN_PHOTON_SINGLE,
    )


def enumerate_embeddable() -> list[tuple[str, EmbeddingSpec]]:
    """All embeddable codes with their specs, in ascending code order."""
    out = []
    for code in graphs.all_codes():
        emb = embeddability_check(graphs.decode_code(code))
        if emb.embeddable:
            out.append((code, make_embedding(code)))
    return out


def mean_photon_total(spec: EmbeddingSpec) -> float:
    """Mean photon number over the whole device: 8 times the per-mode value."""
    return 8.0 * spec.mean_photon_per_mode
