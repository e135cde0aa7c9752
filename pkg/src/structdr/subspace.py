"""Subspace extraction (principal-component and Fisher discriminant bases)
and the similarity coefficient between two subspaces: the mean squared
cosine of their principal angles, a value in [0, 1] that is invariant to
the choice of basis within each subspace.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, RankError, ShapeError
from .linalg import sym_eig, symmetrize
from .mixture import LabeledDataset
from .structure import fisher_solve, scatter_matrices

INDEPENDENCE_TOL = 1e-10
CONDITIONING_WARN_TOL = 1e-6
AMBIGUITY_TOL = 1e-10
CENTERED_TOL = 1e-8


@dataclass(frozen=True)
class SubspaceBasis:
    """d x m matrix whose linearly independent columns span a subspace.

    Columns need not be orthonormal (Fisher bases are orthonormal in the
    total-scatter metric instead). Construction rejects numerically
    dependent columns and attaches a conditioning warning when the
    smallest singular value is merely borderline.
    """

    columns: np.ndarray
    warnings: tuple = field(default=())

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=float)
        if cols.ndim != 2:
            raise ConfigError(f"basis columns must form a 2-D array, got shape {cols.shape}")
        d, m = cols.shape
        if not 1 <= m < d:
            raise ConfigError(f"need 1 <= m < d for a proper subspace, got m = {m}, d = {d}")
        smallest = float(np.linalg.svd(cols, compute_uv=False)[-1])
        if smallest <= INDEPENDENCE_TOL:
            raise RankError(
                f"basis columns numerically dependent: smallest singular value {smallest:.3e}"
            )
        warnings = tuple(self.warnings)
        if smallest < CONDITIONING_WARN_TOL:
            warnings = warnings + (
                f"near-dependent basis: smallest singular value {smallest:.3e}",
            )
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "warnings", warnings)

    @property
    def ambient_dim(self) -> int:
        return self.columns.shape[0]

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    def orthonormal(self) -> np.ndarray:
        q, _ = np.linalg.qr(self.columns)
        return q


def pc_subspace(data, m: int) -> SubspaceBasis:
    """Span of the m leading principal components of centered data.

    The caller centers; a nonzero column mean is rejected. When the m-th
    and (m+1)-th covariance eigenvalues coincide the leading subspace is
    not unique, so an ambiguity warning is attached to the (still
    returned) result.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ConfigError(f"data must be 2-D, got shape {data.shape}")
    n, d = data.shape
    if not 1 <= m < d:
        raise ConfigError(f"need 1 <= m < d, got m = {m}, d = {d}")
    max_mean = float(np.abs(data.mean(axis=0)).max())
    if max_mean >= CENTERED_TOL:
        raise ConfigError(
            f"data must be centered before PC extraction (max |column mean| = {max_mean:.3e})"
        )
    cov = symmetrize(data.T @ data) / n
    sol = sym_eig(cov)
    warnings = ()
    gap = float(sol.values[m - 1] - sol.values[m])
    if gap <= AMBIGUITY_TOL * max(1.0, float(sol.values[0])):
        warnings = (
            f"leading {m}-dimensional subspace is ambiguous: eigenvalue {m} and "
            f"{m + 1} differ by {gap:.3e}",
        )
    return SubspaceBasis(columns=sol.vectors[:, :m], warnings=warnings)


def fisher_subspace(data: LabeledDataset) -> SubspaceBasis:
    """Span of the k-1 leading generalized eigenvectors of the
    (between, total) scatter pair."""
    return fisher_solve(scatter_matrices(data), data.k).fisher_basis


def sss(v: SubspaceBasis, a: SubspaceBasis) -> float:
    """Subspace similarity: mean squared cosine of the principal angles.

    Both bases are orthonormalized, the singular values of the crossed
    product are the cosines of the principal angles, and their squared
    mean is returned. Equals 1 for identical subspaces and 0 for
    orthogonal ones; invariant to right-multiplying either basis by any
    invertible matrix.
    """
    if v.ambient_dim != a.ambient_dim:
        raise ShapeError(
            f"ambient dimensions differ: {v.ambient_dim} vs {a.ambient_dim}"
        )
    if v.dim != a.dim:
        raise ShapeError(f"subspace dimensions differ: {v.dim} vs {a.dim}")
    cosines = np.linalg.svd(v.orthonormal().T @ a.orthonormal(), compute_uv=False)
    cosines = np.clip(cosines, 0.0, 1.0)
    return float(np.mean(cosines**2))
