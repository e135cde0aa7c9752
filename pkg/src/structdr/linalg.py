"""Dense symmetric linear algebra: spectral and generalized-symmetric
eigenproblems, matrix norms, the centering operator and the cluster-mean
hat projector.

Eigenvectors follow a deterministic sign convention (largest-magnitude
entry positive) so downstream subspace comparisons are reproducible.
All functions are pure; none mutate their inputs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DefinitenessError, MissingClusterError, SymmetryError

SYM_ATOL = 1e-12
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class EigenSolution:
    """Eigenvalues in non-increasing order with paired column eigenvectors.

    kind is "standard" (orthonormal vectors) or "generalized" (vectors
    orthonormal in the metric of the defining problem).
    """

    values: np.ndarray
    vectors: np.ndarray
    kind: str

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]


def check_symmetric(m, atol=SYM_ATOL, name="matrix"):
    """Validate m is square and symmetric to tolerance; return it as float64.

    Tolerance scales with the largest entry magnitude so matrices built from
    large cross-products are not rejected for harmless rounding asymmetry.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SymmetryError(f"{name} must be square, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max())) if m.size else 1.0
    dev = float(np.abs(m - m.T).max()) if m.size else 0.0
    if dev > atol * scale:
        raise SymmetryError(
            f"{name} not symmetric: max |m - m^T| = {dev:.3e} exceeds {atol * scale:.3e}"
        )
    return m


def symmetrize(m) -> np.ndarray:
    """(m + m^T) / 2, for products that are symmetric in exact arithmetic."""
    m = np.asarray(m, dtype=float)
    return (m + m.T) / 2.0


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    idx = np.abs(vectors).argmax(axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eig(m, atol=SYM_ATOL) -> EigenSolution:
    """Spectral decomposition of a symmetric matrix.

    Returns eigenvalues sorted non-increasing with orthonormal column
    eigenvectors. Raises SymmetryError for inputs asymmetric beyond
    tolerance.
    """
    m = check_symmetric(m, atol=atol)
    vals, vecs = np.linalg.eigh(m)
    # stable sort on -values keeps the solver's order among exact ties
    order = np.argsort(-vals, kind="stable")
    return EigenSolution(values=vals[order], vectors=_fix_signs(vecs[:, order]), kind="standard")


def gen_eig(k_mat, m_mat, rank_rtol=RANK_RTOL) -> EigenSolution:
    """Solve the symmetric-definite generalized eigenproblem K v = lambda M v.

    M is reduced by its own spectral decomposition: with M = A L A^T the
    problem whitens to the standard one for (L^{-1/2} A^T) K (A L^{-1/2}),
    and eigenvectors are mapped back through A L^{-1/2}, which makes them
    M-orthonormal (V^T M V = I).

    Parameters
    ----------
    k_mat : symmetric positive semidefinite (d, d)
    m_mat : symmetric positive definite (d, d)
    rank_rtol : smallest/largest eigenvalue ratio below which M is
        declared indefinite or singular.

    Raises
    ------
    DefinitenessError
        If M has an eigenvalue <= rank_rtol times its largest.
    """
    k_mat = check_symmetric(k_mat, name="k_mat")
    m_sol = sym_eig(m_mat)
    largest = float(m_sol.values[0])
    smallest = float(m_sol.values[-1])
    if largest <= 0.0 or smallest <= rank_rtol * largest:
        bad = int(m_sol.values.size - 1)
        raise DefinitenessError(
            f"metric matrix not positive definite: eigenvalue[{bad}] = {smallest:.6e} "
            f"(largest = {largest:.6e}, required > {rank_rtol:g} * largest)"
        )
    whitener = m_sol.vectors / np.sqrt(m_sol.values)
    reduced = symmetrize(whitener.T @ k_mat @ whitener)
    inner = sym_eig(reduced)
    vectors = _fix_signs(whitener @ inner.vectors)
    return EigenSolution(values=inner.values, vectors=vectors, kind="generalized")


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m, dtype=float), "fro"))


def spectral_norm(m) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    m = check_symmetric(m)
    return float(np.abs(np.linalg.eigvalsh(m)).max())


def centering_matrix(n: int) -> np.ndarray:
    """Materialized n x n centering operator: 1 - 1/n on the diagonal,
    -1/n off it. Symmetric and idempotent."""
    if n < 1:
        raise MissingClusterError(f"centering operator needs n >= 1, got {n}")
    return np.eye(n) - np.full((n, n), 1.0 / n)


def apply_centering(data) -> np.ndarray:
    """Subtract column means (matrix-free application of the centering
    operator). Idempotent."""
    data = np.asarray(data, dtype=float)
    return data - data.mean(axis=0, keepdims=True)


def cluster_counts(labels, k=None) -> np.ndarray:
    """Counts per cluster for labels in {1..k}; every label must occur."""
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size == 0:
        raise MissingClusterError("labels must be a non-empty 1-D array")
    if k is None:
        k = int(labels.max())
    counts = np.bincount(labels, minlength=k + 1)[1:]
    if labels.min() < 1 or labels.max() > k:
        raise MissingClusterError(
            f"labels must lie in 1..{k}, got range [{labels.min()}, {labels.max()}]"
        )
    missing = np.nonzero(counts == 0)[0] + 1
    if missing.size:
        raise MissingClusterError(f"empty cluster(s): {missing.tolist()} (k = {k})")
    return counts


def hat_matrix(labels, k=None) -> np.ndarray:
    """Materialized hat matrix H = E (E^T E)^{-1} E^T for the cluster
    indicator matrix E.

    H is the orthogonal projector onto the indicator column space: it is
    symmetric, idempotent, has trace k, and H x replaces every coordinate
    of x by the mean of its cluster.
    """
    labels = np.asarray(labels)
    counts = cluster_counts(labels, k)
    n = labels.size
    h = np.zeros((n, n))
    for cluster, count in enumerate(counts, start=1):
        members = labels == cluster
        h[np.ix_(members, members)] = 1.0 / count
    return h


def apply_hat(labels, x, k=None) -> np.ndarray:
    """Matrix-free H @ x: replace each row of x by its cluster mean."""
    labels = np.asarray(labels)
    counts = cluster_counts(labels, k)
    x = np.asarray(x, dtype=float)
    vec_in = x.ndim == 1
    if vec_in:
        x = x[:, None]
    sums = np.zeros((counts.size, x.shape[1]))
    np.add.at(sums, labels - 1, x)
    means = sums / counts[:, None]
    out = means[labels - 1]
    return out[:, 0] if vec_in else out
