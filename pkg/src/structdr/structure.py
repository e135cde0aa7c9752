"""Clustering-structure analysis: scatter matrices, the Fisher eigenproblem
and its distinctness coefficient, a Monte-Carlo overlap measure for
two-component mixtures, and first-order perturbation tooling with the
closed-form bound on how much weighting can move the distinctness.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import multivariate_normal

from . import transform as _transform
from .errors import ConfigError, ShapeError
from .linalg import (
    EigenSolution,
    apply_centering,
    check_symmetric,
    cluster_counts,
    gen_eig,
    symmetrize,
)
from .mixture import LabeledDataset, MixtureSpec

MIN_MC_SAMPLES = 10_000
DEFAULT_MC_SAMPLES = 200_000


@dataclass(frozen=True)
class ScatterPair:
    """Total scatter T = X0^T X0 and between-cluster scatter
    B = sum_l n_l (mu_l - mu)(mu_l - mu)^T. Both PSD with B <= T."""

    total: np.ndarray
    between: np.ndarray

    @property
    def within(self) -> np.ndarray:
        return self.total - self.between


@dataclass(frozen=True)
class FisherSolution:
    """Solution of B v = lambda T v with the derived summary quantities.

    distinctness is the mean of the k-1 largest eigenvalues (zeros
    included when fewer are numerically nonzero); fisher_basis spans the
    discriminant subspace.
    """

    eigen: EigenSolution
    distinctness: float
    fisher_basis: "SubspaceBasis"  # noqa: F821 - imported lazily to avoid a cycle


@dataclass(frozen=True)
class SdistEstimate:
    """Monte-Carlo estimate of the integral distinctness with its
    standard error."""

    value: float
    std_error: float
    n_samples: int


@dataclass(frozen=True)
class PerturbationReport:
    """Observed distinctness shift between original and weighted data,
    the first-order eigenvalue predictions, and the a-priori bound."""

    n: int
    d: int
    k: int
    alpha: float
    lambda_bar_x: float
    lambda_bar_z: float
    observed_delta: float
    bound_rhs: float
    bound_satisfied: bool
    predicted_values: np.ndarray
    empirical_sd_norm: float

    CSV_FIELDS = ("n", "d", "k", "alpha", "lambda_x", "lambda_z", "delta", "bound", "satisfied")

    def to_csv_row(self) -> list:
        return [
            self.n,
            self.d,
            self.k,
            repr(self.alpha),
            repr(self.lambda_bar_x),
            repr(self.lambda_bar_z),
            repr(self.observed_delta),
            repr(self.bound_rhs),
            "true" if self.bound_satisfied else "false",
        ]


def scatter_matrices(data: LabeledDataset) -> ScatterPair:
    """Total and between-cluster scatter of a labeled dataset."""
    counts = cluster_counts(data.labels)
    if data.n <= data.d:
        raise ConfigError(f"need n > d, got n = {data.n}, d = {data.d}")
    centered = apply_centering(data.data)
    total = symmetrize(centered.T @ centered)
    sums = np.zeros((counts.size, data.d))
    np.add.at(sums, data.labels - 1, centered)
    offsets = sums / counts[:, None]  # cluster means of the centered data
    between = symmetrize((offsets * counts[:, None]).T @ offsets)
    return ScatterPair(total=total, between=between)


def fisher_solve(s: ScatterPair, k: int) -> FisherSolution:
    """Solve the generalized Fisher eigenproblem for a k-cluster scatter
    pair and summarize distinctness.

    The eigenvalues lie in [0, 1] up to roundoff; the distinctness
    coefficient averages the k-1 largest and is clipped into [0, 1].
    """
    from .subspace import SubspaceBasis

    d = s.total.shape[0]
    if not 1 <= k - 1 < d:
        raise ConfigError(f"need 2 <= k <= d, got k = {k} with d = {d}")
    eigen = gen_eig(s.between, s.total)
    top = eigen.values[: k - 1]
    distinctness = float(min(max(top.mean(), 0.0), 1.0))
    basis = SubspaceBasis(columns=eigen.vectors[:, : k - 1])
    return FisherSolution(eigen=eigen, distinctness=distinctness, fisher_basis=basis)


def min_nonzero_eigenvalue(solution: FisherSolution, tol: float = 1e-6) -> float:
    """Smallest Fisher eigenvalue above tol (0.0 if none)."""
    nonzero = solution.eigen.values[solution.eigen.values > tol]
    return float(nonzero.min()) if nonzero.size else 0.0


def sdist_overlap(spec: MixtureSpec, mc_samples: int = DEFAULT_MC_SAMPLES,
                  seed=0) -> SdistEstimate:
    """Monte-Carlo estimate of 1 - integral of min(f1, f2)/2 for a
    two-component equal-weight mixture.

    Samples are drawn from the mixture itself and the bounded ratio
    min(f1, f2) / (f1 + f2) is averaged, which gives an unbiased estimate
    of the overlap integral with per-sample values in (0, 1/2].
    """
    if spec.k != 2:
        raise ConfigError(
            f"integral distinctness is defined here for k = 2 only, got k = {spec.k}"
        )
    if mc_samples < MIN_MC_SAMPLES:
        raise ConfigError(f"mc_samples must be >= {MIN_MC_SAMPLES}, got {mc_samples}")
    rng = np.random.default_rng(seed)
    half = mc_samples // 2
    counts = (half, mc_samples - half)
    draws = []
    for mean, cov, m in zip(spec.means, spec.covariances, counts):
        z = rng.standard_normal((m, spec.d))
        draws.append(mean + z @ np.linalg.cholesky(cov).T)
    points = np.vstack(draws)
    log_f1 = multivariate_normal(spec.means[0], spec.covariances[0]).logpdf(points)
    log_f2 = multivariate_normal(spec.means[1], spec.covariances[1]).logpdf(points)
    ratio = np.exp(np.minimum(log_f1, log_f2) - np.logaddexp(log_f1, log_f2))
    overlap = float(ratio.mean())
    se = float(ratio.std(ddof=1) / math.sqrt(mc_samples))
    return SdistEstimate(value=1.0 - overlap, std_error=se, n_samples=mc_samples)


def perturb_eigs_first_order(solution: EigenSolution, delta_k, delta_m) -> np.ndarray:
    """First-order eigenvalue predictions for a perturbed generalized
    symmetric eigenproblem.

    Given the base solution of K0 a = lambda M0 a with M0-orthonormal
    eigenvectors, the perturbed eigenvalues are approximated by
    lambda_j + a_j^T (dK - lambda_j dM) a_j. Eigenvectors are not updated.
    """
    delta_k = check_symmetric(delta_k, name="delta_k")
    delta_m = check_symmetric(delta_m, name="delta_m")
    a = solution.vectors
    quad_k = np.einsum("ij,ij->j", a, delta_k @ a)
    quad_m = np.einsum("ij,ij->j", a, delta_m @ a)
    return solution.values + quad_k - solution.values * quad_m


def proposition1_bound(n: int, d: int, k: int, alpha: float, lambda_bar_x: float) -> float:
    """Closed-form ceiling on |distinctness(Z) - distinctness(X)|:
    (1/sqrt(n)) * (d/alpha) * (lambda_bar + sqrt(k))."""
    if min(n, d, k) <= 0 or alpha <= 0:
        raise ConfigError(
            f"n, d, k, alpha must all be positive, got n={n}, d={d}, k={k}, alpha={alpha}"
        )
    if not 0.0 <= lambda_bar_x <= 1.0:
        raise ConfigError(f"lambda_bar_x must be in [0, 1], got {lambda_bar_x}")
    return (d / alpha) * (lambda_bar_x + math.sqrt(k)) / math.sqrt(n)


def distinctness_delta_check(x: LabeledDataset, z0: LabeledDataset, alpha: float,
                             isotropic=None) -> PerturbationReport:
    """Compare distinctness before and after the weighting transform.

    Solves the Fisher problem on both datasets, evaluates the first-order
    eigenvalue predictions from the scatter perturbations, and checks the
    observed shift against the closed-form bound. A violated bound is
    recorded, never raised: the bound rests on an unproven assumption
    about the spread of squared row norms, so the empirical standard
    deviation of |y_i|^2 is measured and reported with every run.
    """
    if x.labels.shape != z0.labels.shape or np.any(x.labels != z0.labels):
        raise ShapeError("x and z0 must carry identical labels")
    k = x.k
    lambda_x = fisher_solve(scatter_matrices(x), k).distinctness
    lambda_z = fisher_solve(scatter_matrices(z0), k).distinctness

    iso = isotropic if isotropic is not None else _transform.isotropize(x)
    base_pair = scatter_matrices(iso.as_labeled())
    base_sol = gen_eig(base_pair.between, base_pair.total)
    z_pair = scatter_matrices(z0)
    predicted = perturb_eigs_first_order(
        base_sol, z_pair.between - base_pair.between, z_pair.total - base_pair.total
    )

    sqnorms = np.einsum("ij,ij->i", iso.data, iso.data)
    bound = proposition1_bound(x.n, x.d, k, alpha, lambda_x)
    delta = abs(lambda_z - lambda_x)
    return PerturbationReport(
        n=x.n,
        d=x.d,
        k=k,
        alpha=float(alpha),
        lambda_bar_x=lambda_x,
        lambda_bar_z=lambda_z,
        observed_delta=delta,
        bound_rhs=bound,
        bound_satisfied=bool(delta <= bound),
        predicted_values=predicted,
        empirical_sd_norm=float(sqnorms.std(ddof=0)),
    )
