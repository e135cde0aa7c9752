"""Two-step data transformation: isotropization (center + whiten so the
total scatter becomes the identity) followed by per-observation weighting
that shrinks distant rows toward the center.

The weighting comes in two flavors: the hyperbolic scheme
w_i = sqrt(1 / (1 + |y_i|^2 / alpha)) and, for comparison, the exponential
scheme w_i = exp(-|y_i|^2 / alpha). Both leave central observations nearly
untouched; the hyperbolic one decays slower near zero and keeps more
variation among peripheral rows.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, RankError, ShapeError
from .linalg import RANK_RTOL, apply_centering, sym_eig, symmetrize
from .mixture import LabeledDataset

DEFAULT_ALPHA = 0.5
SCHEMES = ("hyperbolic", "exponential")


@dataclass(frozen=True)
class IsotropicDataset:
    """Data in isotropic position (zero column means, Y^T Y = I) plus the
    affine map that produced it: y = (x - center) @ whitener."""

    data: np.ndarray
    labels: np.ndarray
    center: np.ndarray
    whitener: np.ndarray

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def reproject(self, x) -> np.ndarray:
        """Apply the stored centering + whitening map to new rows."""
        return (np.asarray(x, dtype=float) - self.center) @ self.whitener

    def as_labeled(self) -> LabeledDataset:
        return LabeledDataset(data=self.data, labels=self.labels)


@dataclass(frozen=True)
class WeightVector:
    """Per-observation shrink factors in (0, 1]."""

    weights: np.ndarray
    alpha: float
    scheme: str


@dataclass(frozen=True)
class PipelineResult:
    isotropic: IsotropicDataset
    weights: WeightVector
    weighted: LabeledDataset


def isotropize(x: LabeledDataset) -> IsotropicDataset:
    """Map a dataset to isotropic position.

    Centers the rows, then whitens with the spectral factor A L^{-1/2} of
    the total scatter T = X0^T X0, so the output satisfies Y^T Y = I and
    consequently sum_i |y_i|^2 = d.

    Raises
    ------
    RankError
        If the total scatter is numerically rank deficient (no silent
        regularization is attempted).
    """
    centered = apply_centering(x.data)
    scatter = symmetrize(centered.T @ centered)
    sol = sym_eig(scatter)
    largest = float(sol.values[0])
    smallest = float(sol.values[-1])
    if largest <= 0.0 or smallest <= RANK_RTOL * largest:
        bad = int(sol.values.size - 1)
        raise RankError(
            f"total scatter is rank deficient: eigenvalue[{bad}] = {smallest:.6e} "
            f"(largest = {largest:.6e}); cannot isotropize"
        )
    whitener = sol.vectors / np.sqrt(sol.values)
    return IsotropicDataset(
        data=centered @ whitener,
        labels=x.labels,
        center=x.data.mean(axis=0),
        whitener=whitener,
    )


def compute_weights(y: IsotropicDataset, alpha: float = DEFAULT_ALPHA,
                    scheme: str = "hyperbolic") -> WeightVector:
    """Row weights from squared norms of the isotropic data."""
    if alpha <= 0:
        raise ConfigError(f"weighting parameter alpha must be > 0, got {alpha}")
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown weighting scheme {scheme!r}; expected one of {SCHEMES}")
    sqnorms = np.einsum("ij,ij->i", y.data, y.data)
    if scheme == "hyperbolic":
        weights = np.sqrt(1.0 / (1.0 + sqnorms / alpha))
    else:
        weights = np.exp(-sqnorms / alpha)
    return WeightVector(weights=weights, alpha=float(alpha), scheme=scheme)


def apply_weights(y: IsotropicDataset, w: WeightVector) -> LabeledDataset:
    """Scale each row by its weight and re-center: Z0 = F diag(w) Y."""
    if w.weights.shape != (y.n,):
        raise ShapeError(
            f"weight vector has length {w.weights.shape[0]}, dataset has {y.n} rows"
        )
    weighted = apply_centering(w.weights[:, None] * y.data)
    return LabeledDataset(data=weighted, labels=y.labels)


def transform_pipeline(x: LabeledDataset, alpha: float = DEFAULT_ALPHA,
                       scheme: str = "hyperbolic") -> PipelineResult:
    """Isotropize, weight, and center in one call, returning every
    intermediate for diagnostics."""
    iso = isotropize(x)
    weights = compute_weights(iso, alpha=alpha, scheme=scheme)
    return PipelineResult(isotropic=iso, weights=weights, weighted=apply_weights(iso, weights))
