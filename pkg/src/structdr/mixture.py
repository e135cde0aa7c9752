"""Gaussian mixtures with equal mixing factors: specification, stratified
sampling, population moments, and a seeded separation/dispersion family for
simulation sweeps.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DefinitenessError
from .linalg import cluster_counts, symmetrize

MIN_ROWS_PER_DIM = 10
COVARIANCE_CONDITION_CAP = 10.0


@dataclass(frozen=True)
class MixtureSpec:
    """k-component Gaussian mixture with mixing factors fixed at 1/k.

    means: (k, d) component means; covariances: (k, d, d) SPD matrices.
    Requires d > k - 1 so there is room to reduce dimension.
    """

    means: np.ndarray
    covariances: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        covs = np.asarray(self.covariances, dtype=float)
        if means.ndim != 2:
            raise ConfigError(f"means must be (k, d), got shape {means.shape}")
        k, d = means.shape
        if covs.shape != (k, d, d):
            raise ConfigError(
                f"covariances must be ({k}, {d}, {d}), got shape {covs.shape}"
            )
        if d <= k - 1:
            raise ConfigError(f"need dimension d > k - 1, got d = {d}, k = {k}")
        for l, cov in enumerate(covs):
            if np.abs(cov - cov.T).max() > 1e-10 * max(1.0, np.abs(cov).max()):
                raise ConfigError(f"covariance {l} is not symmetric")
            try:
                np.linalg.cholesky(cov)
            except np.linalg.LinAlgError:
                raise DefinitenessError(
                    f"covariance {l} is not positive definite (Cholesky failed)"
                ) from None
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covariances", covs)

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]

    @property
    def mixing(self) -> np.ndarray:
        return np.full(self.k, 1.0 / self.k)

    def to_json(self) -> str:
        return json.dumps(
            {
                "means": self.means.tolist(),
                "covariances": self.covariances.tolist(),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "MixtureSpec":
        try:
            obj = json.loads(text)
            means = obj["means"]
            covariances = obj["covariances"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ConfigError(f"malformed mixture spec document: {exc}") from exc
        return cls(means=np.asarray(means, float), covariances=np.asarray(covariances, float))


@dataclass
class LabeledDataset:
    """n x d observations with per-row cluster labels in 1..k."""

    data: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.data.ndim != 2:
            raise ConfigError(f"data must be 2-D, got shape {self.data.shape}")
        if self.labels.shape != (self.data.shape[0],):
            raise ConfigError(
                f"labels shape {self.labels.shape} does not match {self.data.shape[0]} rows"
            )
        cluster_counts(self.labels)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    @property
    def k(self) -> int:
        return int(self.labels.max())

    @property
    def per_cluster_n(self) -> np.ndarray:
        return cluster_counts(self.labels, self.k)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{j + 1}" for j in range(self.d)] + ["label"])
            for row, label in zip(self.data, self.labels):
                writer.writerow([repr(float(v)) for v in row] + [int(label)])

    @classmethod
    def from_csv(cls, path) -> "LabeledDataset":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[-1] != "label":
                raise ConfigError(f"{path}: expected header x1,...,xd,label")
            d = len(header) - 1
            data, labels = [], []
            for row in reader:
                if not row:
                    continue
                if len(row) != d + 1:
                    raise ConfigError(f"{path}: row has {len(row)} fields, expected {d + 1}")
                data.append([float(v) for v in row[:d]])
                labels.append(int(row[d]))
        return cls(data=np.asarray(data), labels=np.asarray(labels))


@dataclass(frozen=True)
class MixtureMoments:
    """Population grand mean and the within/between covariance split."""

    grand_mean: np.ndarray
    within: np.ndarray
    between: np.ndarray

    @property
    def grand_cov(self) -> np.ndarray:
        return self.within + self.between


def sample(spec: MixtureSpec, n_per_cluster: int, seed) -> LabeledDataset:
    """Draw exactly n_per_cluster rows from each component.

    Stratified (exact-count) sampling keeps cluster sizes balanced in every
    finite sample. Rows for component l are mu_l + z @ chol(Sigma_l)^T with
    z i.i.d. standard normal from a PCG64 stream, so output is bit
    reproducible for a fixed seed.
    """
    if n_per_cluster < 1:
        raise ConfigError(f"n_per_cluster must be >= 1, got {n_per_cluster}")
    n = n_per_cluster * spec.k
    if n < MIN_ROWS_PER_DIM * spec.d:
        raise ConfigError(
            f"sample too small: n = {n} but need n >= {MIN_ROWS_PER_DIM}*d = "
            f"{MIN_ROWS_PER_DIM * spec.d} for d = {spec.d}"
        )
    rng = np.random.default_rng(seed)
    blocks = []
    for mean, cov in zip(spec.means, spec.covariances):
        factor = np.linalg.cholesky(cov)
        z = rng.standard_normal((n_per_cluster, spec.d))
        blocks.append(mean + z @ factor.T)
    labels = np.repeat(np.arange(1, spec.k + 1), n_per_cluster)
    return LabeledDataset(data=np.vstack(blocks), labels=labels)


def population_moments(spec: MixtureSpec) -> MixtureMoments:
    """Exact mixture moments: grand mean is the average of component means;
    the covariance splits into the average component covariance (within)
    plus the scatter of the means (between)."""
    grand_mean = spec.means.mean(axis=0)
    within = spec.covariances.mean(axis=0)
    offsets = spec.means - grand_mean
    between = (offsets.T @ offsets) / spec.k
    return MixtureMoments(
        grand_mean=grand_mean,
        within=symmetrize(within),
        between=symmetrize(between),
    )


def _simplex_vertices(k: int) -> np.ndarray:
    """k points in R^{k-1} with unit pairwise distances, centered at 0.

    Rows of an orthonormal basis of the sum-zero subspace (Helmert
    construction) have pairwise distance sqrt(2) and zero column sums.
    """
    basis = np.zeros((k, k - 1))
    for j in range(1, k):
        basis[:j, j - 1] = 1.0
        basis[j, j - 1] = -j
        basis[:, j - 1] /= np.sqrt(j * (j + 1))
    return basis / np.sqrt(2.0)


def _random_orthogonal(rng, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_spd(rng, d: int, condition_cap: float = COVARIANCE_CONDITION_CAP) -> np.ndarray:
    """Random SPD matrix Q diag(D) Q^T with log-uniform spectrum whose
    condition number is at most condition_cap."""
    half = np.log(condition_cap) / 2.0
    diag = np.exp(rng.uniform(-half, half, size=d))
    q = _random_orthogonal(rng, d)
    return symmetrize((q * diag) @ q.T)


def make_separation_family(d: int, k: int, separation: float, dispersion: float, seed) -> MixtureSpec:
    """Seeded mixture family with tunable cluster geometry.

    Means sit at the vertices of a regular simplex with pairwise distance
    exactly `separation`, embedded in a random (k-1)-dimensional frame;
    covariances are dispersion^2 times random SPD matrices with condition
    number <= 10. For a fixed seed the frame and covariances do not depend
    on `separation`, so the family is monotone: doubling `separation`
    doubles every pairwise mean distance.
    """
    if d <= k - 1:
        raise ConfigError(f"need d > k - 1, got d = {d}, k = {k}")
    if separation < 0:
        raise ConfigError(f"separation must be >= 0, got {separation}")
    if dispersion <= 0:
        raise ConfigError(f"dispersion must be > 0, got {dispersion}")
    rng = np.random.default_rng(seed)
    frame = _random_orthogonal(rng, d)[:, : k - 1]
    means = separation * (_simplex_vertices(k) @ frame.T)
    covariances = np.stack([dispersion**2 * random_spd(rng, d) for _ in range(k)])
    return MixtureSpec(means=means, covariances=covariances)
