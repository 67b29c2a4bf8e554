"""Evaluation metrics: pluggable raster features, Fréchet distance on
fitted Gaussians, and the Uniqueness / Novelty percentages under a 0.98
feature-cosine threshold.

The default feature extractor is a raster downsample (16x16 area mean,
mean-intensity centering, L2 normalization); any learned encoder can be
injected through the same interface without touching the metric code.
Cosine-based metrics use the normalized vectors; the Fréchet distance
is computed on the unnormalized (centered) features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import RasterImage

COSINE_TAU = 0.98


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray  # raw (centered) features
    normalized: np.ndarray  # unit-norm variant for cosine metrics

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise MetricError("feature vector contains non-finite values")


class DownsampleExtractor:
    """Area-average the raster to side x side, flatten, subtract the
    per-corpus mean intensity, L2-normalize.

    An all-background image centers to the zero vector; its normalized
    form falls back to the unit vector along the first axis.
    """

    def __init__(self, side: int = 16, corpus_mean: float = 1.0):
        self.side = side
        self.corpus_mean = corpus_mean

    @property
    def extractor_id(self) -> str:
        return f"downsample-{self.side}x{self.side}-mean{self.corpus_mean:g}"

    def __call__(self, image: RasterImage) -> FeatureVector:
        res, side = image.resolution, self.side
        if res % side == 0:
            block = res // side
            pooled = image.pixels.reshape(side, block, side, block).mean(axis=(1, 3))
        else:
            # area-average via index binning for non-divisible resolutions
            idx = (np.arange(res) * side) // res
            pooled = np.zeros((side, side))
            counts = np.zeros((side, side))
            np.add.at(pooled, (idx[:, None], idx[None, :]), image.pixels)
            np.add.at(counts, (idx[:, None], idx[None, :]), 1.0)
            pooled /= counts
        raw = pooled.reshape(-1).astype(np.float64) - self.corpus_mean
        norm = float(np.linalg.norm(raw))
        if norm < 1e-12:
            unit = np.zeros_like(raw)
            unit[0] = 1.0
        else:
            unit = raw / norm
        return FeatureVector(values=raw, normalized=unit)


def corpus_mean_intensity(images) -> float:
    vals = [float(img.pixels.mean()) for img in images]
    if not vals:
        raise MetricError("cannot compute a mean over an empty corpus")
    return float(np.mean(vals))


def extract_features(image: RasterImage, extractor=None) -> FeatureVector:
    return (extractor or DownsampleExtractor())(image)


def _feature_matrix(features, normalized: bool) -> np.ndarray:
    if len(features) == 0:
        raise MetricError("empty feature set")
    rows = [f.normalized if normalized else f.values for f in features]
    return np.stack(rows).astype(np.float64)


def frechet_distance(set_a, set_b, shrinkage: float = 1e-6) -> float:
    """Fréchet distance between Gaussians fitted to two feature sets.

    ||mu_a - mu_b||^2 + Tr(Sa + Sb - 2 (Sa Sb)^{1/2}), with the matrix
    square root taken on the symmetrized product Sa^{1/2} Sb Sa^{1/2} via
    eigendecomposition; negative eigenvalues clamp to zero. Covariances
    get `shrinkage`-scaled identity added (small sets are rank-deficient).
    """
    a = _feature_matrix(set_a, normalized=False)
    b = _feature_matrix(set_b, normalized=False)
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise MetricError("each set needs at least 2 samples to fit a covariance")
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    sa = np.cov(a, rowvar=False) + shrinkage * np.eye(a.shape[1])
    sb = np.cov(b, rowvar=False) + shrinkage * np.eye(b.shape[1])

    wa, va = np.linalg.eigh(sa)
    wa = np.clip(wa, 0.0, None)
    sa_half = (va * np.sqrt(wa)) @ va.T
    inner = sa_half @ sb @ sa_half
    wi = np.linalg.eigvalsh((inner + inner.T) / 2.0)
    wi = np.clip(wi, 0.0, None)
    tr_sqrt = float(np.sqrt(wi).sum())
    diff = mu_a - mu_b
    fid = float(diff @ diff + np.trace(sa) + np.trace(sb) - 2.0 * tr_sqrt)
    if not np.isfinite(fid):
        raise MetricError(
            f"non-finite Fréchet distance (cond a={np.linalg.cond(sa):.3g}, "
            f"b={np.linalg.cond(sb):.3g})"
        )
    return fid


def _cosine_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y.T


def uniqueness(generated, tau: float = COSINE_TAU) -> float:
    """Percentage of generated samples whose cosine similarity to every
    other generated sample stays below tau."""
    x = _feature_matrix(generated, normalized=True)
    n = x.shape[0]
    if n < 2:
        raise MetricError("uniqueness needs at least 2 samples")
    sims = _cosine_matrix(x, x)
    np.fill_diagonal(sims, -np.inf)
    unique = (sims.max(axis=1) < tau).sum()
    return 100.0 * float(unique) / n


def novelty(generated, training, tau: float = COSINE_TAU) -> float:
    """Percentage of generated samples absent from the training set
    (max cosine similarity below tau)."""
    x = _feature_matrix(generated, normalized=True)
    t = _feature_matrix(training, normalized=True)
    sims = _cosine_matrix(x, t)
    novel = (sims.max(axis=1) < tau).sum()
    return 100.0 * float(novel) / x.shape[0]


class NearestCentroidClassifier:
    """Label proxy for text-icon alignment on labeled corpora: assign the
    label of the nearest (cosine) per-label feature centroid."""

    def __init__(self, labels, features):
        by_label: dict[str, list] = {}
        for lab, feat in zip(labels, features):
            by_label.setdefault(lab, []).append(feat.normalized)
        self.labels = sorted(by_label)
        cents = []
        for lab in self.labels:
            c = np.mean(by_label[lab], axis=0)
            n = np.linalg.norm(c)
            cents.append(c / n if n > 0 else c)
        self.centroids = np.stack(cents)

    def classify(self, feature: FeatureVector) -> str:
        sims = self.centroids @ feature.normalized
        return self.labels[int(np.argmax(sims))]

    def accuracy(self, labels, features) -> float:
        hits = sum(1 for lab, f in zip(labels, features) if self.classify(f) == lab)
        return hits / max(1, len(labels))
