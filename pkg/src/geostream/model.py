"""Domain types and the scoring functions shared by every index.

All scores are costs in [0, 1]; smaller means better. The combined score
is a weighted sum of spatial proximity, visual relevance and temporal
recency. Scoring is pure: identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import kernels


class ConfigError(ValueError):
    """A parameter or weight triple violates its invariant."""


class DomainError(ValueError):
    """A location falls outside the configured spatial domain."""


class InvalidStateError(RuntimeError):
    """Scoring attempted against an empty image or an empty corpus."""


@dataclass(frozen=True)
class SpatialDomain:
    min_lat: float
    max_lat: float
    min_lon: float
    max_lon: float
    delta_max: float = field(init=False)

    def __post_init__(self):
        if not (self.max_lat > self.min_lat and self.max_lon > self.min_lon):
            raise ConfigError("spatial domain must have positive extent on both axes")
        object.__setattr__(
            self,
            "delta_max",
            math.sqrt(
                (self.max_lat - self.min_lat) ** 2
                + (self.max_lon - self.min_lon) ** 2
            ),
        )

    def contains(self, lat, lon):
        return (
            self.min_lat <= lat <= self.max_lat
            and self.min_lon <= lon <= self.max_lon
        )


class GeoTemporalImage:
    """An image record: id, location, creation time and sparse word vector.

    ``psi`` is a tuple of (word_id, tf) pairs, strictly ascending by word
    id. ``total_tf`` (the sum of tf counts) is the |I.psi| used as the
    frequency denominator.
    """

    __slots__ = ("id", "lat", "lon", "t_c", "psi", "word_tf", "total_tf")

    def __init__(self, id, lat, lon, t_c, psi):
        psi = tuple((int(w), int(tf)) for w, tf in psi)
        if not psi:
            raise ValueError(f"image {id}: empty visual word vector")
        prev = -1
        total = 0
        for w, tf in psi:
            if w <= prev:
                raise ValueError(f"image {id}: words not strictly ascending")
            if tf <= 0 or w < 0:
                raise ValueError(f"image {id}: invalid posting ({w}, {tf})")
            prev = w
            total += tf
        self.id = int(id)
        self.lat = float(lat)
        self.lon = float(lon)
        self.t_c = int(t_c)
        self.psi = psi
        self.word_tf = dict(psi)
        self.total_tf = total

    @property
    def loc(self):
        return (self.lat, self.lon)

    def __eq__(self, other):
        return (
            isinstance(other, GeoTemporalImage)
            and self.id == other.id
            and self.lat == other.lat
            and self.lon == other.lon
            and self.t_c == other.t_c
            and self.psi == other.psi
        )

    def __hash__(self):
        return hash(self.id)

    def __repr__(self):
        return f"GeoTemporalImage(id={self.id}, loc=({self.lat}, {self.lon}), t_c={self.t_c}, |psi|={self.total_tf})"


@dataclass(frozen=True)
class Query:
    psi: tuple          # sorted distinct word ids
    loc: tuple          # (lat, lon)
    t: int
    k: int
    weights: tuple      # (w1, w2, w3) for spatial, visual, temporal

    def __post_init__(self):
        psi = tuple(sorted(set(int(w) for w in self.psi)))
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "loc", (float(self.loc[0]), float(self.loc[1])))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "t", int(self.t))
        object.__setattr__(self, "k", int(self.k))
        if not psi:
            raise ConfigError("query needs at least one visual word")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if len(self.weights) != 3:
            raise ConfigError("exactly three weights required")
        if any(w <= 0.0 for w in self.weights):
            raise ConfigError("each weight must be > 0")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ConfigError("weights must sum to 1 (within 1e-12)")


class CorpusStats:
    """Term statistics over the live (non-expired) image set.

    Tracks the corpus term frequency per word, the total term count, and
    the maximum per-image frequency ratio per word (a multiset, so whole
    images can be removed on expiry and the max stays exact).
    """

    def __init__(self):
        self.total_word_count = 0
        self.word_corpus_tf = {}
        self._freq_counts = {}   # word -> {tf/total_tf: multiplicity}
        self._max_freq = {}      # word -> current max of the above keys

    def add_image(self, img):
        self.total_word_count += img.total_tf
        total = img.total_tf
        ctf = self.word_corpus_tf
        for word, tf in img.psi:
            ctf[word] = ctf.get(word, 0) + tf
            f = tf / total
            counts = self._freq_counts.setdefault(word, {})
            counts[f] = counts.get(f, 0) + 1
            if f > self._max_freq.get(word, 0.0):
                self._max_freq[word] = f

    def remove_image(self, img):
        self.total_word_count -= img.total_tf
        total = img.total_tf
        for word, tf in img.psi:
            left = self.word_corpus_tf[word] - tf
            if left:
                self.word_corpus_tf[word] = left
            else:
                del self.word_corpus_tf[word]
            f = tf / total
            counts = self._freq_counts[word]
            n = counts[f] - 1
            if n:
                counts[f] = n
            else:
                del counts[f]
                if not counts:
                    del self._freq_counts[word]
                    del self._max_freq[word]
                elif f == self._max_freq[word]:
                    self._max_freq[word] = max(counts)

    def corpus_tf(self, word):
        return self.word_corpus_tf.get(word, 0)

    def max_freq(self, word):
        return self._max_freq.get(word, 0.0)

    def smoothing_floor(self, word, xi):
        # weight of a word for an image that does not contain it
        if self.total_word_count == 0:
            return 0.0
        return xi * (self.word_corpus_tf.get(word, 0) / self.total_word_count)

    def max_weight(self, word, xi):
        # max over live images of w_{word,I}; the floor alone when the
        # word occurs in no live image
        return (1.0 - xi) * self._max_freq.get(word, 0.0) + self.smoothing_floor(word, xi)


@dataclass
class ScoreParams:
    domain: SpatialDomain
    stats: CorpusStats
    xi: float = 0.5
    decay_base: float = 2.0
    time_unit: float = 3600.0

    def __post_init__(self):
        if not 0.0 <= self.xi < 1.0:
            raise ConfigError("xi must be in [0, 1)")
        if self.decay_base <= 1.0:
            raise ConfigError("decay base must be > 1")
        if self.time_unit <= 0.0:
            raise ConfigError("time unit must be positive")


@dataclass(frozen=True)
class ScoreBreakdown:
    f_s: float
    f_v: float
    f_t: float
    f_stv: float


def spatial_proximity(q, loc, domain):
    """Euclidean distance between query and point, normalized by the
    domain diagonal."""
    if not domain.contains(q.loc[0], q.loc[1]):
        raise DomainError(f"query location {q.loc} outside domain")
    if not domain.contains(loc[0], loc[1]):
        raise DomainError(f"location {loc} outside domain")
    return kernels.spatial_cost(q.loc[0], q.loc[1], loc[0], loc[1], domain.delta_max)


def visual_weight(word, img, params):
    """Smoothed per-word weight: (1-xi)*tf/|I.psi| + xi*ctf/|corpus|."""
    stats = params.stats
    if img.total_tf == 0:
        raise InvalidStateError("image with empty word vector")
    if stats.total_word_count == 0:
        raise InvalidStateError("empty corpus")
    return kernels.visual_weight(
        img.word_tf.get(word, 0),
        img.total_tf,
        stats.corpus_tf(word),
        stats.total_word_count,
        params.xi,
    )


def _query_weights(q, img, params):
    stats = params.stats
    xi = params.xi
    total = img.total_tf
    ctf = stats.word_corpus_tf
    corpus_total = stats.total_word_count
    word_tf = img.word_tf
    weights = []
    maxima = []
    for v in q.psi:
        weights.append(
            kernels.visual_weight(word_tf.get(v, 0), total, ctf.get(v, 0), corpus_total, xi)
        )
        maxima.append(stats.max_weight(v, xi))
    return weights, maxima


def visual_relevance(q, img, params):
    """1 - (product of query-word weights) / gamma_max, clamped to [0, 1].

    gamma_max is the product over query words of the live corpus-wide
    maximum weight, so the best-matching image scores 0.
    """
    if params.stats.total_word_count == 0:
        raise InvalidStateError("empty corpus")
    weights, maxima = _query_weights(q, img, params)
    return kernels.relevance_cost(weights, maxima)


def temporal_recency(q, t_c, params):
    """1 - D^(-age/time_unit); fresh images cost less, age clamps at 0."""
    return kernels.recency_cost(q.t - t_c, params.decay_base, params.time_unit)


def combined_score(q, img, params):
    """Full breakdown; the caller enforces the >= 1 common word filter."""
    f_s = spatial_proximity(q, (img.lat, img.lon), params.domain)
    f_v = visual_relevance(q, img, params)
    f_t = temporal_recency(q, img.t_c, params)
    w1, w2, w3 = q.weights
    return ScoreBreakdown(f_s, f_v, f_t, kernels.combine(w1, w2, w3, f_s, f_v, f_t))


def mind_visual(q, node_max_freq, params):
    """Lower bound on visual relevance for any image under a node whose
    per-word max frequency ratios are ``node_max_freq``."""
    stats = params.stats
    xi = params.xi
    weights = []
    maxima = []
    for v in q.psi:
        floor = stats.smoothing_floor(v, xi)
        weights.append((1.0 - xi) * node_max_freq.get(v, 0.0) + floor)
        maxima.append(stats.max_weight(v, xi))
    return kernels.relevance_cost(weights, maxima)
