"""Self-checks: oracle equivalence across all indexes and lower-bound
dominance audits on seeded random instances. Shared by ``geostream
verify`` and the test suite."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .baselines import IfaIndex, StviiIndex
from .engine import brute_force_oracle, top_k_search
from .hiq import HiqConfig, HiqIndex
from .model import GeoTemporalImage, Query, combined_score

SCORE_TOL = 1e-9


@dataclass
class VerifyReport:
    ok: bool = True
    lines: list = field(default_factory=list)

    def record(self, name, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        self.lines.append(f"{status} {name}{suffix}")
        if not passed:
            self.ok = False


def random_images(rng, n, domain, vocab=60, t_lo=0, t_hi=100_000, id_base=0):
    images = []
    for i in range(n):
        n_words = rng.randint(1, 8)
        words = rng.sample(range(vocab), n_words)
        psi = sorted((w, rng.randint(1, 5)) for w in words)
        images.append(
            GeoTemporalImage(
                id_base + i,
                rng.uniform(domain.min_lat, domain.max_lat),
                rng.uniform(domain.min_lon, domain.max_lon),
                rng.randint(t_lo, t_hi),
                psi,
            )
        )
    return images


def random_query(rng, images, domain, vocab=60, max_words=20):
    anchor = rng.choice(images)
    l = rng.randint(1, max_words)
    words = set(rng.sample(range(vocab), min(l, vocab)))
    words.add(rng.choice(list(anchor.word_tf)))
    w1 = rng.uniform(0.05, 0.9)
    w2 = rng.uniform(0.05, 0.95 - w1)
    w3 = 1.0 - w1 - w2
    return Query(
        psi=tuple(sorted(words)),
        loc=(anchor.lat, anchor.lon),
        t=max(img.t_c for img in images) + rng.randint(0, 1000),
        k=rng.choice((1, 5, 10)),
        weights=(w1, w2, w3),
    )


def build_all(images, config):
    hiq = HiqIndex(config)
    ifa = IfaIndex(config)
    stvii = StviiIndex(config)
    for img in sorted(images, key=lambda im: im.t_c):
        hiq.insert(img)
        ifa.insert(img)
        stvii.insert(img)
    return hiq, ifa, stvii


def results_match(a, b, tol=SCORE_TOL):
    if len(a) != len(b):
        return False
    for ea, eb in zip(a, b):
        if ea.image_id != eb.image_id:
            return False
        if abs(ea.score.f_stv - eb.score.f_stv) > tol:
            return False
    return True


def check_oracle_equivalence(seed, instances, domain, max_images=500,
                             queries_per_dataset=20, capacity=8):
    """Runs (instances) random (dataset, query) pairs through HIQ, IFA,
    STVII and the oracle; returns the number of mismatches."""
    rng = random.Random(seed)
    failures = 0
    done = 0
    while done < instances:
        n = rng.randint(5, max_images)
        images = random_images(rng, n, domain)
        config = HiqConfig(
            domain=domain,
            segment_span=20_000,
            window=10,
            capacity=capacity,
            max_depth=8,
        )
        hiq, ifa, stvii = build_all(images, config)
        live = list(hiq.live_images())
        for _ in range(min(queries_per_dataset, instances - done)):
            q = random_query(rng, images, domain)
            expected = brute_force_oracle(q, live, hiq.params)
            got_hiq, _ = top_k_search(q, hiq)
            got_ifa, _ = ifa.search(q)
            got_stvii, _ = top_k_search(q, stvii)
            if not (
                results_match(got_hiq, expected)
                and results_match(got_ifa, expected)
                and results_match(got_stvii, expected)
            ):
                failures += 1
            done += 1
    return failures


def _subtree_images(index, node):
    out = []
    stack = [node]
    while stack:
        n = stack.pop()
        if index.is_leaf(n):
            if index.kind == "stvii":
                out.extend(img for _p, img in n.entries)
            else:
                out.extend(n.images)
        else:
            stack.extend(index.children(n))
    return out


def _all_nodes(index):
    out = []
    stack = list(index.roots())
    while stack:
        n = stack.pop()
        out.append(n)
        if not index.is_leaf(n):
            stack.extend(index.children(n))
    return out


def check_dominance(seed, pairs, domain, tol=1e-9):
    """For random (index, query) pairs, asserts mind(q, N) lower-bounds
    the combined score of every image under N, for every node. Returns
    the number of violations."""
    rng = random.Random(seed)
    violations = 0
    done = 0
    while done < pairs:
        images = random_images(rng, rng.randint(20, 150), domain)
        config = HiqConfig(domain=domain, segment_span=20_000, window=10,
                           capacity=6, max_depth=6)
        hiq, _, stvii = build_all(images, config)
        for _ in range(min(10, pairs - done)):
            q = random_query(rng, images, domain)
            for index in (hiq, stvii):
                for node in _all_nodes(index):
                    subtree = _subtree_images(index, node)
                    if not subtree:
                        continue
                    bound = index.mind(q, node)
                    low = min(combined_score(q, img, index.params).f_stv
                              for img in subtree)
                    if bound > low + tol:
                        violations += 1
            done += 1
    return violations


def run_verification(seed=0, instances=50, domain=None):
    from .model import SpatialDomain

    if domain is None:
        domain = SpatialDomain(0.0, 100.0, 0.0, 100.0)
    report = VerifyReport()
    mismatches = check_oracle_equivalence(seed, instances, domain, max_images=200)
    report.record(
        "oracle-equivalence", mismatches == 0,
        f"{instances} instances, {mismatches} mismatches",
    )
    violations = check_dominance(seed + 1, max(10, instances // 2), domain)
    report.record(
        "bound-dominance", violations == 0,
        f"{max(10, instances // 2)} pairs, {violations} violations",
    )
    return report
