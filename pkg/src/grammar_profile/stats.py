"""Numerical routines over frequency profiles.

Cosine similarity, 2-component PCA, Shannon entropy and the Gini-Simpson
index (entropy is in nats throughout), a sentence-level permutation test
for diversity gaps, the exact Mann-Whitney U test for small samples, and
Benjamini-Hochberg FDR adjustment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CategoryMismatch,
    EmptyCorpus,
    EmptyProfile,
    EmptySample,
    ExactTooLarge,
    InvalidP,
    TooFewProfiles,
    ZeroVector,
)
from .profiles import FrequencyProfile

_TWO_SIDED_SLACK = 1e-12  # float tolerance when comparing rank statistics


@dataclass
class AlignedVectors:
    """Two relative-frequency vectors over the union of their supports."""

    identifiers: list[str]
    x: np.ndarray
    y: np.ndarray


@dataclass
class StatTestResult:
    """Outcome of one significance test."""

    key: str
    statistic: float
    p_value: float
    method: str
    p_adjusted: Optional[float] = None


@dataclass
class DiversityScore:
    shannon_H: float
    gini_simpson: float


@dataclass
class Pca2Result:
    """Top-2 principal projection of profile rows.

    ``coordinates`` has one (pc1, pc2) row per input profile;
    ``explained_variance`` holds the two leading covariance eigenvalues in
    descending order.  When the centered data has rank < 2 the second
    coordinate is all zeros and ``degenerate_rank`` is set.
    """

    coordinates: np.ndarray
    explained_variance: tuple[float, float]
    axes: np.ndarray
    degenerate_rank: bool


def _require_same_category(profiles: Sequence[FrequencyProfile]) -> None:
    first = profiles[0].category
    for profile in profiles[1:]:
        if profile.category is not first:
            raise CategoryMismatch(
                f"profiles mix categories {first.value} and {profile.category.value}"
            )


def align(a: FrequencyProfile, b: FrequencyProfile) -> AlignedVectors:
    """Align two profiles' relative frequencies over their support union."""
    _require_same_category([a, b])
    identifiers = sorted(a.support | b.support)
    fa, fb = a.rel_freq, b.rel_freq
    x = np.array([fa.get(i, 0.0) for i in identifiers], dtype=float)
    y = np.array([fb.get(i, 0.0) for i in identifiers], dtype=float)
    return AlignedVectors(identifiers, x, y)


def align_many(profiles: Sequence[FrequencyProfile]) -> tuple[list[str], np.ndarray]:
    """Relative-frequency matrix (one row per profile) over the support union."""
    _require_same_category(profiles)
    identifiers = sorted(set().union(*(p.support for p in profiles)))
    index = {ident: col for col, ident in enumerate(identifiers)}
    matrix = np.zeros((len(profiles), len(identifiers)))
    for row, profile in enumerate(profiles):
        for ident, freq in profile.rel_freq.items():
            matrix[row, index[ident]] = freq
    return identifiers, matrix


def cosine(a: FrequencyProfile, b: FrequencyProfile) -> float:
    """Cosine similarity of two relative-frequency distributions, in [0, 1]."""
    aligned = align(a, b)
    nx = np.linalg.norm(aligned.x)
    ny = np.linalg.norm(aligned.y)
    if nx == 0.0 or ny == 0.0:
        raise ZeroVector("cosine undefined for an empty distribution")
    if np.array_equal(aligned.x, aligned.y):
        return 1.0  # identical distributions, exactly
    value = float(np.dot(aligned.x, aligned.y) / (nx * ny))
    return min(max(value, 0.0), 1.0)


# --- PCA ---------------------------------------------------------------------

def _power_iteration(
    matrix: np.ndarray,
    ortho: Sequence[np.ndarray],
    max_iter: int = 20_000,
    tol: float = 1e-13,
) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of a symmetric PSD matrix, deterministically.

    The start is a fixed generic vector (basis vectors as fallbacks when a
    start collapses into the null space; note the all-ones vector is
    *always* null for a column-centered Gram matrix, so it is never used).
    ``ortho`` vectors are projected out every step to keep deflation
    stable.
    """
    n = matrix.shape[0]
    scale = float(np.abs(matrix).max()) or 1.0
    starts = [np.cos(0.37 * np.arange(n) + 0.42)] + [np.eye(n)[i] for i in range(n)]
    best = (0.0, np.zeros(n))
    for start in starts:
        v = start.astype(float)
        for u in ortho:
            v = v - np.dot(u, v) * u
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            continue
        v /= norm
        collapsed = False
        eigenvalue = 0.0
        for _ in range(max_iter):
            w = matrix @ v
            for u in ortho:
                w = w - np.dot(u, w) * u
            norm = np.linalg.norm(w)
            if norm <= scale * 1e-15:
                collapsed = True  # start was (numerically) in the null space
                break
            eigenvalue = float(np.dot(v, w))
            v_next = w / norm
            residual = np.linalg.norm(matrix @ v_next - eigenvalue * v_next)
            if residual <= tol * max(scale, abs(eigenvalue)):
                return eigenvalue, v_next
            v = v_next
        if not collapsed:
            return eigenvalue, v
        if eigenvalue > best[0]:
            best = (eigenvalue, v)
    return best


def pca2(profiles: Sequence[FrequencyProfile]) -> Pca2Result:
    """Project profiles onto their top-2 principal axes.

    Rows are aligned relative-frequency vectors, column-mean-centered and
    not variance-scaled.  The two axes come from power iteration with
    deflation on the row-space Gram matrix; each axis is oriented so its
    first nonzero loading is positive.
    """
    if len(profiles) < 3:
        raise TooFewProfiles("PCA projection needs at least 3 profiles")
    _, matrix = align_many(profiles)
    n = matrix.shape[0]
    centered = matrix - matrix.mean(axis=0)
    gram = centered @ centered.T / (n - 1)

    lam1, u1 = _power_iteration(gram, ortho=[])
    lam2, u2 = _power_iteration(gram, ortho=[u1])
    lam1 = max(lam1, 0.0)
    lam2 = min(max(lam2, 0.0), lam1)

    scale = np.linalg.norm(centered) ** 2 / max(n - 1, 1)  # total variance
    tiny = max(scale * 1e-12, 1e-30)
    coordinates = np.zeros((n, 2))
    axes = np.zeros((2, matrix.shape[1]))
    degenerate = False
    for k, (lam, u) in enumerate(((lam1, u1), (lam2, u2))):
        if lam <= tiny:
            if k == 0:
                lam1 = 0.0
            else:
                lam2 = 0.0
            degenerate = True
            continue
        axis = centered.T @ u
        axis_norm = np.linalg.norm(axis)
        if axis_norm < 1e-15:
            degenerate = True
            continue
        axis /= axis_norm
        nonzero = np.nonzero(np.abs(axis) > 1e-12)[0]
        if nonzero.size and axis[nonzero[0]] < 0:
            axis = -axis
        axes[k] = axis
        coordinates[:, k] = centered @ axis
    return Pca2Result(coordinates, (lam1, lam2), axes, degenerate)


# --- diversity ---------------------------------------------------------------

def shannon(profile: FrequencyProfile) -> float:
    """Shannon entropy H = -sum p_i ln p_i, in nats."""
    if profile.total == 0:
        raise EmptyProfile(f"profile {profile.corpus_id!r} has no occurrences")
    return -math.fsum(p * math.log(p) for p in profile.rel_freq.values() if p > 0)


def gini_simpson(profile: FrequencyProfile) -> float:
    """Gini-Simpson index 1 - sum p_i^2: the chance two draws differ in type."""
    if profile.total == 0:
        raise EmptyProfile(f"profile {profile.corpus_id!r} has no occurrences")
    return 1.0 - math.fsum(p * p for p in profile.rel_freq.values())


def diversity(profile: FrequencyProfile) -> DiversityScore:
    return DiversityScore(shannon(profile), gini_simpson(profile))


# --- permutation test ---------------------------------------------------------

PERMUTATION_STATISTICS = ("shannon_diff", "gini_diff")


def _count_matrix(sentences: Sequence[Sequence[str]], index: dict[str, int]) -> np.ndarray:
    matrix = np.zeros((len(sentences), len(index)), dtype=np.float32)
    for row, labels in enumerate(sentences):
        for label in labels:
            matrix[row, index[label]] += 1.0
    return matrix


def _row_entropy(counts: np.ndarray) -> np.ndarray:
    totals = counts.sum(axis=1, keepdims=True)
    safe = np.maximum(totals, 1.0)
    p = counts / safe
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log(p), 0.0)
    h = -terms.sum(axis=1)
    return np.where(totals[:, 0] > 0, h, 0.0)


def _row_gini(counts: np.ndarray) -> np.ndarray:
    totals = counts.sum(axis=1, keepdims=True)
    safe = np.maximum(totals, 1.0)
    p = counts / safe
    g = 1.0 - (p * p).sum(axis=1)
    return np.where(totals[:, 0] > 0, g, 0.0)


def permutation_test(
    sentences_a: Sequence[Sequence[str]],
    sentences_b: Sequence[Sequence[str]],
    statistic: str = "shannon_diff",
    resamples: int = 10_000,
    seed: int = 0,
) -> StatTestResult:
    """Two-sided sentence-permutation test for a diversity gap.

    The observed statistic is stat(a) - stat(b) computed on the two
    occurrence distributions.  The null distribution reassigns whole
    sentences to two groups of the original sizes (the sentence, not the
    occurrence, is the exchangeable unit) and recomputes the statistic;
    p = (#{|null| >= |observed|} + 1) / (resamples + 1).
    """
    if statistic not in PERMUTATION_STATISTICS:
        raise ValueError(f"statistic must be one of {PERMUTATION_STATISTICS}")
    if resamples < 1:
        raise ValueError("resamples must be at least 1")
    if not sentences_a or not sentences_b:
        raise EmptyCorpus("both corpora must contain sentences")

    vocabulary = sorted({label for sent in sentences_a for label in sent}
                        | {label for sent in sentences_b for label in sent})
    index = {label: i for i, label in enumerate(vocabulary)}
    matrix = np.vstack([
        _count_matrix(sentences_a, index),
        _count_matrix(sentences_b, index),
    ])
    n_a = len(sentences_a)
    n = matrix.shape[0]
    row_stat = _row_entropy if statistic == "shannon_diff" else _row_gini

    totals = matrix.sum(axis=0, dtype=np.float64)
    counts_a = matrix[:n_a].sum(axis=0, dtype=np.float64)
    observed = float(
        row_stat(counts_a[None, :])[0] - row_stat((totals - counts_a)[None, :])[0]
    )

    rng = np.random.default_rng(seed)
    extreme = 0
    chunk = max(1, min(resamples, 4_000_000 // max(n, 1)))
    remaining = resamples
    base = np.arange(n)
    while remaining > 0:
        block = min(chunk, remaining)
        remaining -= block
        perms = rng.permuted(np.tile(base, (block, 1)), axis=1)
        masks = np.zeros((block, n), dtype=np.float32)
        np.put_along_axis(masks, perms[:, :n_a], 1.0, axis=1)
        null_a = (masks @ matrix).astype(np.float64)
        null_b = totals[None, :] - null_a
        diffs = row_stat(null_a) - row_stat(null_b)
        extreme += int(np.sum(np.abs(diffs) >= abs(observed) - _TWO_SIDED_SLACK))
    p = (extreme + 1) / (resamples + 1)
    return StatTestResult(
        key=statistic,
        statistic=observed,
        p_value=p,
        method=f"permutation[{resamples}]",
    )


# --- Mann-Whitney --------------------------------------------------------------

EXACT_POOL_LIMIT = 12


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def mann_whitney(
    xs: Sequence[float],
    ys: Sequence[float],
    mode: str = "exact",
    seed: int = 0,
    resamples: int = 10_000,
    key: str = "",
) -> StatTestResult:
    """Two-sided Mann-Whitney U test with mid-rank tie handling.

    The statistic is U for the first sample.  ``exact`` mode enumerates
    every C(n1+n2, n1) group assignment of the pooled values and is
    limited to pools of 12 observations; ``mc`` mode estimates the same
    permutation p-value by Monte Carlo with ``resamples`` draws.
    """
    n1, n2 = len(xs), len(ys)
    if n1 == 0 or n2 == 0:
        raise EmptySample("both samples must be non-empty")
    pooled = list(xs) + list(ys)
    ranks = _midranks(pooled)
    offset = n1 * (n1 + 1) / 2
    u_obs = sum(ranks[:n1]) - offset
    mu = n1 * n2 / 2
    distance = abs(u_obs - mu)

    if mode == "exact":
        if n1 + n2 > EXACT_POOL_LIMIT:
            raise ExactTooLarge(
                f"exact enumeration limited to {EXACT_POOL_LIMIT} pooled observations"
            )
        total = 0
        extreme = 0
        for chosen in combinations(range(n1 + n2), n1):
            total += 1
            u = sum(ranks[i] for i in chosen) - offset
            if abs(u - mu) >= distance - _TWO_SIDED_SLACK:
                extreme += 1
        p = extreme / total
        method = "mwu-exact"
    elif mode == "mc":
        if resamples < 1:
            raise ValueError("resamples must be at least 1")
        rng = np.random.default_rng(seed)
        rank_arr = np.asarray(ranks)
        extreme = 0
        chunk = max(1, min(resamples, 2_000_000 // max(n1 + n2, 1)))
        remaining = resamples
        while remaining > 0:
            block = min(chunk, remaining)
            remaining -= block
            perms = rng.permuted(
                np.tile(np.arange(n1 + n2), (block, 1)), axis=1
            )
            u_null = rank_arr[perms[:, :n1]].sum(axis=1) - offset
            extreme += int(np.sum(np.abs(u_null - mu) >= distance - _TWO_SIDED_SLACK))
        p = (extreme + 1) / (resamples + 1)
        method = f"mwu-mc[{resamples}]"
    else:
        raise ValueError("mode must be 'exact' or 'mc'")
    return StatTestResult(key=key, statistic=float(u_obs), p_value=float(p), method=method)


# --- FDR ------------------------------------------------------------------------

def bh_fdr(
    pvalues: Sequence[tuple[str, float]],
    m: Optional[int] = None,
) -> list[tuple[str, float, float]]:
    """Benjamini-Hochberg step-up adjustment.

    ``m`` is the number of comparisons performed, defaulting to the list
    length; pass a larger ``m`` when only a subset of the p-values (for
    example, those under some reporting threshold) is supplied.  Output
    preserves the input order and appends the adjusted p-value.
    """
    for _key, p in pvalues:
        if not (0.0 <= p <= 1.0) or math.isnan(p):
            raise InvalidP(f"p-value {p!r} outside [0, 1]")
    k = len(pvalues)
    if k == 0:
        return []
    if m is None:
        m = k
    if m < k:
        raise InvalidP(f"m={m} is smaller than the {k} p-values supplied")
    order = sorted(range(k), key=lambda i: pvalues[i][1])
    adjusted_sorted = [m * pvalues[order[i]][1] / (i + 1) for i in range(k)]
    for i in range(k - 2, -1, -1):
        adjusted_sorted[i] = min(adjusted_sorted[i], adjusted_sorted[i + 1])
    adjusted = [0.0] * k
    for rank, original in enumerate(order):
        adjusted[original] = min(adjusted_sorted[rank], 1.0)
    return [(key, p, adjusted[i]) for i, (key, p) in enumerate(pvalues)]


def apply_bh(results: Sequence[StatTestResult], m: Optional[int] = None) -> list[StatTestResult]:
    """Fill ``p_adjusted`` on a batch of test results (new objects)."""
    triples = bh_fdr([(r.key, r.p_value) for r in results], m=m)
    return [
        StatTestResult(r.key, r.statistic, r.p_value, r.method, p_adj)
        for r, (_k, _p, p_adj) in zip(results, triples)
    ]
