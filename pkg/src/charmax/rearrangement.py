"""Bad orderings of the additive system ``e(sigma(n) x / M)``.

No closed-form bad permutation is used; :func:`search_bad_permutation`
looks for one by combining random permutations, dyadic interleavings and
swap hill-climbing, optimizing coefficients for each candidate with the
alternating maximization from :mod:`charmax.delta`.

The shift helpers turn a continuous level-set statement into a count on the
discrete points ``a/M``: shifting every phase by ``sigma(n) tau`` moves the
maximal function by ``tau``, and averaging the count over ``tau`` in
``[0, 1/M)`` recovers the measure of the level set.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .chargroup import (CoefficientVector, _check_permutation, additive_max_partial, e,
                        maximal_function, phase_max_partial)
from .delta import alternating_maximization


@dataclass(frozen=True, eq=False)
class BadOrderWitness:
    N: int
    M: int
    sigma: np.ndarray
    b: CoefficientVector
    threshold: float
    level_mass: float
    score: float
    evaluations: int = 0

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "M": self.M,
            "sigma": [int(s) for s in self.sigma],
            "b": self.b.to_json(),
            "threshold": self.threshold,
            "level_mass": self.level_mass,
            "score": self.score,
            "evaluations": self.evaluations,
        }

    @classmethod
    def from_json(cls, obj) -> BadOrderWitness:
        return cls(obj["N"], obj["M"], np.array(obj["sigma"], dtype=np.int64),
                   CoefficientVector.from_json(obj["b"]), obj["threshold"],
                   obj["level_mass"], obj["score"], obj.get("evaluations", 0))


def level_threshold(N: int, c1: float) -> float:
    return c1 * math.log(N) ** 0.25 if N > 1 else 0.0


def _bitrev_order(N: int) -> list[int]:
    bits = max(1, (N - 1).bit_length())
    return sorted(range(N), key=lambda n: int(format(n, f"0{bits}b")[::-1], 2))


def dyadic_permutations(N: int) -> list[np.ndarray]:
    """Deterministic structured candidates: bit reversal, riffles, reversals."""
    ident = list(range(N))
    half = (N + 1) // 2
    riffle = []
    for i in range(half):
        riffle.append(i)
        if half + i < N:
            riffle.append(half + i)
    odd_even = ident[::2] + ident[1::2]
    bitrev = _bitrev_order(N)
    out, seen = [], set()
    for order in (bitrev, bitrev[::-1], ident[::-1], riffle, odd_even, odd_even[::-1]):
        key = tuple(order)
        if key not in seen and key != tuple(ident):
            seen.add(key)
            out.append(np.array(order, dtype=np.int64) + 1)
    return out


def _additive_table(sigma: np.ndarray, M: int) -> np.ndarray:
    xs = np.arange(1, M + 1, dtype=np.int64)
    return kernels.roots_of_unity(M)[np.outer(xs, sigma) % M]


def _optimize(sigma, M, rng, restarts, iters, warm=None):
    table = _additive_table(sigma, M)
    N = sigma.size
    starts = [] if warm is None else [warm]
    for _ in range(restarts):
        x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        starts.append(x)
    best = None
    for a0 in starts:
        res = alternating_maximization(table, a0, iters)
        if best is None or res.value > best.value:
            best = res
    return best.value, best.coeffs


def _candidates(N: int, budget: int, rng, current):
    """Permutations to try after the identity, never repeating one.

    When all ``N!`` orderings fit in the budget they are enumerated in
    lexicographic order.  Otherwise: dyadic interleavings, then a mix of
    uniformly random permutations and swaps of the current best (warm-started
    from its coefficients).  Repeats still consume budget.
    """
    if math.factorial(N) - 1 <= budget:
        for perm in itertools.islice(itertools.permutations(range(1, N + 1)), 1, None):
            yield np.array(perm, dtype=np.int64), None
        return
    seen = {tuple(range(1, N + 1))}
    structured = dyadic_permutations(N)
    for k in range(budget):
        if k < len(structured):
            sigma, warm = structured[k], None
        elif rng.random() < 0.25:
            sigma, warm = rng.permutation(N) + 1, None
        else:
            best_sigma, best_b = current()
            sigma = best_sigma.copy()
            i, j = rng.choice(N, size=2, replace=False)
            sigma[i], sigma[j] = sigma[j], sigma[i]
            warm = best_b
        key = tuple(int(v) for v in sigma)
        if key in seen:
            continue
        seen.add(key)
        yield sigma, warm


def search_bad_permutation(N: int, M: int, budget: int = 1000, seed: int = 0, *,
                           restarts: int = 2, iters: int = 20, c1: float = 0.1) -> BadOrderWitness:
    """Search for ``(sigma, b)`` with a large L2 average of the additive maximal function.

    The identity permutation is always evaluated first, so the result never
    scores below the identity's optimized score.  ``budget`` bounds the
    number of candidates examined after the identity.
    """
    if N < 1 or M < N:
        raise ValueError("need 1 <= N <= M")
    rng = np.random.default_rng(seed)
    best_sigma = np.arange(1, N + 1, dtype=np.int64)
    evaluations = 1
    if N == 1:
        best_b = np.ones(1, dtype=np.complex128)
    else:
        best_score, best_b = _optimize(best_sigma, M, rng, restarts, iters)
        for sigma, warm in _candidates(N, budget, rng, lambda: (best_sigma, best_b)):
            score, b = _optimize(sigma, M, rng, 1 if warm is not None else restarts, iters, warm)
            evaluations += 1
            if score > best_score:
                best_score, best_sigma, best_b = score, sigma, b
    b = CoefficientVector.from_dense(best_b).normalized()
    report = additive_max_partial(b, best_sigma, M)
    threshold = level_threshold(N, c1)
    mass = float(np.mean(report.maxima > threshold))
    return BadOrderWitness(N, M, best_sigma, b, threshold, mass, report.ratio, evaluations)


def shift_coefficients(b: CoefficientVector, sigma, tau: float) -> CoefficientVector:
    """Multiply ``b_n`` by ``e(sigma(n) tau)``."""
    sigma = np.asarray(sigma, dtype=np.int64)
    if tau == 0:
        return b
    return CoefficientVector(b.indices, b.values * e(sigma * tau))


def shift_counts(b: CoefficientVector, sigma, M: int, grid: int, threshold: float):
    """Counts of ``a in [1, M]`` whose shifted maximal value exceeds ``threshold``.

    Returns ``(taus, counts)`` for the uniform grid ``tau = j / (grid M)``.
    """
    if grid < 1:
        raise ValueError("grid must be positive")
    sigma = _check_permutation(sigma, len(b))
    taus = np.arange(grid) / (grid * M)
    counts = np.zeros(grid, dtype=np.int64)
    for j, tau in enumerate(taus):
        shifted = shift_coefficients(b, sigma, float(tau))
        counts[j] = int(np.sum(phase_max_partial(shifted, sigma, M).maxima > threshold))
    return taus, counts


def discretize_via_shift(b: CoefficientVector, sigma, M: int, grid: int = 64,
                         threshold: float = 0.0) -> tuple[float, int]:
    """The grid shift ``tau0`` in ``[0, 1/M)`` with the most points above ``threshold``.

    Ties keep the smallest ``tau``.
    """
    taus, counts = shift_counts(b, sigma, M, grid, threshold)
    j = int(np.argmax(counts))
    return float(taus[j]), int(counts[j])


def level_set_measure(b: CoefficientVector, sigma, threshold: float, resolution: int) -> float:
    """Fraction of ``x = j / resolution`` in ``[0, 1)`` where the maximal function exceeds ``threshold``."""
    xs = np.arange(resolution) / resolution
    return float(np.mean(maximal_function(b, sigma, xs).maxima > threshold))
