"""Characters and maximal partial sums on ``Z_M`` and ``Z_p^*``.

Every maximal quantity here has the form

    max over l of | sum_{n <= l} c_n * phase(x, n) |

for a family of evaluation points ``x``.  For the additive group the phase is
``e(k_n x / M)``; for the multiplicative group ``Z_p^*`` the character with
index ``a`` is ``chi_a(n) = e(a nu(n) / (p - 1))``, which is the same shape
with ``k_n = nu(n)`` and ``M = p - 1``.  Both go through the sweeps in
:mod:`charmax.kernels`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .numtheory import GroupContext, SubgroupContext


def e(t):
    """``exp(2 pi i t)`` with ``t`` reduced mod 1 first."""
    return np.exp(2j * np.pi * np.mod(t, 1.0))


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Complex coefficients at strictly increasing positive indices."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.array(self.indices, dtype=np.int64).reshape(-1)
        val = np.array(self.values, dtype=np.complex128).reshape(-1)
        if idx.shape != val.shape:
            raise ValueError("indices and values differ in length")
        if idx.size and (idx[0] < 1 or np.any(np.diff(idx) <= 0)):
            raise ValueError("indices must be positive and strictly increasing")
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_dense(cls, values, start: int = 1) -> CoefficientVector:
        values = np.asarray(values, dtype=np.complex128)
        return cls(np.arange(start, start + values.size), values)

    @classmethod
    def from_mapping(cls, mapping) -> CoefficientVector:
        keys = sorted(mapping)
        return cls(np.array(keys, dtype=np.int64), np.array([mapping[k] for k in keys]))

    def __len__(self) -> int:
        return int(self.indices.size)

    @cached_property
    def norm2(self) -> float:
        return float(np.sqrt(np.sum(self.values.real**2 + self.values.imag**2)))

    @property
    def support(self) -> np.ndarray:
        return self.indices[self.values != 0]

    def nonzero(self) -> CoefficientVector:
        keep = self.values != 0
        return CoefficientVector(self.indices[keep], self.values[keep])

    def scaled(self, c) -> CoefficientVector:
        return CoefficientVector(self.indices, self.values * c)

    def normalized(self) -> CoefficientVector:
        if self.norm2 == 0:
            raise ValueError("cannot normalize the zero vector")
        return self.scaled(1.0 / self.norm2)

    def to_json(self) -> dict:
        return {
            "indices": [int(i) for i in self.indices],
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_json(cls, obj) -> CoefficientVector:
        return cls(obj["indices"], [complex(re, im) for re, im in obj["values"]])


@dataclass(frozen=True, eq=False)
class MaximalReport:
    """Per-point maxima of partial sums and their L2 average.

    ``argmax[i]`` is the cutoff: the coefficient index of the last term in
    the smallest prefix that attains ``maxima[i]``.
    """

    points: np.ndarray
    maxima: np.ndarray
    argmax: np.ndarray
    l2_average: float
    ratio: float

    @property
    def point_maxima(self) -> list[tuple]:
        return list(zip(self.points.tolist(), self.maxima.tolist(), self.argmax.tolist()))

    @property
    def mean_square(self) -> float:
        return float(np.mean(self.maxima**2))

    def to_json(self) -> dict:
        return {
            "points": [
                {"x": x, "max": m, "argmax": a}
                for x, m, a in zip(self.points.tolist(), self.maxima.tolist(), self.argmax.tolist())
            ],
            "l2_average": self.l2_average,
            "ratio": self.ratio,
        }


def _report(points, maxima, argpos, coef: CoefficientVector) -> MaximalReport:
    l2 = float(np.sqrt(np.mean(maxima**2))) if maxima.size else 0.0
    norm = coef.norm2
    ratio = l2 / norm if norm > 0 else float("nan")
    cutoffs = coef.indices[argpos] if len(coef) else np.zeros_like(argpos)
    return MaximalReport(np.asarray(points), maxima, cutoffs, l2, ratio)


def eval_character(ctx: GroupContext, a: int, n: int) -> complex:
    """``chi_a(n) = e(a nu(n) / (p - 1))``."""
    if n % ctx.p == 0:
        raise ValueError("characters vanish off the units; n must be coprime to p")
    k = (a * ctx.log(n)) % (ctx.p - 1)
    return complex(kernels.roots_of_unity(ctx.p - 1)[k])


def character_matrix(ctx: GroupContext, indices=None) -> np.ndarray:
    """Matrix ``X[a, j] = chi_a(indices[j])`` for ``a = 0 .. p-2``."""
    m = ctx.p - 1
    indices = np.arange(1, ctx.p) if indices is None else np.asarray(indices, dtype=np.int64)
    logs = ctx.nu[indices]
    a = np.arange(m, dtype=np.int64)
    return kernels.roots_of_unity(m)[np.outer(a, logs) % m]


def phase_max_partial(b: CoefficientVector, freqs, M: int, points=None) -> MaximalReport:
    """Maximal partial sums of ``sum b_n e(freqs[n] x / M)`` for integer points ``x``.

    ``points`` defaults to ``1 .. M``.
    """
    if M < 1:
        raise ValueError("modulus must be positive")
    points = np.arange(1, M + 1) if points is None else np.asarray(points, dtype=np.int64)
    maxima, arg = kernels.max_partial_phase(b.values, freqs, points, M)
    return _report(points, maxima, arg, b)


def _check_permutation(sigma, n: int) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=np.int64)
    if sigma.shape != (n,) or not np.array_equal(np.sort(sigma), np.arange(1, n + 1)):
        raise ValueError(f"sigma is not a permutation of [1..{n}]")
    return sigma


def additive_max_partial(b: CoefficientVector, sigma, M: int) -> MaximalReport:
    """``max_l |sum_{n<=l} b_n e(sigma(n) x / M)|`` for ``x = 1 .. M``."""
    sigma = _check_permutation(sigma, len(b))
    return phase_max_partial(b, sigma, M)


def maximal_function(b: CoefficientVector, freqs, xs) -> MaximalReport:
    """Maximal partial sums of ``sum b_n e(freqs[n] x)`` at real points ``x``."""
    xs = np.asarray(xs, dtype=np.float64).reshape(-1)
    freqs = np.asarray(freqs, dtype=np.int64)
    table = e(np.outer(xs, freqs))
    maxima, arg = kernels.max_partial_table(b.values, table)
    return _report(xs, maxima, arg, b)


def _check_residues(ctx: GroupContext, a: CoefficientVector):
    if len(a) and (a.indices[0] < 1 or a.indices[-1] > ctx.p - 1):
        raise ValueError(f"coefficient indices must lie in [1, {ctx.p - 1}]")


def multiplicative_max_partial(ctx: GroupContext, a: CoefficientVector) -> MaximalReport:
    """Maximal partial character sums over all characters mod ``p``.

    Prefixes follow the natural order of the residues ``n``; evaluation
    points are the character indices ``0 .. p-2``, each weighted ``1/(p-1)``.
    """
    _check_residues(ctx, a)
    return phase_max_partial(a, ctx.nu[a.indices], ctx.p - 1, np.arange(ctx.p - 1))


def multiplicative_full_l2(ctx: GroupContext, a: CoefficientVector) -> float:
    """``(1/(p-1) sum_chi |sum_n a_n chi(n)|^2)^(1/2)``, i.e. the cutoff fixed at ``l = p-1``."""
    _check_residues(ctx, a)
    full = character_matrix(ctx, a.indices) @ a.values
    return float(np.sqrt(np.mean(np.abs(full) ** 2)))


def transport_subgroup_to_additive(sub: SubgroupContext, a: CoefficientVector) -> tuple[float, float]:
    """Both sides of the restriction of characters mod ``p`` to the subgroup ``A``.

    ``a`` is indexed by position in the natural enumeration ``g_1 < ... < g_q``
    of ``A``.  Returns the mean-square maxima of the multiplicative sweep over
    all ``p - 1`` characters and of the additive sweep over ``x = 1 .. q``
    with phases ``e(nu_A(g_n) x / q)``.
    """
    if len(a) and (a.indices[0] < 1 or a.indices[-1] > sub.q):
        raise ValueError(f"positions must lie in [1, {sub.q}]")
    residues = sub.elements[a.indices - 1]
    lifted = CoefficientVector(residues, a.values)
    lhs = multiplicative_max_partial(sub.parent, lifted).mean_square
    rhs = phase_max_partial(a, sub.nu_A[residues], sub.q).mean_square
    return lhs, rhs
