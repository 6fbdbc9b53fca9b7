"""Equidistribution of subgroup power orbits.

For the order-``q`` subgroup ``A = {g_1 < ... < g_q}`` of ``Z_p^*`` the point
``y_i = ({g_i/p}, {g_i^2/p}, ..., {g_i^s/p})`` lies in ``[0, 1)^s``.  If every
one of the ``(3s)^s`` grid boxes holds some ``y_i``, then for each ordering
``sigma`` of ``[s]`` some ``g`` in ``A`` has its powers ``g^sigma(1), ...,
g^sigma(s)`` increasing as residues.  Coverage follows from a discrepancy
bound below ``(3s)^-s``; the Erdos-Turan-Koksma inequality supplies one from
exponential sums over ``A``, which reduce to complete sums of a polynomial of
degree ``s (p-1)/q`` controlled by Weil's bound.

Subgroup points keep integer numerators over the common denominator ``p``
so box membership and orderings are decided exactly.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NotFoundError, ResourceLimitError
from .numtheory import SubgroupContext

ENUMERATION_BUDGET = 2_000_000


@dataclass(frozen=True, eq=False)
class PointSet:
    """Points in ``[0, 1)^s``; ``numerators / denominator`` when exact."""

    s: int
    points: np.ndarray
    provenance: str = ""
    numerators: np.ndarray | None = None
    denominator: int | None = None

    @classmethod
    def from_floats(cls, points, provenance: str = "") -> PointSet:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if pts.size and (pts.min() < 0 or pts.max() >= 1):
            raise ValueError("coordinates must lie in [0, 1)")
        return cls(pts.shape[1], pts, provenance)

    @classmethod
    def from_rationals(cls, numerators, denominator: int, provenance: str = "") -> PointSet:
        num = np.atleast_2d(np.asarray(numerators, dtype=np.int64))
        if num.size and (num.min() < 0 or num.max() >= denominator):
            raise ValueError("numerators must lie in [0, denominator)")
        return cls(num.shape[1], num / denominator, provenance, num, int(denominator))

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def cells(self, r: int) -> np.ndarray:
        """Per-coordinate grid cell ``floor(x * r)``, exact for rational point sets."""
        if self.numerators is not None:
            return self.numerators * r // self.denominator
        return np.minimum(np.floor(self.points * r).astype(np.int64), r - 1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = []
        for k in range(1, self.s + 1):
            header += [f"y{k}", f"y{k}_approx"]
        writer.writerow(header)
        for i in range(len(self)):
            row = []
            for k in range(self.s):
                exact = (f"{self.numerators[i, k]}/{self.denominator}"
                         if self.numerators is not None else "")
                row += [exact, repr(float(self.points[i, k]))]
            writer.writerow(row)
        return buf.getvalue()


@dataclass(frozen=True)
class LatticeVector:
    h: tuple

    @property
    def weight(self) -> int:
        """``r(h) = prod max(1, |h_i|)``."""
        return math.prod(max(1, abs(x)) for x in self.h)


def subgroup_powers(sub: SubgroupContext, s: int) -> np.ndarray:
    """``out[i, k] = g_{i+1}^{k+1} mod p`` for the subgroup in natural order."""
    p = sub.p
    base = sub.elements.astype(np.int64)
    out = np.empty((sub.q, s), dtype=np.int64)
    cur = np.ones_like(base)
    for k in range(s):
        cur = cur * base % p
        out[:, k] = cur
    return out


def subgroup_point_set(sub: SubgroupContext, s: int) -> PointSet:
    if s < 1:
        raise ValueError("dimension must be at least 1")
    return PointSet.from_rationals(subgroup_powers(sub, s), sub.p,
                                   f"subgroup orbit p={sub.p} q={sub.q} s={s}")


def grid_box_coverage(ps: PointSet, budget: int = ENUMERATION_BUDGET) -> tuple[bool, list[tuple]]:
    """Which of the ``(3s)^s`` half-open boxes ``prod [j/3s, (j+1)/3s)`` are empty."""
    r = 3 * ps.s
    total = r**ps.s
    if total > budget:
        raise ResourceLimitError(f"(3s)^s = {total} boxes exceeds budget {budget}")
    flat = np.ravel_multi_index(ps.cells(r).T, (r,) * ps.s) if len(ps) else np.array([], dtype=np.int64)
    occupied = np.zeros(total, dtype=bool)
    occupied[flat] = True
    missing = [tuple(int(c) for c in np.unravel_index(i, (r,) * ps.s)) for i in np.flatnonzero(~occupied)]
    return not missing, missing


def ordered_middle_box_check(ps: PointSet, sigma) -> bool:
    """Does some point have coordinate ``k`` in the middle third of group ``sigma(k)``?

    Group ``j`` spans cells ``3j-3, 3j-2, 3j-1`` of the ``3s`` cells per axis;
    its middle cell is ``[(3j-2)/3s, (3j-1)/3s)``.
    """
    sigma = np.asarray(sigma, dtype=np.int64)
    if sigma.size != ps.s:
        raise ValueError("sigma must have one entry per coordinate")
    target = 3 * sigma - 2
    return bool(np.any(np.all(ps.cells(3 * ps.s) == target[None, :], axis=1)))


def lattice_vectors(s: int, m: int) -> np.ndarray:
    """All ``h`` in ``[-m, m]^s`` except zero, as rows."""
    grid = np.array(list(itertools.product(range(-m, m + 1), repeat=s)), dtype=np.int64)
    return grid[np.any(grid != 0, axis=1)]


def etk_prefactor(s: int) -> float:
    return 2.0 * s * s * 3.0 ** (s + 1)


def weight_sum(s: int, m: int) -> float:
    """Closed form of ``sum_{0 < |h|_inf <= m} 1/r(h) = (1 + 2 H_m)^s - 1``."""
    harmonic = sum(1.0 / j for j in range(1, m + 1))
    return (1.0 + 2.0 * harmonic) ** s - 1.0


def exponential_averages(ps: PointSet, H: np.ndarray) -> np.ndarray:
    """``|1/N sum_n e(<h, x_n>)|`` for each row ``h`` of ``H``."""
    out = np.empty(H.shape[0], dtype=np.float64)
    step = max(1, (1 << 22) // max(1, len(ps)))
    for start in range(0, H.shape[0], step):
        block = H[start : start + step]
        if ps.numerators is not None:
            den = ps.denominator
            arg = (ps.numerators @ (block.T % den)) % den
            phases = kernels.roots_of_unity(den)[arg]
        else:
            phases = np.exp(2j * np.pi * np.mod(ps.points @ block.T, 1.0))
        out[start : start + step] = np.abs(phases.mean(axis=0))
    return out


def etk_bound(ps: PointSet, m: int, budget: int = ENUMERATION_BUDGET) -> float:
    """Right side of the Erdos-Turan-Koksma inequality with frequency cutoff ``m``."""
    if m < 1:
        raise ValueError("m must be positive")
    count = (2 * m + 1) ** ps.s - 1
    if count > budget:
        raise ResourceLimitError(f"{count} lattice vectors exceeds budget {budget}")
    H = lattice_vectors(ps.s, m)
    weights = np.prod(np.maximum(1, np.abs(H)), axis=1).astype(np.float64)
    total = float(np.sum(exponential_averages(ps, H) / weights))
    return etk_prefactor(ps.s) * (1.0 / m + total)


def empirical_grid_discrepancy(ps: PointSet, resolution: int, budget: int = 10_000_000) -> float:
    """Largest ``|count/N - volume|`` over boxes with corners on the ``1/resolution`` grid.

    A lower bound on the box discrepancy, by inclusion-exclusion on the
    cumulative cell histogram.
    """
    s, r, N = ps.s, resolution, len(ps)
    pairs = r * (r + 1) // 2
    if pairs**s > budget:
        raise ResourceLimitError(f"{pairs ** s} grid boxes exceeds budget {budget}")
    hist = np.zeros((r,) * s, dtype=np.int64)
    np.add.at(hist, tuple(ps.cells(r).T), 1)
    cum = np.zeros((r + 1,) * s, dtype=np.int64)
    inner = hist
    for axis in range(s):
        inner = np.cumsum(inner, axis=axis)
    cum[(slice(1, None),) * s] = inner
    lo, hi = np.triu_indices(r + 1, k=1)
    counts = np.zeros((pairs,) * s, dtype=np.int64)
    for eps in itertools.product((0, 1), repeat=s):
        sign = (-1) ** (s - sum(eps))
        counts += sign * cum[np.ix_(*[hi if bit else lo for bit in eps])]
    vol = np.ones((pairs,) * s)
    length = (hi - lo) / r
    for axis in range(s):
        shape = [1] * s
        shape[axis] = pairs
        vol = vol * length.reshape(shape)
    return float(np.max(np.abs(counts / N - vol)))


def weil_sum(p: int, coeffs) -> complex:
    """Complete sum ``sum_{x=0}^{p-1} e(g(x)/p)`` for ``g = coeffs[0] + coeffs[1] x + ...``."""
    coeffs = [int(c) for c in coeffs]
    n = len(coeffs) - 1
    if not 0 < n < p:
        raise ValueError(f"degree {n} must satisfy 0 < n < p = {p}")
    if coeffs[-1] % p == 0:
        raise ValueError("leading coefficient must be nonzero mod p")
    x = np.arange(p, dtype=np.int64)
    val = np.zeros(p, dtype=np.int64)
    for c in reversed(coeffs):
        val = (val * x + c) % p
    return complex(kernels.roots_of_unity(p)[val].sum())


def weil_bound(p: int, degree: int) -> float:
    return (degree - 1) * math.sqrt(p)


def _powmod(x: np.ndarray, k: int, p: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % p
    while k:
        if k & 1:
            result = result * base % p
        base = base * base % p
        k >>= 1
    return result


def fh_identity_check(sub: SubgroupContext, h, s: int | None = None) -> tuple[complex, complex]:
    """Both sides of the subgroup-to-full-group exponential sum identity.

    ``lhs = 1/q sum_{g in A} e((h_1 g + ... + h_s g^s)/p)``;
    ``rhs = 1/(p-1) (-1 + sum_{x=0}^{p-1} e(f_h(x)/p))`` with
    ``f_h(x) = sum_k h_k x^(k (p-1)/q)``.
    """
    h = tuple(h.h if isinstance(h, LatticeVector) else h)
    s = len(h) if s is None else s
    if len(h) != s:
        raise ValueError("h must have length s")
    p, q = sub.p, sub.q
    roots = kernels.roots_of_unity(p)

    g = sub.elements.astype(np.int64)
    acc = np.zeros_like(g)
    power = np.ones_like(g)
    for hk in h:
        power = power * g % p
        acc = (acc + hk * power) % p
    lhs = complex(roots[acc].sum()) / q

    e = (p - 1) // q
    x = np.arange(p, dtype=np.int64)
    xe = _powmod(x, e, p)
    f = np.zeros_like(x)
    for k, hk in enumerate(h, start=1):
        f = (f + hk * _powmod(xe, k, p)) % p
    rhs = (-1.0 + complex(roots[f].sum())) / (p - 1)
    return lhs, rhs


def find_ordered_element(sub: SubgroupContext, s: int, sigma) -> int:
    """First ``g != 1`` of ``A`` (natural order) with ``g^sigma(1) < ... < g^sigma(s)`` mod ``p``.

    Raises :class:`NotFoundError` when no element qualifies.
    """
    sigma = np.asarray(sigma, dtype=np.int64)
    if s < 1 or sigma.size != s:
        raise ValueError("sigma must be a sequence of s exponents")
    powers = subgroup_powers(sub, int(sigma.max()))
    chosen = powers[:, sigma - 1]
    ok = np.all(np.diff(chosen, axis=1) > 0, axis=1) & (sub.elements != 1)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        raise NotFoundError(f"no element of the order-{sub.q} subgroup mod {sub.p} "
                            f"is ordered by sigma={sigma.tolist()}")
    return int(sub.elements[hits[0]])


def dimension_scale(p: int, delta: float) -> int:
    """Largest dimension ``floor(delta * sqrt(log p))`` for which ordered elements are promised."""
    if p < 3 or delta <= 0:
        raise ValueError("need p >= 3 and delta > 0")
    return int(math.floor(delta * math.sqrt(math.log(p))))


def etk_m_schedule(s: int, delta1: float = 1.0) -> int:
    """Frequency cutoff ``m = s^(delta1 s)`` rounded up."""
    return max(1, math.ceil(s ** (delta1 * s)))


def bound_chain_terms(p: int, q: int, s: int, m: int, C: float = 1.0) -> dict:
    """Terms of the coverage argument, with the unspecified constant ``C`` shown as given.

    ``weil_etk`` is the ETK bound with every exponential average replaced by
    its Weil estimate ``(1 + (d - 1) sqrt p) / (p - 1)``, ``d = s (p-1)/q``.
    """
    degree = s * (p - 1) // q
    per_sum = (1.0 + max(degree - 1, 0) * math.sqrt(p)) / (p - 1)
    return {
        "prefactor": etk_prefactor(s),
        "inv_m": 1.0 / m,
        "weil_term": s * p ** -0.1687 * C**s * math.log(m) ** s if m > 1 else 0.0,
        "weil_etk": etk_prefactor(s) * (1.0 / m + weight_sum(s, m) * per_sum),
        "coverage_target": (3.0 * s) ** -s,
    }


def discrepancy_report(sub: SubgroupContext, s: int, m: int, resolution: int | None = None) -> dict:
    ps = subgroup_point_set(sub, s)
    covered, missing = grid_box_coverage(ps)
    resolution = resolution or 3 * s
    return {
        "p": sub.p,
        "q": sub.q,
        "s": s,
        "m": m,
        "etk_bound": etk_bound(ps, m),
        "empirical_lower": empirical_grid_discrepancy(ps, resolution),
        "covered": covered,
        "missing_count": len(missing),
        "chain": bound_chain_terms(sub.p, sub.q, s, m),
    }
