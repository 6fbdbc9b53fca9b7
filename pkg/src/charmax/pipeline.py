"""End-to-end constructions with every intermediate identity checked numerically.

:func:`build_counterexample` assembles coefficients on an order-``q``
subgroup of ``Z_p^*`` whose maximal character sums reproduce a bad additive
ordering mod ``q``.  :func:`verify_ch_reduction` runs the other direction:
coefficients placed on powers of 2 turn the multiplicative inequality into
the additive one mod the order of 2.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .chargroup import (CoefficientVector, additive_max_partial, e, multiplicative_max_partial,
                        phase_max_partial, transport_subgroup_to_additive)
from .config import RunConfig
from .delta import delta_ratio, rm_upper_bound
from .discrepancy import find_ordered_element, dimension_scale
from .errors import IdentityCheckError, NotFoundError
from .numtheory import (PrimePair, build_group_context, build_subgroup_context, is_prime,
                        multiplicative_order)
from .rearrangement import BadOrderWitness, search_bad_permutation

IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: float
    rhs: float

    @property
    def abs_error(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def ok(self) -> bool:
        return self.abs_error <= IDENTITY_TOL * (1.0 + abs(self.lhs))

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "abs_error": self.abs_error}


@dataclass(frozen=True, eq=False)
class CounterexampleReport:
    pair: PrimePair
    s: int
    sigma: np.ndarray
    b: CoefficientVector
    g: int
    coefficients: CoefficientVector
    identities: list
    delta_lower_bound: float
    reference_scale: float
    rm_ceiling: float
    runtime_ms: float = field(default=0.0, compare=False)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.identities)

    def to_json(self) -> dict:
        return {
            "p": self.pair.p,
            "q": self.pair.q,
            "s": self.s,
            "sigma": [int(v) for v in self.sigma],
            "b": self.b.to_json(),
            "g": self.g,
            "coefficients": self.coefficients.to_json(),
            "identities": [c.to_json() for c in self.identities],
            "delta_lower_bound": self.delta_lower_bound,
            "reference_scale": self.reference_scale,
            "rm_ceiling": self.rm_ceiling,
        }


def _seed_for(seed: int, p: int) -> int:
    return int(np.random.SeedSequence([seed, p]).generate_state(1)[0])


def _sigma_forms(sub, g: int, sigma: np.ndarray, b: CoefficientVector):
    """Mean-square maxima mod ``q`` before and after relabelling ``y = x nu_A(g)``."""
    q = sub.q
    # nu_A(g^k) = k nu_A(g) mod q
    linear = phase_max_partial(b, sigma * int(sub.nu_A[g]) % q, q).mean_square
    relabeled = additive_max_partial(b, sigma, q).mean_square
    return linear, relabeled


def _assemble(sub, g: int, sigma: np.ndarray, b: CoefficientVector) -> CoefficientVector:
    residues = [pow(g, int(k), sub.p) for k in sigma]
    if len(set(residues)) != len(residues):
        raise IdentityCheckError(f"powers of g={g} collide: {residues}")
    if any(x >= y for x, y in zip(residues, residues[1:])):
        raise IdentityCheckError(f"powers of g={g} are not increasing under sigma")
    return CoefficientVector(residues, b.values)


def build_counterexample(pair: PrimePair | tuple, config: RunConfig | None = None, *,
                         s: int | None = None, witness: BadOrderWitness | None = None) -> CounterexampleReport:
    """Subgroup-supported coefficients realizing a bad additive ordering mod ``q``.

    ``s`` overrides the dimension chosen from ``p``; ``witness`` supplies a
    fixed ``(sigma, b)`` instead of searching.  If no subgroup element is
    ordered by the searched ``sigma`` the dimension drops by one, down to 2.
    """
    config = config or RunConfig()
    if not isinstance(pair, PrimePair):
        pair = PrimePair(*pair)
    started = time.perf_counter()
    p, q = pair.p, pair.q
    sub = build_subgroup_context(build_group_context(p), q)

    if witness is not None:
        s = witness.N
    elif s is None:
        s = max(1, min(dimension_scale(p, config.delta_param), config.s_cap, q))
    seed = _seed_for(config.seed, p)

    while True:
        w = witness or search_bad_permutation(
            s, q, config.search_budget, seed, restarts=config.restarts,
            iters=config.iters, c1=config.c1)
        try:
            g = find_ordered_element(sub, s, w.sigma)
            break
        except NotFoundError:
            if witness is not None or s <= 2:
                raise NotFoundError(f"no ordered element in A for p={p}, q={q} at any s >= 2")
            s -= 1

    sigma, b = w.sigma, w.b
    coeffs = _assemble(sub, g, sigma, b)
    lhs_mult = multiplicative_max_partial(sub.parent, coeffs).mean_square
    positions = CoefficientVector([sub.position(int(r)) for r in coeffs.indices], b.values)
    _, transported = transport_subgroup_to_additive(sub, positions)
    linear, relabeled = _sigma_forms(sub, g, sigma, b)
    identities = [
        IdentityCheck("transport", lhs_mult, transported),
        IdentityCheck("nu_linearity", transported, linear),
        IdentityCheck("change_of_variables", linear, relabeled),
    ]
    bound = math.sqrt(lhs_mult) / coeffs.norm2
    loglog = math.log(math.log(p))
    return CounterexampleReport(
        pair, s, sigma, b, g, coeffs, identities, bound,
        loglog**0.25 if loglog > 0 else 0.0, rm_upper_bound(p).value,
        (time.perf_counter() - started) * 1e3)


def verify_counterexample(report: CounterexampleReport) -> None:
    """Raise :class:`IdentityCheckError` unless the report passes every check."""
    bad = [c.name for c in report.identities if not c.ok]
    if bad:
        raise IdentityCheckError(f"p={report.pair.p}: identities failed: {', '.join(bad)}")
    independent = delta_ratio(report.pair.p, report.coefficients)
    if abs(independent - report.delta_lower_bound) > IDENTITY_TOL:
        raise IdentityCheckError(f"p={report.pair.p}: bound {report.delta_lower_bound} "
                                 f"not reproduced ({independent})")
    if not 1.0 - 1e-12 <= report.delta_lower_bound <= report.rm_ceiling:
        raise IdentityCheckError(f"p={report.pair.p}: bound outside [1, RM ceiling]")


@dataclass(frozen=True, eq=False)
class ReductionReport:
    p: int
    k: int
    nu2: int
    L: int
    M: int
    chain_values: tuple
    m_exceeds_log: bool
    maxima_reduced: np.ndarray = field(repr=False)
    maxima_additive: np.ndarray = field(repr=False)

    @property
    def ok(self) -> bool:
        ref = self.chain_values[0]
        agree = all(abs(v - ref) <= IDENTITY_TOL * abs(ref) for v in self.chain_values)
        return (agree and math.gcd(self.L, self.M) == 1 and (self.p - 1) % self.M == 0
                and self.m_exceeds_log)

    def to_json(self) -> dict:
        names = ("characters_on_powers_of_2", "index_phases", "reduced_fraction", "additive_mod_M")
        return {
            "p": self.p,
            "k": self.k,
            "nu2": self.nu2,
            "L": self.L,
            "M": self.M,
            "chain_values": dict(zip(names, self.chain_values)),
            "m_exceeds_log": self.m_exceeds_log,
            "ok": self.ok,
        }


def verify_ch_reduction(p: int, k: int, a: CoefficientVector) -> ReductionReport:
    """The four equal forms of the maximal sum for coefficients ``a_i`` on ``2^i``, ``i = 1..k``.

    Values are L2 averages of the pointwise maxima:

    1. over characters, ``sum_i a_i chi(2^i)`` with ``chi`` evaluated from the
       discrete log of each residue ``2^i``;
    2. over ``x in [1, p-1]``, phases ``e(i nu(2) x / (p-1))``;
    3. the same with ``nu(2)/(p-1)`` reduced to ``L/M``, evaluated in floating point;
    4. over ``y in [1, M]``, phases ``e(i y / M)``.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if k < 1 or 2**k >= p:
        raise ValueError(f"need 1 <= k and 2^k < p (k={k}, p={p})")
    if len(a) != k or a.norm2 == 0:
        raise ValueError("need a nonzero coefficient vector of length k")
    a = CoefficientVector.from_dense(a.values)
    ctx = build_group_context(p)
    n = p - 1
    nu2 = ctx.log(2)
    g = math.gcd(nu2, n)
    L, M = nu2 // g, n // g

    residues = np.array([pow(2, i, p) for i in range(1, k + 1)], dtype=np.int64)
    chars = kernels.roots_of_unity(n)[np.outer(np.arange(n), ctx.nu[residues]) % n]
    m1, _ = kernels.max_partial_table(a.values, chars)
    v1 = float(np.sqrt(np.mean(m1**2)))

    i = np.arange(1, k + 1, dtype=np.int64)
    v2 = phase_max_partial(a, i * nu2, n).l2_average

    xs = np.arange(1, n + 1, dtype=np.float64)
    m3, _ = kernels.max_partial_table(a.values, e(np.outer(xs, i * L / M)))
    v3 = float(np.sqrt(np.mean(m3**2)))

    rep4 = phase_max_partial(a, i, M)
    v4 = rep4.l2_average

    # form 3 at x in [1, M] equals form 4 at y = L x mod M
    y = (L * np.arange(1, M + 1)) % M
    maxima_red = m3[:M]
    maxima_add = rep4.maxima[np.where(y == 0, M, y) - 1]

    if multiplicative_order(2, p) != M:
        raise IdentityCheckError(f"denominator M={M} differs from the order of 2 mod {p}")
    return ReductionReport(p, k, nu2, L, M, (v1, v2, v3, v4), 2**M > p, maxima_red, maxima_add)


def scan_counterexamples(pairs, config: RunConfig | None = None) -> list[CounterexampleReport]:
    return [build_counterexample(pair, config) for pair in pairs]
