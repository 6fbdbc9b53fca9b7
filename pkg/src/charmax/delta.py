"""Estimates of the maximal character-sum constant Delta(N).

Delta(N) is the operator "norm" of the sublinear map

    a  ->  ( 1/phi(N) sum_chi max_l |sum_{n<=l} a_n chi(n)|^2 )^(1/2).

Fixing one cutoff per character (a *cutoff assignment*) turns the map into a
linear selection matrix ``S``, whose top singular value is a lower bound;
the maximum over every assignment is the exact value.  Small moduli are
solved by exhausting assignments, larger ones by alternating between the
two maximizations.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .chargroup import CoefficientVector, character_matrix, multiplicative_max_partial
from .errors import NonConvergenceError, ResourceLimitError
from .numtheory import build_group_context, euler_phi, is_prime

COMPOSITE_CAP = 10
DENSE_TABLE_CAP = 2048
EXACT_BUDGET = 5000

POWER_TOL = 1e-10
POWER_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class CharacterSystem:
    """All characters mod ``N`` evaluated on the units, as a dense table.

    ``table[c, j] = chi_c(units[j])``; row 0 is the principal character.
    """

    N: int
    units: np.ndarray
    table: np.ndarray

    @property
    def phi(self) -> int:
        return int(self.units.size)


def _composite_characters(N: int) -> CharacterSystem:
    units = [n for n in range(1, N) if math.gcd(n, N) == 1] if N > 1 else [1]
    phi = len(units)
    pos = {u: i for i, u in enumerate(units)}
    products = [(i, j, pos[(u * v) % N]) for i, u in enumerate(units) for j, v in enumerate(units) if i <= j]
    chars = []
    # values are phi-th roots of unity, so search exponent vectors mod phi with chi(1) = 1
    for tail in itertools.product(range(phi), repeat=phi - 1):
        k = (0, *tail)
        if all((k[i] + k[j] - k[m]) % phi == 0 for i, j, m in products):
            chars.append(k)
    if len(chars) != phi:
        raise ArithmeticError(f"found {len(chars)} characters mod {N}, expected {phi}")
    exps = np.array(chars, dtype=np.int64)
    table = kernels.roots_of_unity(phi)[exps % phi]
    return CharacterSystem(N, np.array(units, dtype=np.int64), table)


@lru_cache(maxsize=16)
def character_system(N: int) -> CharacterSystem:
    if N < 2:
        raise ValueError("modulus must be at least 2")
    if is_prime(N):
        if N > DENSE_TABLE_CAP:
            raise ResourceLimitError(f"dense character table for N={N} exceeds cap {DENSE_TABLE_CAP}")
        ctx = build_group_context(N)
        units = np.arange(1, N, dtype=np.int64)
        return CharacterSystem(N, units, character_matrix(ctx, units))
    if N > COMPOSITE_CAP:
        raise ResourceLimitError(f"composite modulus {N} exceeds brute-force cap {COMPOSITE_CAP}")
    return _composite_characters(N)


def delta_ratio(N: int, a: CoefficientVector) -> float:
    """Left side of the maximal inequality for ``a`` divided by ``|a|_2``.

    This is a certified lower bound on Delta(N).  Zero coefficients are
    dropped; they never change a prefix maximum.
    """
    a = a.nonzero()
    if len(a) == 0:
        raise ValueError("delta_ratio of the zero vector is undefined")
    if a.indices[-1] >= N or any(math.gcd(int(n), N) != 1 for n in a.indices):
        raise ValueError(f"coefficients must sit on residues in [1, {N - 1}] coprime to {N}")
    if is_prime(N):
        return multiplicative_max_partial(build_group_context(N), a).ratio
    system = character_system(N)
    cols = np.searchsorted(system.units, a.indices)
    maxima, _ = kernels.max_partial_table(a.values, system.table[:, cols])
    return float(np.sqrt(np.mean(maxima**2))) / a.norm2


def selection_matrix(table: np.ndarray, cutoffs) -> np.ndarray:
    """Rows of ``table`` truncated after ``cutoffs[c]`` columns (1-based)."""
    cutoffs = np.asarray(cutoffs, dtype=np.int64)
    keep = np.arange(table.shape[1])[None, :] < cutoffs[:, None]
    return np.where(keep, table, 0)


def power_iteration(S: np.ndarray, x0: np.ndarray, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER):
    """Largest singular value of ``S`` and its right singular vector.

    Iterates on the Gram matrix ``S^H S`` and stops when the Rayleigh
    quotient changes by at most ``tol`` relative.  Returns ``(sigma, x)``
    with ``x`` a unit vector and ``sigma = |S x|`` exactly as evaluated.
    """
    G = S.conj().T @ S
    x = x0 / np.linalg.norm(x0)
    lam = float(np.real(np.vdot(x, G @ x)))
    for _ in range(max_iter):
        y = G @ x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0, x
        x = y / ny
        new = float(np.real(np.vdot(x, G @ x)))
        if abs(new - lam) <= tol * new:
            return float(np.linalg.norm(S @ x)), x
        lam = new
    raise NonConvergenceError(f"power iteration did not converge in {max_iter} steps")


@dataclass(frozen=True, eq=False)
class DeltaEstimate:
    N: int
    value: float
    kind: str
    method: str
    witness_coeffs: CoefficientVector | None = None
    witness_assignment: np.ndarray | None = None
    trace: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        out = {"N": self.N, "value": self.value, "kind": self.kind, "method": self.method}
        if self.witness_coeffs is not None:
            out["witness_coeffs"] = self.witness_coeffs.to_json()
        if self.witness_assignment is not None:
            out["witness_assignment"] = [int(c) for c in self.witness_assignment]
        return out


def _unit_start(rng, k: int) -> np.ndarray:
    x = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    return x / np.linalg.norm(x)


def power_iteration_batched(G: np.ndarray, x0: np.ndarray, tol: float = POWER_TOL,
                            max_iter: int = POWER_MAX_ITER):
    """Power iteration on a stack of Hermitian PSD matrices ``G[b]``.

    Same stopping rule as :func:`power_iteration`, applied per matrix;
    converged members are frozen while the rest keep iterating.  Returns the
    top eigenvalues (Rayleigh quotients) and unit eigenvectors.
    """
    B, K = G.shape[0], G.shape[1]
    x = np.broadcast_to(x0 / np.linalg.norm(x0), (B, K)).copy()
    lam = np.real(np.einsum("bi,bij,bj->b", x.conj(), G, x))
    active = np.arange(B)
    for _ in range(max_iter):
        if active.size == 0:
            return lam, x
        Ga, xa = G[active], x[active]
        y = np.einsum("bij,bj->bi", Ga, xa)
        ny = np.linalg.norm(y, axis=1)
        y = y / np.where(ny > 0, ny, 1.0)[:, None]
        new = np.real(np.einsum("bi,bij,bj->b", y.conj(), Ga, y))
        x[active] = y
        done = (np.abs(new - lam[active]) <= tol * new) | (ny == 0)
        lam[active] = new
        active = active[~done]
    raise NonConvergenceError(f"power iteration did not converge in {max_iter} steps")


def delta_exact_small(N: int, budget: int = EXACT_BUDGET, seed: int = 0) -> DeltaEstimate:
    """Exact Delta(N) by enumerating every cutoff assignment.

    There are ``phi(N) ** phi(N)`` assignments; ``budget`` caps that count.
    Ties keep the lexicographically first assignment.
    """
    if N < 2:
        raise ValueError("modulus must be at least 2")
    phi = euler_phi(N)
    if phi > 64 or phi**phi > budget:
        raise ResourceLimitError(f"N={N} needs phi^phi = {phi}^{phi} cutoff assignments, "
                                 f"budget is {budget}")
    count = phi**phi
    system = character_system(N)
    x0 = _unit_start(np.random.default_rng(seed), phi)
    table = system.table / math.sqrt(phi)
    cols = np.arange(phi)
    best, best_x, best_cut = -1.0, None, None
    assignments = itertools.product(range(1, phi + 1), repeat=phi)
    while chunk := list(itertools.islice(assignments, 1 << 14)):
        cuts = np.array(chunk, dtype=np.int64)
        S = np.where(cols[None, None, :] < cuts[:, :, None], table[None], 0)
        G = np.einsum("bcj,bck->bjk", S.conj(), S)
        lam, x = power_iteration_batched(G, x0)
        i = int(np.argmax(lam))
        if lam[i] > best:
            best, best_x, best_cut = float(lam[i]), x[i], cuts[i]
    value = float(np.linalg.norm(selection_matrix(table, best_cut) @ best_x))
    witness = CoefficientVector(system.units, best_x)
    return DeltaEstimate(N, value, "exact", f"cutoff-assignment enumeration ({count} assignments)",
                         witness, best_cut)


@dataclass
class AlternatingResult:
    value: float
    coeffs: np.ndarray
    cutoffs: np.ndarray
    trace: list


def alternating_maximization(table: np.ndarray, a0: np.ndarray, iters: int = 50) -> AlternatingResult:
    """Alternate between best cutoffs for fixed coefficients and best coefficients for fixed cutoffs.

    The objective is the mean-square-root of the row maxima of ``table``
    weighted by the coefficients, for unit coefficient vectors.  Its trace
    is nondecreasing; a decrease beyond rounding raises ``RuntimeError``.
    """
    P = table.shape[0]
    scale = 1.0 / math.sqrt(P)
    a = np.asarray(a0, dtype=np.complex128)
    a = a / np.linalg.norm(a)
    maxima, arg = kernels.max_partial_table(a, table)
    f = float(np.sqrt(np.mean(maxima**2)))
    trace = [f]
    for _ in range(iters):
        cutoffs = arg + 1
        sigma, a_new = power_iteration(selection_matrix(table, cutoffs) * scale, a)
        if sigma <= f * (1.0 + 1e-13):
            break
        maxima, arg_new = kernels.max_partial_table(a_new, table)
        f_new = float(np.sqrt(np.mean(maxima**2)))
        if f_new < f * (1.0 - 1e-12):
            raise RuntimeError(f"alternating objective decreased: {f} -> {f_new}")
        a, arg, f = a_new, arg_new, f_new
        trace.append(f)
    return AlternatingResult(f, a, arg + 1, trace)


def delta_heuristic(N: int, restarts: int = 50, iters: int = 50, seed: int = 0) -> DeltaEstimate:
    """Lower bound on Delta(N) by restarted alternating maximization."""
    if N < 3:
        raise ValueError("delta_heuristic expects N >= 3")
    system = character_system(N)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        res = alternating_maximization(system.table, _unit_start(rng, system.phi), iters)
        if best is None or res.value > best.value:
            best = res
    return DeltaEstimate(N, best.value, "lower_bound",
                         f"alternating maximization (restarts={restarts}, iters={iters}, seed={seed})",
                         CoefficientVector(system.units, best.coeffs), best.cutoffs, best.trace)


def rm_upper_bound(N: int) -> DeltaEstimate:
    """Dyadic-chaining ceiling ``ceil(log2 phi(N)) + 1``.

    Splitting each prefix into at most ``ceil(log2 K) + 1`` dyadic blocks of
    an orthonormal system of ``K`` functions gives this constant.
    """
    if N < 2:
        raise ValueError("modulus must be at least 2")
    K = euler_phi(N)
    value = float((K - 1).bit_length() + 1)
    return DeltaEstimate(N, value, "upper_bound", f"Rademacher-Menshov dyadic chaining, phi(N)={K}")
