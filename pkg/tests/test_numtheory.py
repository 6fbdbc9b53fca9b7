import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from charmax.errors import ResourceLimitError
from charmax.numtheory import (PrimePair, build_group_context, build_subgroup_context, factorize,
                               is_prime, largest_prime_factor, multiplicative_order,
                               power_inequality_holds, primitive_root, scan_fouvry_primes)
from oracles import order_mod, trial_factor


class TestFactorize:
    def test_examples(self):
        assert factorize(12) == [2, 2, 3]
        assert factorize(1) == []
        assert Counter(factorize(27648)) == Counter(trial_factor(27648)) == Counter({2: 10, 3: 3})

    def test_reassembles_exhaustively(self):
        for n in range(1, 10**5 + 1):
            fs = factorize(n)
            assert math.prod(fs) == n
        # primality of factors, checked on a sieve
        sieve = np.ones(10**5 + 1, dtype=bool)
        sieve[:2] = False
        for i in range(2, 317):
            if sieve[i]:
                sieve[i * i :: i] = False
        for n in range(2, 10**5 + 1, 7):
            assert all(sieve[f] for f in factorize(n))

    @given(st.integers(min_value=2, max_value=10**12))
    def test_large_inputs_match_trial_division_on_products(self, n):
        fs = factorize(n)
        assert math.prod(fs) == n
        assert all(is_prime(f) for f in fs)

    def test_semiprime_past_trial_bound(self):
        p, q = 1_000_003, 1_000_033
        assert factorize(p * q) == [p, q]

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            factorize(0)


def test_largest_prime_factor():
    assert largest_prime_factor(12) == 3
    assert largest_prime_factor(22) == 11
    assert largest_prime_factor(1552) == max(trial_factor(1552)) == 97
    with pytest.raises(ValueError):
        largest_prime_factor(1)


def test_is_prime_against_trial_division():
    for n in range(2000):
        assert is_prime(n) == (n > 1 and trial_factor(n) == [n])
    assert is_prime(2**61 - 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


class TestPrimitiveRoot:
    def test_examples(self):
        assert primitive_root(7) == 3
        assert primitive_root(2) == 1
        assert primitive_root(11) == 2

    @pytest.mark.parametrize("p", [3, 5, 13, 23, 41, 107, 1009])
    def test_smallest_generator(self, p):
        alpha = primitive_root(p)
        assert order_mod(alpha, p) == p - 1
        assert all(order_mod(b, p) < p - 1 for b in range(2, alpha))

    def test_not_prime(self):
        with pytest.raises(ValueError):
            primitive_root(15)


class TestGroupContext:
    def test_p7(self):
        ctx = build_group_context(7)
        assert ctx.alpha == 3
        assert ctx.log(3) == 1 and ctx.log(2) == 2 and ctx.log(6) == 3
        assert ctx.log(1) == 6

    @pytest.mark.parametrize("p", [2, 3, 11, 101, 997])
    def test_invariants(self, p):
        ctx = build_group_context(p)
        nu = ctx.nu[1:]
        assert sorted(nu.tolist()) == list(range(1, p))
        for g in range(1, p):
            assert pow(ctx.alpha, ctx.log(g), p) == g
        if p > 2:
            for g in range(1, p):
                for h in range(1, p, max(1, p // 13)):
                    assert ctx.log(g * h % p) % (p - 1) == (ctx.log(g) + ctx.log(h)) % (p - 1)

    def test_homomorphism_p11(self):
        ctx = build_group_context(11)
        assert ctx.log(4) % 10 == 2 * ctx.log(2) % 10

    def test_large_table_is_blocked_but_exact(self):
        p = 1_000_003
        ctx = build_group_context(p)
        rng = np.random.default_rng(1)
        for g in rng.integers(1, p, 200):
            assert pow(ctx.alpha, ctx.log(int(g)), p) == g

    def test_budget(self):
        with pytest.raises(ResourceLimitError):
            build_group_context(10_000_019)


class TestSubgroup:
    def test_examples(self):
        ctx = build_group_context(7)
        assert build_subgroup_context(ctx, 3).elements.tolist() == [1, 2, 4]
        assert build_subgroup_context(ctx, 2).elements.tolist() == [1, 6]

    def test_full_group(self):
        ctx = build_group_context(3)
        assert build_subgroup_context(ctx, 2).elements.tolist() == [1, 2]

    @pytest.mark.parametrize("p,q", [(7, 3), (11, 5), (23, 11), (59, 29), (107, 53), (1019, 509)])
    def test_invariants(self, p, q):
        sub = build_subgroup_context(build_group_context(p), q)
        image = sorted({pow(x, (p - 1) // q, p) for x in range(1, p)})
        assert sub.elements.tolist() == image
        for i in range(1, q + 1):
            g = pow(sub.alpha_A, i, p)
            assert sub.nu_A[g] == (i - 1) % q + 1
        for g in sub.elements.tolist():
            for i in (2, 3, 5):
                assert sub.nu_A[pow(g, i, p)] % q == i * sub.nu_A[g] % q
        assert sub.alpha_A == image[1]

    def test_rejects_nondivisor(self):
        with pytest.raises(ValueError):
            build_subgroup_context(build_group_context(7), 5)


class TestFouvryScan:
    def test_examples(self):
        found = {pp.p: pp.q for pp in scan_fouvry_primes(25, 1.0, 0.6687)}
        assert found.get(23) == 11
        assert 13 not in found
        assert scan_fouvry_primes(3, 1.0, 0.6687) == []
        # direct evaluation of the three boundary examples
        assert 11 >= 23**0.6687 and 3 < 13**0.6687 and 2 < 3**0.6687

    def test_exact_recheck_to_1e5(self):
        pairs = scan_fouvry_primes(10**5, 1.0, 0.6687)
        assert pairs
        assert [pp.p for pp in pairs] == sorted(pp.p for pp in pairs)
        for pp in pairs:
            assert pp.q == max(trial_factor(pp.p - 1))
            assert pp.q**10000 >= pp.p**6687

    def test_excluded_primes_fail_exactly(self):
        chosen = {pp.p for pp in scan_fouvry_primes(3000)}
        for p in range(3, 3000):
            if is_prime(p) and p not in chosen:
                assert max(trial_factor(p - 1)) ** 10000 < p**6687

    def test_power_inequality_tie(self):
        # q = p^(1/2) exactly: float rounding must not decide
        assert power_inequality_holds(7, 49, 1, 0.5)
        assert not power_inequality_holds(7, 49, 1.0000001, 0.5)

    def test_pair_json(self):
        pp = PrimePair(23, 11)
        assert pp.to_json() == {"p": 23, "q": 11, "exponent_achieved": math.log(11) / math.log(23)}
        with pytest.raises(ValueError):
            PrimePair(23, 7)


def test_multiplicative_order():
    for p in (23, 47, 59, 101):
        assert multiplicative_order(2, p) == order_mod(2, p)
