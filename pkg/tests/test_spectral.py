import numpy as np
import pytest
import scipy.linalg

import dirikit as dk
from dirikit.errors import (
    NegativeInput,
    NegativeTime,
    NotExcessive,
    NotIrreducible,
)
from dirikit.sampling import random_form

from conftest import rng_for

SAMPLE_TIMES = [2.0**k for k in range(-10, 5)]


def killed_pair():
    return dk.build_form(["a", "b"], 1.0, [("a", "b", 1.0)], {"a": 1.0, "b": 0.0})


def semigroup_oracle(gen, t):
    # independent route: Pade-based matrix exponential
    return scipy.linalg.expm(-t * gen.L)


def excessive_oracle(gen, h):
    hv = gen.space.vector(h)
    scale = max(1.0, float(np.max(np.abs(gen.L)))) * max(1.0, float(np.max(hv)))
    bound = 1e-7 * scale
    for t in SAMPLE_TIMES:
        if np.min(hv - dk.semigroup(gen, t) @ hv) < -bound:
            return False
    return True


class TestSemigroup:
    def test_time_zero_is_identity(self):
        gen = dk.generator(dk.generate("cycle", 5))
        assert np.allclose(dk.semigroup(gen, 0.0), np.eye(5), atol=1e-12)

    def test_k2_long_time_limit(self):
        gen = dk.generator(dk.build_form(["a", "b"], 1.0, [("a", "b", 1.0)]))
        t = 10.0
        expected = 0.5 * np.array(
            [[1 + np.exp(-2 * t), 1 - np.exp(-2 * t)],
             [1 - np.exp(-2 * t), 1 + np.exp(-2 * t)]]
        )
        assert np.max(np.abs(dk.semigroup(gen, t) - expected)) < 1e-8
        assert np.max(np.abs(dk.semigroup(gen, t) - 0.5)) < 1e-8

    def test_killing_makes_strictly_submarkov(self):
        gen = dk.generator(killed_pair())
        mass = dk.semigroup(gen, 1.0) @ np.ones(2)
        assert np.all(mass < 1.0)
        assert np.allclose(dk.semigroup(gen, 1.0), semigroup_oracle(gen, 1.0), atol=1e-12)

    def test_negative_time(self):
        gen = dk.generator(killed_pair())
        with pytest.raises(NegativeTime):
            dk.semigroup(gen, -0.1)

    def test_matches_expm_oracle(self):
        rng = rng_for(21)
        for _ in range(20):
            form = random_form(rng, int(rng.integers(2, 9)))
            gen = dk.generator(form)
            t = float(rng.uniform(0.0, 4.0))
            assert np.allclose(dk.semigroup(gen, t), semigroup_oracle(gen, t), atol=1e-10)

    def test_positivity_submarkov_and_semigroup_law(self):
        rng = rng_for(22)
        for _ in range(50):
            form = random_form(rng, int(rng.integers(2, 9)))
            gen = dk.generator(form)
            s, t = rng.uniform(0.05, 2.0, size=2)
            ts, tt = dk.semigroup(gen, s), dk.semigroup(gen, t)
            assert np.min(ts) >= -1e-12
            assert np.max(ts @ np.ones(len(form.space))) <= 1.0 + 1e-12
            assert np.allclose(ts @ tt, dk.semigroup(gen, s + t), atol=1e-11)

    def test_cache_is_transparent(self):
        form = dk.generate("path", 5)
        gen1 = dk.generator(form)
        first = dk.semigroup(gen1, 0.7)
        again = dk.semigroup(gen1, 0.7)  # cached decomposition
        fresh = dk.semigroup(dk.generator(form), 0.7)  # no cache
        assert np.array_equal(first, again)
        assert np.array_equal(first, fresh)

    def test_spectral_data_invariants(self):
        rng = rng_for(23)
        for _ in range(10):
            form = random_form(rng, 6)
            gen = dk.generator(form)
            data = dk.spectral_data(gen)
            assert np.all(np.diff(data.eigenvalues) >= -1e-12)
            assert np.min(data.eigenvalues) >= -1e-10
            gram = data.eigenvectors.T @ (form.space.m[:, None] * data.eigenvectors)
            assert np.allclose(gram, np.eye(6), atol=1e-10)


def decomposing_sets_oracle(form):
    """All vertex subsets A with Q(f) = Q(1_A f) + Q(1_Ac f) for every f,
    found by polarization on basis pairs across the cut."""
    n = len(form.space)
    basis = np.eye(n)
    out = []
    for bits in range(1, 2**n - 1):
        members = [i for i in range(n) if bits & (1 << i)]
        rest = [i for i in range(n) if not bits & (1 << i)]
        broken = False
        for i in members:
            for j in rest:
                f = basis[i] + basis[j]
                fa = f.copy()
                fa[rest] = 0.0
                fc = f - fa
                gap = dk.evaluate(form, f) - dk.evaluate(form, fa) - dk.evaluate(form, fc)
                if abs(gap) > 1e-12:
                    broken = True
                    break
            if broken:
                break
        if not broken:
            out.append(bits)
    return out


class TestIrreducible:
    def test_k2(self):
        assert dk.is_irreducible(dk.build_form(["a", "b"], 1.0, [("a", "b", 1.0)]))

    def test_isolated_vertices(self):
        assert not dk.is_irreducible(dk.build_form(["a", "b"], 1.0, []))

    def test_zero_weight_edge_disconnects(self):
        edges = [("v0", "v1", 1.0), ("v1", "v2", 0.0), ("v2", "v3", 1.0), ("v3", "v4", 1.0)]
        form = dk.build_form([f"v{i}" for i in range(5)], 1.0, edges)
        assert not dk.is_irreducible(form)

    def test_agrees_with_decomposition_oracle(self):
        rng = rng_for(31)
        for _ in range(25):
            n = int(rng.integers(2, 8))
            form = random_form(rng, n, extra_edge_prob=0.2)
            if rng.random() < 0.5:
                # break connectivity by dropping all edges at one vertex
                victim = form.space.vertices[int(rng.integers(0, n))]
                edges = {k: w for k, w in form.b.items() if victim not in k}
                form = dk.GraphForm(form.space, edges, form.c)
            assert dk.is_irreducible(form) == (not decomposing_sets_oracle(form))

    def test_oracle_at_size_twelve(self):
        form = dk.generate("cycle", 12)
        assert dk.is_irreducible(form)
        assert not decomposing_sets_oracle(form)
        halves = dk.build_form(
            [f"v{i}" for i in range(12)],
            1.0,
            [(f"v{i}", f"v{i+1}", 1.0) for i in range(5)]
            + [(f"v{i}", f"v{i+1}", 1.0) for i in range(6, 11)],
        )
        assert not dk.is_irreducible(halves)
        assert decomposing_sets_oracle(halves)


class TestRecurrent:
    def test_no_killing(self):
        assert dk.is_recurrent(dk.generate("path", 4))

    def test_killed_pair(self):
        assert not dk.is_recurrent(killed_pair())

    def test_doob_partner(self):
        form = dk.build_form(
            ["a", "b"], {"a": 1.0, "b": 4.0}, [("a", "b", 2.0)], {"a": 0.0, "b": 2.0}
        )
        assert not dk.is_recurrent(form)


class TestExcessive:
    def test_constants_are_excessive(self):
        gen = dk.generator(killed_pair())
        assert dk.is_excessive(gen, 1.0)

    def test_two_vertex_examples(self):
        gen = dk.generator(killed_pair())  # L = [[2,-1],[-1,1]]
        assert dk.is_excessive(gen, [1.0, 2.0])  # L h = (0, 1)
        assert not dk.is_excessive(gen, [2.0, 1.0])  # L h = (3, -1)

    def test_negative_input(self):
        gen = dk.generator(killed_pair())
        with pytest.raises(NegativeInput):
            dk.is_excessive(gen, [-1.0, 1.0])

    def test_agrees_with_sampled_semigroup(self):
        rng = rng_for(32)
        for _ in range(60):
            form = random_form(rng, int(rng.integers(2, 8)))
            gen = dk.generator(form)
            roll = rng.random()
            if roll < 0.4:
                h = rng.uniform(0.0, 2.0, size=len(form.space))
            elif roll < 0.7:
                h = np.full(len(form.space), float(rng.uniform(0.5, 2.0)))
            else:
                witness = dk.find_nonconstant_excessive(gen)
                h = witness if witness is not None else np.ones(len(form.space))
            assert dk.is_excessive(gen, h) == excessive_oracle(gen, h)


class TestNonconstantExcessive:
    def test_recurrent_has_none(self):
        assert dk.find_nonconstant_excessive(dk.generator(dk.generate("cycle", 5))) is None

    def test_killed_pair_has_witness(self):
        gen = dk.generator(killed_pair())
        h = dk.find_nonconstant_excessive(gen)
        assert h is not None
        assert dk.is_excessive(gen, h)
        assert np.max(h) / np.min(h) > 1.0 + 1e-6
        assert np.min(h) > 0.0

    def test_single_killed_vertex(self):
        gen = dk.generator(dk.build_form(["a"], 1.0, [], {"a": 1.0}))
        assert dk.find_nonconstant_excessive(gen) is None

    def test_requires_irreducible(self):
        gen = dk.generator(dk.build_form(["a", "b"], 1.0, []))
        with pytest.raises(NotIrreducible):
            dk.find_nonconstant_excessive(gen)

    def test_deterministic_witness(self):
        gen = dk.generator(killed_pair())
        h1 = dk.find_nonconstant_excessive(gen)
        h2 = dk.find_nonconstant_excessive(dk.generator(killed_pair()))
        assert np.array_equal(h1, h2)

    def test_liouville_equivalence_random(self):
        rng = rng_for(33)
        for _ in range(25):
            form = random_form(rng, int(rng.integers(2, 8)))
            witness = dk.find_nonconstant_excessive(dk.generator(form))
            assert (witness is None) == dk.is_recurrent(form)


class TestTruncation:
    def test_h_above_f(self):
        form = killed_pair()
        f = np.array([0.5, 0.25])
        q_min, q_plus, ok = dk.check_truncation(form, f, [2.0, 4.0])
        assert q_min == pytest.approx(dk.evaluate(form, f))
        assert q_plus == pytest.approx(0.0, abs=1e-14)
        assert ok

    def test_h_zero_on_recurrent(self):
        form = dk.generate("path", 3)
        f = np.array([1.0, 2.0, 0.5])
        q_min, q_plus, ok = dk.check_truncation(form, f, 0.0)
        assert q_min == pytest.approx(0.0, abs=1e-14)
        assert q_plus == pytest.approx(dk.evaluate(form, f))
        assert ok

    def test_killed_pair_values(self):
        q_min, q_plus, ok = dk.check_truncation(killed_pair(), [3.0, 0.0], [1.0, 2.0])
        assert q_min == pytest.approx(2.0)
        assert q_plus == pytest.approx(8.0)
        assert ok

    def test_rejects_non_excessive(self):
        with pytest.raises(NotExcessive):
            dk.check_truncation(killed_pair(), [1.0, 0.0], [2.0, 1.0])


class TestCommutant:
    def test_k2(self):
        assert dk.commutant_is_trivial(dk.generator(dk.build_form(["a", "b"], 1.0, [("a", "b", 1.0)])))

    def test_two_disjoint_edges(self):
        form = dk.build_form(["a", "b", "c", "d"], 1.0, [("a", "b", 1.0), ("c", "d", 1.0)])
        assert not dk.commutant_is_trivial(dk.generator(form))

    def test_random_connected(self):
        rng = rng_for(34)
        form = random_form(rng, 6)
        assert dk.commutant_is_trivial(dk.generator(form))

    def test_matches_irreducibility(self):
        rng = rng_for(35)
        for _ in range(25):
            n = int(rng.integers(1, 9))
            form = random_form(rng, n, extra_edge_prob=0.15)
            if n > 2 and rng.random() < 0.5:
                victim = form.space.vertices[int(rng.integers(0, n))]
                edges = {k: w for k, w in form.b.items() if victim not in k}
                form = dk.GraphForm(form.space, edges, form.c)
            gen = dk.generator(form)
            assert dk.commutant_is_trivial(gen) == dk.is_irreducible(form)
