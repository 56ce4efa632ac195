import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import dirikit as dk
from dirikit.errors import (
    DimensionMismatch,
    HasKilling,
    InvalidMetric,
    NotConnected,
    NotRecurrent,
    SpaceMismatch,
)
from dirikit.metrics import (
    boundary_rescaled,
    default_metric_samples,
    resistance_maximizer,
)
from dirikit.sampling import random_form, relabel_pair

from conftest import rng_for


def measure_free_energy(form, f):
    return float(f @ (np.diag(form.degrees) - form.weight_matrix) @ f)


class TestEffectiveResistance:
    def test_single_edge(self):
        for b in (0.5, 1.0, 4.0):
            form = dk.build_form(["a", "b"], 1.0, [("a", "b", b)])
            assert dk.effective_resistance(form, "a", "b") == pytest.approx(1.0 / b)

    def test_unit_triangle(self):
        form = dk.generate("complete", 3)
        for x, y in (("v0", "v1"), ("v0", "v2"), ("v1", "v2")):
            assert dk.effective_resistance(form, x, y) == pytest.approx(2.0 / 3.0)

    def test_unit_path_series_law(self):
        form = dk.generate("path", 3)
        assert dk.effective_resistance(form, "v0", "v2") == pytest.approx(2.0)

    def test_requires_connected(self):
        form = dk.build_form(["a", "b"], 1.0, [])
        with pytest.raises(NotConnected):
            dk.effective_resistance(form, "a", "b")

    def test_rejects_killing(self):
        form = dk.build_form(["a", "b"], 1.0, [("a", "b", 1.0)], {"a": 1.0, "b": 0.0})
        with pytest.raises(HasKilling):
            dk.effective_resistance(form, "a", "b")

    def test_sup_formula_oracle(self):
        rng = rng_for(71)
        for _ in range(6):
            n = int(rng.integers(2, 7))
            form = random_form(rng, n, recurrent=True)
            names = form.space.vertices
            i, j = rng.choice(n, size=2, replace=False)
            x, y = names[int(i)], names[int(j)]
            r = dk.effective_resistance(form, x, y)
            f_star = resistance_maximizer(form, x, y)
            assert measure_free_energy(form, f_star) == pytest.approx(1.0)
            assert (f_star[int(i)] - f_star[int(j)]) ** 2 == pytest.approx(r)
            for _ in range(200):
                f = rng.normal(size=n)
                energy = measure_free_energy(form, f)
                if energy <= 1e-12:
                    continue
                f = f / math.sqrt(energy)
                assert (f[int(i)] - f[int(j)]) ** 2 <= r + 1e-9


class TestResistanceMatrix:
    def test_k2(self):
        matrix = dk.resistance_matrix(dk.generate("complete", 2))
        assert np.allclose(matrix.d, [[0.0, 1.0], [1.0, 0.0]])

    def test_triangle(self):
        matrix = dk.resistance_matrix(dk.generate("complete", 3))
        off = matrix.d[~np.eye(3, dtype=bool)]
        assert np.allclose(off, 2.0 / 3.0)

    def test_triangle_inequality_random(self):
        rng = rng_for(72)
        for _ in range(15):
            form = random_form(rng, int(rng.integers(2, 9)), recurrent=True)
            matrix = dk.resistance_matrix(form)  # constructor enforces the axioms
            assert np.all(matrix.d >= 0.0)

    def test_sierpinski_renormalization(self):
        values = []
        for level in range(4):
            form = dk.generate("sierpinski", level)
            c0, c1, _ = dk.sierpinski_corners(level)
            values.append(dk.effective_resistance(form, c0, c1))
        for low, high in zip(values, values[1:]):
            assert high / low == pytest.approx(5.0 / 3.0, abs=1e-9)


class TestResistanceIsometry:
    def test_identity(self):
        form = dk.generate("cycle", 4)
        report = dk.verify_resistance_isometry(dk.OrderIso.identity(form.space), form, form)
        assert report.verdict
        assert report["resistance_isometry"].residual == 0.0
        assert report["equal_mass_isometry"].passed

    def test_rotated_triangle(self):
        form = dk.generate("complete", 3)
        rotated = dk.build_form(["w0", "w1", "w2"], 1.0,
                                [("w0", "w1", 1.0), ("w1", "w2", 1.0), ("w0", "w2", 1.0)])
        tau = {"w0": "v1", "w1": "v2", "w2": "v0"}
        iso = dk.OrderIso(form.space, rotated.space, tau, {y: 1.0 for y in tau})
        report = dk.verify_resistance_isometry(iso, form, rotated)
        assert report.verdict

    def test_scaled_triangle(self):
        # quadruple measure and conductances: intertwined with h = 1/2 and
        # resistances scaled down by 4
        form1 = dk.generate("complete", 3)
        form2 = dk.generate("complete", 3, conductance=4.0, measure=4.0)
        iso = dk.OrderIso(form1.space, form2.space,
                          {v: v for v in form1.space.vertices},
                          {v: 0.5 for v in form1.space.vertices})
        report = dk.verify_resistance_isometry(iso, form1, form2)
        assert report.verdict
        r1 = dk.effective_resistance(form1, "v0", "v1")
        r2 = dk.effective_resistance(form2, "v0", "v1")
        alpha, beta = 0.5, dk.operator_constant(iso)
        assert beta == pytest.approx(1.0)
        assert alpha**2 * r1 == pytest.approx(beta * r2)
        assert "skipped" in report["equal_mass_isometry"].detail

    def test_requires_recurrent(self):
        form = dk.build_form(["a", "b"], 1.0, [("a", "b", 1.0)], {"a": 1.0, "b": 0.0})
        partner, iso = dk.doob_pair(form, [1.0, 2.0])
        with pytest.raises(NotRecurrent):
            dk.verify_resistance_isometry(iso, form, partner)

    def test_search_witnesses_random(self):
        rng = rng_for(73)
        for _ in range(10):
            form1 = random_form(rng, int(rng.integers(2, 7)), recurrent=True)
            form2, _ = relabel_pair(rng, form1, scale=float(rng.uniform(0.5, 2.0)))
            for iso in dk.find_intertwiners(form1, form2):
                report = dk.verify_resistance_isometry(iso, form1, form2)
                assert report.verdict


class TestIsIntrinsic:
    def test_k2_unit_distance(self):
        form = dk.generate("complete", 2)
        metric = dk.PseudoMetric(form.space.vertices, np.array([[0.0, 1.0], [1.0, 0.0]]))
        ok, slack = dk.is_intrinsic(form, metric)
        assert ok
        assert np.allclose(slack, 0.0)

    def test_k2_doubled_distance(self):
        form = dk.generate("complete", 2)
        metric = dk.PseudoMetric(form.space.vertices, np.array([[0.0, 2.0], [2.0, 0.0]]))
        ok, slack = dk.is_intrinsic(form, metric)
        assert not ok
        assert slack[0] == pytest.approx(-3.0)

    def test_zero_metric_always_intrinsic(self):
        rng = rng_for(74)
        for _ in range(5):
            form = random_form(rng, 5)
            metric = dk.PseudoMetric(form.space.vertices, np.zeros((5, 5)))
            assert dk.is_intrinsic(form, metric).ok

    def test_dimension_mismatch(self):
        form = dk.generate("path", 3)
        metric = dk.PseudoMetric(("a", "b"), np.zeros((2, 2)))
        with pytest.raises(DimensionMismatch):
            dk.is_intrinsic(form, metric)


class TestPseudoMetricValidation:
    def test_triangle_violation(self):
        d = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
        with pytest.raises(InvalidMetric):
            dk.PseudoMetric(("a", "b", "c"), d)

    def test_asymmetry(self):
        d = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(InvalidMetric):
            dk.PseudoMetric(("a", "b"), d)

    def test_negative_entry(self):
        d = np.array([[0.0, -1.0], [-1.0, 0.0]])
        with pytest.raises(InvalidMetric):
            dk.PseudoMetric(("a", "b"), d)


class TestCanonicalIntrinsicMetric:
    def test_k2(self):
        metric = dk.canonical_intrinsic_metric(dk.generate("complete", 2))
        assert metric.d[0, 1] == pytest.approx(1.0)

    def test_unit_path(self):
        metric = dk.canonical_intrinsic_metric(dk.generate("path", 3))
        assert metric.d[0, 1] == pytest.approx(math.sqrt(0.5))
        assert metric.d[0, 2] == pytest.approx(math.sqrt(2.0))

    def test_star(self):
        form = dk.build_form(
            ["c", "l1", "l2", "l3"], 1.0,
            [("c", "l1", 1.0), ("c", "l2", 1.0), ("c", "l3", 1.0)],
        )
        metric = dk.canonical_intrinsic_metric(form)
        i, j = form.space.index("l1"), form.space.index("l2")
        assert metric.d[i, j] == pytest.approx(2.0 / math.sqrt(3.0))

    def test_always_intrinsic(self):
        rng = rng_for(75)
        for _ in range(15):
            form = random_form(rng, int(rng.integers(1, 9)))
            metric = dk.canonical_intrinsic_metric(form)
            ok, slack = dk.is_intrinsic(form, metric)
            assert ok
            assert np.min(slack) >= -1e-9

    def test_requires_connected(self):
        with pytest.raises(NotConnected):
            dk.canonical_intrinsic_metric(dk.build_form(["a", "b"], 1.0, []))

    def test_exact_zero_slack_with_degree_measure(self):
        # m(x) = deg(x) makes all edge lengths exactly 1 and the hop metric
        # saturates every vertex bound with slack exactly zero
        form = dk.generate("cycle", 5)
        metric = dk.canonical_intrinsic_metric(
            dk.build_form(form.space.vertices, {v: 2.0 for v in form.space.vertices},
                          dict(form.b))
        )
        degree_form = dk.build_form(
            form.space.vertices, {v: 2.0 for v in form.space.vertices}, dict(form.b)
        )
        ok, slack = dk.is_intrinsic(degree_form, metric)
        assert ok
        assert np.max(np.abs(slack)) <= 1e-12


class TestPushforward:
    def test_identity_and_swap(self):
        space = dk.MeasureSpace(["a", "b"], 1.0)
        metric = dk.PseudoMetric(("a", "b"), np.array([[0.0, 3.0], [3.0, 0.0]]))
        ident = dk.OrderIso.identity(space)
        assert np.array_equal(dk.pushforward_metric(metric, ident).d, metric.d)
        swap = dk.OrderIso(space, space, {"a": "b", "b": "a"}, {"a": 1.0, "b": 1.0})
        assert np.array_equal(dk.pushforward_metric(metric, swap).d, metric.d)

    def test_rotation_permutes(self):
        space1 = dk.MeasureSpace(["v0", "v1", "v2"], 1.0)
        space2 = dk.MeasureSpace(["w0", "w1", "w2"], 1.0)
        d = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.5], [2.0, 1.5, 0.0]])
        metric = dk.PseudoMetric(space1.vertices, d)
        tau = {"w0": "v1", "w1": "v2", "w2": "v0"}
        iso = dk.OrderIso(space1, space2, tau, {y: 1.0 for y in tau})
        pushed = dk.pushforward_metric(metric, iso)
        assert pushed.d[0, 1] == d[1, 2]
        assert pushed.d[0, 2] == d[1, 0]

    def test_space_mismatch(self):
        space = dk.MeasureSpace(["a", "b"], 1.0)
        other = dk.PseudoMetric(("x", "y"), np.zeros((2, 2)))
        with pytest.raises(SpaceMismatch):
            dk.pushforward_metric(other, dk.OrderIso.identity(space))

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(st.lists(st.floats(0.0, 10.0), min_size=3, max_size=3))
    def test_preserves_axioms(self, sides):
        # clip into a valid triangle of distances, then push along a rotation
        a, b, c = sides
        a = min(a, b + c)
        b = min(b, a + c)
        c = min(c, a + b)
        d = np.array([[0.0, a, b], [a, 0.0, c], [b, c, 0.0]])
        space1 = dk.MeasureSpace(["v0", "v1", "v2"], 1.0)
        space2 = dk.MeasureSpace(["w0", "w1", "w2"], 1.0)
        metric = dk.PseudoMetric(space1.vertices, d)
        tau = {"w0": "v2", "w1": "v0", "w2": "v1"}
        iso = dk.OrderIso(space1, space2, tau, {y: 1.0 for y in tau})
        dk.pushforward_metric(metric, iso)  # constructor re-checks the axioms


class TestIntrinsicBijection:
    def test_identity(self):
        form = dk.generate("cycle", 4)
        report = dk.verify_intrinsic_bijection(dk.OrderIso.identity(form.space), form, form)
        assert report.verdict

    def test_relabeled_path_samples(self):
        rng = rng_for(76)
        form1 = random_form(rng, 6, recurrent=True)
        form2, iso = relabel_pair(rng, form1)
        report = dk.verify_intrinsic_bijection(iso, form1, form2)
        assert report.verdict
        names = [c.name for c in report.checks]
        assert "intrinsic_pushforward_canonical" in names
        assert "intrinsic_pushforward_inflated" in names

    def test_inflated_metric_fails_on_both_sides(self):
        form = dk.generate("cycle", 4)
        canonical = dk.canonical_intrinsic_metric(form)
        inflated = canonical.scaled(2.0)
        assert not dk.is_intrinsic(form, inflated).ok
        iso = dk.OrderIso.identity(form.space)
        assert not dk.is_intrinsic(form, dk.pushforward_metric(inflated, iso)).ok

    def test_boundary_rescaling_saturates(self):
        rng = rng_for(77)
        form = random_form(rng, 5, recurrent=True)
        boundary = boundary_rescaled(form, dk.canonical_intrinsic_metric(form))
        ok, slack = dk.is_intrinsic(form, boundary)
        assert ok
        assert np.min(np.abs(slack)) <= 1e-10

    def test_requires_recurrent(self):
        form = dk.build_form(["a", "b"], 1.0, [("a", "b", 1.0)], {"a": 1.0, "b": 0.0})
        partner, iso = dk.doob_pair(form, [1.0, 2.0])
        with pytest.raises(NotRecurrent):
            dk.verify_intrinsic_bijection(iso, form, partner)

    def test_default_samples_cover_both_classes(self):
        form = dk.generate("path", 4)
        samples = dict(default_metric_samples(form))
        assert dk.is_intrinsic(form, samples["zero"]).ok
        assert dk.is_intrinsic(form, samples["canonical"]).ok
        assert dk.is_intrinsic(form, samples["boundary"]).ok
        assert not dk.is_intrinsic(form, samples["inflated"]).ok
