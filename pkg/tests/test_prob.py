"""Probability core: frozen worked examples plus seeded invariant batteries.

Expected values for the worked examples are derived with exact Fraction
arithmetic inside the tests, independent of the library code paths.
"""

from fractions import Fraction

import numpy as np
import pytest

import delnet.prob as prob
from delnet.prob import (
    Distribution,
    EnumerationLimitError,
    InputError,
    JointModel,
    JointTable,
    Kernel,
    NullEvidenceError,
    Space,
    VariableSpec,
    compose,
    full_joint,
    marginal,
    posterior,
    product_space,
)


def signal_model(prior, rows, yname="y", bname="b"):
    y = Space.of_size(yname, len(prior))
    b = Space.of_size(bname, len(rows[0]))
    var = VariableSpec(bname, b, (yname,), Kernel(y, b, rows))
    return JointModel(y, Distribution(y, prior), (var,))


def exact_joint(prior, rows):
    """Fraction-exact joint cells P(y, b) = prior[y] * rows[y][b]."""
    return {
        (i, j): Fraction(prior[i]) * Fraction(rows[i][j])
        for i in range(len(prior))
        for j in range(len(rows[0]))
    }


class TestSpaces:
    def test_labels_and_indexing(self):
        sp = Space("y", ("lo", "hi"))
        assert sp.size == 2 and len(sp) == 2
        assert sp.index("hi") == 1
        assert sp.index(0) == 0

    def test_bad_spaces(self):
        with pytest.raises(InputError):
            Space("y", ())
        with pytest.raises(InputError):
            Space("y", ("a", "a"))
        with pytest.raises(InputError):
            Space("y", ("a",)).index("b")
        with pytest.raises(InputError):
            Space("y", ("a",)).index(3)

    def test_product_space_row_major(self):
        a = Space("a", ("a0", "a1"))
        b = Space("b", ("b0", "b1", "b2"))
        p = product_space("ab", [a, b])
        assert p.labels == ("a0|b0", "a0|b1", "a0|b2", "a1|b0", "a1|b1", "a1|b2")


class TestDistributionKernel:
    def test_distribution_validation(self):
        y = Space.of_size("y", 2)
        with pytest.raises(InputError):
            Distribution(y, [0.5, 0.6])
        with pytest.raises(InputError):
            Distribution(y, [1.2, -0.2])
        with pytest.raises(InputError):
            Distribution(y, [0.5, 0.5, 0.0])
        d = Distribution(y, [0.25, 0.75])
        assert d["y1"] == 0.75
        with pytest.raises(ValueError):
            d.probs[0] = 1.0  # frozen storage

    def test_kernel_validation(self):
        y, b = Space.of_size("y", 2), Space.of_size("b", 2)
        with pytest.raises(InputError):
            Kernel(y, b, [[0.5, 0.6], [0.5, 0.5]])
        with pytest.raises(InputError):
            Kernel(y, b, [[0.5, 0.5]])
        k = Kernel(y, b, [[0.8, 0.2], [0.3, 0.7]])
        assert k.row(1).probs[1] == pytest.approx(0.7, abs=0)

    def test_symmetric_kernel(self):
        sp = Space.of_size("m", 4)
        k = Kernel.symmetric(sp, 0.9)
        assert np.allclose(np.diag(k.rows), 0.9)
        assert np.allclose(k.rows.sum(axis=1), 1.0)
        one = Space.of_size("u", 1)
        assert Kernel.symmetric(one, 1.0).rows[0, 0] == 1.0
        with pytest.raises(InputError):
            Kernel.symmetric(one, 0.5)
        with pytest.raises(InputError):
            Kernel.symmetric(sp, 1.5)

    def test_deterministic_and_constant(self):
        a, b = Space.of_size("a", 3), Space.of_size("b", 2)
        k = Kernel.deterministic(a, b, [0, 1, 1])
        assert k.rows.tolist() == [[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]]
        c = Kernel.constant(a, Distribution(b, [0.4, 0.6]))
        assert np.allclose(c.rows, [[0.4, 0.6]] * 3)


class TestComposition:
    def test_worked_example(self):
        # ((0.9, 0.1), (0.2, 0.8)) then ((0.7, 0.3), (0.4, 0.6))
        y, m, z = (Space.of_size(n, 2) for n in "ymz")
        first = Kernel(y, m, [[0.9, 0.1], [0.2, 0.8]])
        second = Kernel(m, z, [[0.7, 0.3], [0.4, 0.6]])
        got = compose(first, second)
        exact = [
            [Fraction(9, 10) * Fraction(7, 10) + Fraction(1, 10) * Fraction(4, 10),
             Fraction(9, 10) * Fraction(3, 10) + Fraction(1, 10) * Fraction(6, 10)],
            [Fraction(2, 10) * Fraction(7, 10) + Fraction(8, 10) * Fraction(4, 10),
             Fraction(2, 10) * Fraction(3, 10) + Fraction(8, 10) * Fraction(6, 10)],
        ]
        assert exact == [[Fraction(67, 100), Fraction(33, 100)],
                         [Fraction(46, 100), Fraction(54, 100)]]
        assert np.allclose(got.rows, [[0.67, 0.33], [0.46, 0.54]], atol=1e-15)

    def test_identity_neutral(self):
        rng = np.random.default_rng(7)
        y, b = Space.of_size("y", 3), Space.of_size("b", 4)
        rows = rng.dirichlet(np.ones(4), size=3)
        k = Kernel(y, b, rows)
        assert np.allclose(compose(Kernel.identity(y), k).rows, rows)
        assert np.allclose(compose(k, Kernel.identity(b)).rows, rows)

    def test_associativity_battery(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            sizes = rng.integers(2, 5, size=4)
            sps = [Space.of_size(f"s{i}", int(n)) for i, n in enumerate(sizes)]
            ks = [Kernel(sps[i], sps[i + 1],
                         rng.dirichlet(np.ones(sps[i + 1].size), size=sps[i].size))
                  for i in range(3)]
            left = compose(compose(ks[0], ks[1]), ks[2])
            right = compose(ks[0], compose(ks[1], ks[2]))
            assert np.allclose(left.rows, right.rows, atol=1e-12)

    def test_shape_mismatch(self):
        y, b = Space.of_size("y", 2), Space.of_size("b", 3)
        k1 = Kernel(y, b, [[0.5, 0.2, 0.3], [0.1, 0.1, 0.8]])
        with pytest.raises(InputError):
            compose(k1, k1)


class TestFullJoint:
    def test_worked_example_cells(self):
        model = signal_model([0.6, 0.4], [[0.8, 0.2], [0.3, 0.7]])
        joint = full_joint(model)
        exact = exact_joint(["0.6", "0.4"], [["0.8", "0.2"], ["0.3", "0.7"]])
        assert exact == {(0, 0): Fraction(12, 25), (0, 1): Fraction(3, 25),
                         (1, 0): Fraction(3, 25), (1, 1): Fraction(7, 25)}
        want = np.array([[0.48, 0.12], [0.12, 0.28]])
        assert np.allclose(joint.table, want, atol=1e-15)
        assert joint.prob({"y": "y0", "b": "b1"}) == pytest.approx(0.12, abs=1e-15)

    def test_marginal_recovers_signal_law(self):
        model = signal_model([0.6, 0.4], [[0.8, 0.2], [0.3, 0.7]])
        m = marginal(full_joint(model), ["b"])
        assert np.allclose(m.table, [0.60, 0.40], atol=1e-15)

    def test_marginal_onto_everything_is_identity(self):
        model = signal_model([0.6, 0.4], [[0.8, 0.2], [0.3, 0.7]])
        joint = full_joint(model)
        same = marginal(joint, ["y", "b"])
        assert same.names == joint.names
        assert np.array_equal(same.table, joint.table)

    def test_marginals_commute_battery(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            y = Space.of_size("y", int(rng.integers(2, 4)))
            variables = []
            parents_pool = ["y"]
            sizes = {"y": y.size}
            for name in ("u", "v", "w"):
                sp = Space.of_size(name, int(rng.integers(2, 4)))
                n_par = int(rng.integers(1, len(parents_pool) + 1))
                chosen = list(rng.choice(parents_pool, size=n_par, replace=False))
                rows = rng.dirichlet(np.ones(sp.size),
                                     size=int(np.prod([sizes[p] for p in chosen])))
                variables.append(VariableSpec(
                    name, sp, tuple(chosen),
                    Kernel(Space.of_size("in", rows.shape[0]), sp, rows)))
                parents_pool.append(name)
                sizes[name] = sp.size
            model = JointModel(y, Distribution(y, rng.dirichlet(np.ones(y.size))),
                               tuple(variables))
            joint = full_joint(model)
            one_step = marginal(joint, ["y", "v"])
            two_step = marginal(marginal(joint, ["y", "u", "v"]), ["y", "v"])
            assert np.allclose(one_step.table, two_step.table, atol=1e-12)
            assert one_step.table.sum() == pytest.approx(1.0, abs=1e-12)

    def test_enumeration_cap(self):
        y = Space.of_size("y", 10)
        model = JointModel(y, Distribution.uniform(y), tuple(
            VariableSpec(f"v{i}", Space.of_size(f"v{i}", 10), ("y",),
                         Kernel.constant(y, Distribution.uniform(Space.of_size(f"v{i}", 10))))
            for i in range(7)
        ))
        with pytest.raises(EnumerationLimitError) as err:
            full_joint(model)
        assert err.value.size == 10 ** 8
        assert err.value.cap == prob.DEFAULT_CELL_CAP

    def test_cap_env_override(self, monkeypatch):
        monkeypatch.setenv(prob.CELL_CAP_ENV, "4")
        model = signal_model([0.5, 0.5], [[0.8, 0.2], [0.3, 0.7]])
        assert full_joint(model).table.size == 4
        monkeypatch.setenv(prob.CELL_CAP_ENV, "3")
        with pytest.raises(EnumerationLimitError):
            full_joint(model)
        monkeypatch.setenv(prob.CELL_CAP_ENV, "not-a-number")
        with pytest.raises(InputError):
            full_joint(model)

    def test_model_validation(self):
        y = Space.of_size("y", 2)
        b = Space.of_size("b", 2)
        k = Kernel(y, b, [[0.8, 0.2], [0.3, 0.7]])
        with pytest.raises(InputError):  # unknown parent
            JointModel(y, Distribution.uniform(y),
                       (VariableSpec("b", b, ("nope",), k),))
        with pytest.raises(InputError):  # duplicate names
            JointModel(y, Distribution.uniform(y),
                       (VariableSpec("y", b, ("y",), k),))
        with pytest.raises(InputError):  # wrong row count
            three = Space.of_size("t", 3)
            JointModel(y, Distribution.uniform(y),
                       (VariableSpec("t", three, ("y",),
                                     Kernel(three, three, np.eye(3))),))


class TestPosterior:
    def test_worked_example(self):
        # uniform prior, rows ((0.8, 0.2), (0.3, 0.7)), observe b = 0
        num0 = Fraction(1, 2) * Fraction(8, 10)
        num1 = Fraction(1, 2) * Fraction(3, 10)
        exact = (num0 / (num0 + num1), num1 / (num0 + num1))
        assert exact == (Fraction(8, 11), Fraction(3, 11))
        model = signal_model([0.5, 0.5], [[0.8, 0.2], [0.3, 0.7]])
        got = posterior(model, "y", {"b": "b0"})
        assert np.allclose(got.probs, [float(exact[0]), float(exact[1])], atol=1e-15)

    def test_accepts_indices_and_tables(self):
        model = signal_model([0.5, 0.5], [[0.8, 0.2], [0.3, 0.7]])
        joint = full_joint(model)
        a = posterior(model, "y", {"b": 0})
        b = posterior(joint, "y", {"b": "b0"})
        assert np.allclose(a.probs, b.probs, atol=0)

    def test_null_evidence_raises(self):
        model = signal_model([0.5, 0.5], [[1.0, 0.0], [1.0, 0.0]])
        with pytest.raises(NullEvidenceError):
            posterior(model, "y", {"b": "b1"})

    def test_no_evidence_returns_marginal(self):
        model = signal_model([0.6, 0.4], [[0.8, 0.2], [0.3, 0.7]])
        got = posterior(model, "b", {})
        assert np.allclose(got.probs, [0.6, 0.4], atol=1e-15)

    def test_posterior_mixture_returns_prior(self):
        # Averaging posteriors with the signal law recovers the prior exactly.
        rng = np.random.default_rng(3)
        for _ in range(20):
            ny, nb = int(rng.integers(2, 5)), int(rng.integers(2, 5))
            prior = rng.dirichlet(np.ones(ny))
            rows = rng.dirichlet(np.ones(nb), size=ny)
            model = signal_model(prior, rows)
            joint = full_joint(model)
            mix = np.zeros(ny)
            law = marginal(joint, ["b"]).table
            for j in range(nb):
                if law[j] > 0:
                    mix += law[j] * posterior(joint, "y", {"b": j}).probs
            assert np.allclose(mix, prior, atol=1e-12)

    def test_target_cannot_be_evidence(self):
        model = signal_model([0.5, 0.5], [[0.8, 0.2], [0.3, 0.7]])
        with pytest.raises(InputError):
            posterior(model, "b", {"b": 0})


class TestJointTable:
    def test_condition_and_dict(self):
        model = signal_model([0.6, 0.4], [[0.8, 0.2], [0.3, 0.7]])
        joint = full_joint(model)
        cond = joint.condition({"b": "b0"})
        assert cond.names == ("y",)
        assert np.allclose(cond.table, [0.8, 0.2], atol=1e-15)
        d = joint.as_dict()
        assert d[("y0", "b0")] == pytest.approx(0.48, abs=1e-15)
        assert len(d) == 4

    def test_validation(self):
        y = Space.of_size("y", 2)
        with pytest.raises(InputError):
            JointTable(("y",), (y,), np.array([0.7, 0.7]))
        with pytest.raises(InputError):
            JointTable(("y", "y"), (y, y), np.full((2, 2), 0.25))
        with pytest.raises(InputError):
            JointTable(("y",), (y,), np.array([[0.5, 0.5]]))
        joint = JointTable(("y",), (y,), np.array([0.5, 0.5]))
        with pytest.raises(InputError):
            joint.condition({"zz": 0})
        with pytest.raises(InputError):
            joint.condition({"y": 0})  # nothing would remain
        with pytest.raises(InputError):
            marginal(joint, [])
