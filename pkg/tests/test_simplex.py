"""Phase-1 solver: cross-checked against scipy.optimize.linprog.

scipy is a test-only dependency used as an independent oracle; the library
itself never imports it.
"""

import numpy as np
import pytest
from scipy.optimize import linprog

from delnet.prob import InputError
from delnet.simplex import FEAS_TOL, solve_equality_feasibility


def scipy_feasible(A, b):
    res = linprog(c=np.zeros(A.shape[1]), A_eq=A, b_eq=b,
                  bounds=[(0, None)] * A.shape[1], method="highs")
    return res.status == 0


def check_result(A, b, result):
    if result.feasible:
        x = result.x
        assert x.min() >= 0.0
        assert np.abs(A @ x - b).max() <= 1e-7
    else:
        y = result.farkas
        assert (y @ A).max() <= 1e-7
        assert y @ b > FEAS_TOL / 10


class TestKnownSystems:
    def test_simple_feasible(self):
        A = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
        b = np.array([1.0, 1.0])
        res = solve_equality_feasibility(A, b)
        assert res.feasible
        check_result(A, b, res)

    def test_simple_infeasible(self):
        # x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
        A = np.array([[1.0, 1.0], [1.0, 1.0]])
        b = np.array([1.0, 2.0])
        res = solve_equality_feasibility(A, b)
        assert not res.feasible
        check_result(A, b, res)

    def test_negative_rhs_handled(self):
        A = np.array([[-1.0, 0.0], [0.0, 1.0]])
        b = np.array([-0.5, 0.25])
        res = solve_equality_feasibility(A, b)
        assert res.feasible
        check_result(A, b, res)

    def test_sign_infeasible(self):
        # x >= 0 cannot give a negative sum.
        A = np.array([[1.0, 1.0]])
        b = np.array([-1.0])
        res = solve_equality_feasibility(A, b)
        assert not res.feasible
        check_result(A, b, res)

    def test_input_validation(self):
        with pytest.raises(InputError):
            solve_equality_feasibility(np.ones((2, 2)), np.ones(3))
        with pytest.raises(InputError):
            solve_equality_feasibility(np.array([[np.nan, 1.0]]), np.ones(1))


class TestAgainstScipy:
    def test_random_systems(self):
        rng = np.random.default_rng(42)
        agree_feasible = agree_infeasible = 0
        for _ in range(120):
            m, n = int(rng.integers(1, 7)), int(rng.integers(1, 9))
            A = rng.normal(size=(m, n))
            if rng.random() < 0.5:
                # Force feasibility by construction.
                x0 = rng.uniform(0, 1, size=n)
                b = A @ x0
            else:
                b = rng.normal(size=m)
            res = solve_equality_feasibility(A, b)
            assert res.feasible == scipy_feasible(A, b)
            check_result(A, b, res)
            agree_feasible += res.feasible
            agree_infeasible += not res.feasible
        assert agree_feasible >= 40 and agree_infeasible >= 20

    def test_garbling_shaped_systems(self):
        # The exact block structure used by the dominance check: channel
        # columns must reproduce a target kernel and stay row-stochastic.
        rng = np.random.default_rng(43)
        for _ in range(60):
            ny = int(rng.integers(2, 5))
            nt = int(rng.integers(2, 5))
            ns = int(rng.integers(2, 5))
            KT = rng.dirichlet(np.ones(nt), size=ny)
            if rng.random() < 0.5:
                G = rng.dirichlet(np.ones(ns), size=nt)
                KS = KT @ G  # feasible by construction
            else:
                KS = rng.dirichlet(np.ones(ns), size=ny)
            A = np.zeros((ny * ns + nt, nt * ns))
            bvec = np.zeros(ny * ns + nt)
            for y in range(ny):
                for s in range(ns):
                    row = y * ns + s
                    for t in range(nt):
                        A[row, t * ns + s] = KT[y, t]
                    bvec[row] = KS[y, s]
            for t in range(nt):
                A[ny * ns + t, t * ns:(t + 1) * ns] = 1.0
                bvec[ny * ns + t] = 1.0
            res = solve_equality_feasibility(A, bvec)
            assert res.feasible == scipy_feasible(A, bvec)
            check_result(A, bvec, res)
