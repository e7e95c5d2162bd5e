import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apstab import (Atom, BoundsSummary, DelayKernel, Density, DomainError, InfeasibleError,
                    QuasiPeriodicSignal, brute_force_feasibility, build_comparison_matrix,
                    certify_at_beta, certify_lemma1, check_pointwise_criterion, criterion_lhs,
                    derive_bounds, from_discrete_delays, maximize_beta, spectral_radius)
from apstab.catalog import TANH, periodic_network, scalar_atom, scalar_distributed
from apstab.certificate import beta_cap

import oracles


def atom(w):
    return DelayKernel((Atom(0.0, QuasiPeriodicSignal.constant(w)),))


def scalar_bounds(d=2.0, a=0.5, b=0.5):
    return BoundsSummary.from_arrays([d], [[a]], [1.0], [1.0], [[atom(b)]])


@st.composite
def bounds_st(draw, max_n=3):
    n = draw(st.integers(1, max_n))
    fl = st.floats(0.0, 1.0)
    d = [draw(st.floats(0.5, 3.0)) for _ in range(n)]
    a = [[draw(fl) for _ in range(n)] for _ in range(n)]
    kernels = [[DelayKernel((Atom(draw(st.floats(0, 1)), QuasiPeriodicSignal.constant(draw(fl))),),
                            (Density(QuasiPeriodicSignal.constant(draw(fl)), draw(st.integers(0, 2)),
                                     draw(fl), draw(st.floats(0.5, 3.0))),))
                for _ in range(n)] for _ in range(n)]
    tau = [[draw(st.floats(0.0, 2.0)) for _ in range(n)] for _ in range(n)]
    G = [draw(st.floats(0.1, 1.5)) for _ in range(n)]
    F = [draw(st.floats(0.1, 1.5)) for _ in range(n)]
    return BoundsSummary.from_arrays(d, a, G, F, kernels, tau)


class TestComparisonMatrix:
    def test_scalar_examples(self):
        b = scalar_bounds()
        assert build_comparison_matrix(b, 0.0).entries.tolist() == [[0.5]]
        assert build_comparison_matrix(b, 1.0).entries.tolist() == [[1.0]]

    def test_two_by_two_example(self):
        b = BoundsSummary.from_arrays([2.0, 2.0], [[0, 1], [1, 0]], [1, 1], [1, 1],
                                      [[DelayKernel()] * 2] * 2)
        assert build_comparison_matrix(b, 0.0).entries.tolist() == [[0, 0.5], [0.5, 0]]

    def test_domain(self):
        b = scalar_bounds()
        with pytest.raises(DomainError):
            build_comparison_matrix(b, 2.0)
        with pytest.raises(DomainError):
            build_comparison_matrix(b, -0.1)
        dist = derive_bounds(scalar_distributed())
        with pytest.raises(DomainError):
            build_comparison_matrix(dist, 1.99999 + 1e-5)

    @given(bounds_st(), st.floats(0, 1))
    def test_entries_nonnegative_and_monotone(self, b, frac):
        beta = frac * 0.9 * beta_cap(b)
        m0 = build_comparison_matrix(b, 0.0).entries
        m1 = build_comparison_matrix(b, beta).entries
        assert np.all(m0 >= 0) and np.all(m1 >= m0 - 1e-15)


class TestSpectralRadius:
    def test_examples(self):
        assert spectral_radius([[0.5]]) == 0.5
        assert spectral_radius([[0, 0.5], [0.5, 0]]) == pytest.approx(0.5, rel=1e-10)

    def test_random_4x4_against_charpoly(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            m = rng.uniform(0, 1, (4, 4)) * (rng.uniform(size=(4, 4)) < 0.7)
            ref = oracles.charpoly_spectral_radius(m)
            assert spectral_radius(m) == pytest.approx(ref, rel=1e-8, abs=1e-10)

    def test_reducible_and_cyclic(self):
        # permutation matrix: periodic, power iteration alone would oscillate
        perm = np.roll(np.eye(3), 1, axis=1) * 0.7
        assert spectral_radius(perm) == pytest.approx(0.7, rel=1e-8)
        tri = np.array([[0.3, 1.0, 0.0], [0.0, 0.6, 2.0], [0.0, 0.0, 0.2]])
        assert spectral_radius(tri) == pytest.approx(0.6, rel=1e-8)
        assert spectral_radius(np.zeros((4, 4))) == pytest.approx(0.0, abs=1e-10)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            spectral_radius([[0.0, -1.0], [1.0, 0.0]])

    @settings(max_examples=50)
    @given(st.integers(2, 5).flatmap(
        lambda n: st.lists(st.floats(0, 2), min_size=n * n, max_size=n * n)))
    def test_matches_eigensolver(self, flat):
        n = int(round(math.sqrt(len(flat))))
        m = np.array(flat).reshape(n, n)
        ref = float(np.max(np.abs(np.linalg.eigvals(m))))
        assert spectral_radius(m) == pytest.approx(ref, rel=1e-8, abs=1e-9)


class TestCertifyAtBeta:
    def test_scalar_examples(self):
        cert = certify_at_beta(scalar_bounds(), 0.0)
        assert cert.xi == (1.0,) and cert.eta == pytest.approx(1.0, rel=1e-15)
        assert certify_at_beta(scalar_bounds(), 1.0) is None

    def test_two_by_two_by_hand(self):
        b = BoundsSummary.from_arrays([1.0, 1.0], [[0.5, 0.25], [0.25, 0.5]], [1, 1], [1, 1],
                                      [[DelayKernel()] * 2] * 2)
        cert = certify_at_beta(b, 0.0)
        assert cert.xi == (1.0, 1.0)
        # (I - B) xi = 1 gives xi = 4; normalized slack is 1/4
        assert cert.eta == pytest.approx(0.25, rel=1e-14)
        assert np.all(criterion_lhs(b, cert.xi, 0.0) < 0)

    def test_zero_network_exact(self):
        d = [1.0, 2.5, 4.0]
        b = BoundsSummary.from_arrays(d, np.zeros((3, 3)), [1] * 3, [1] * 3,
                                      [[DelayKernel()] * 3] * 3)
        for beta in (0.0, 0.5, 0.999):
            cert = certify_at_beta(b, beta)
            assert cert.xi == (1.0, 1.0, 1.0)
            assert cert.eta == min(d) - beta

    @settings(max_examples=80, deadline=None)
    @given(bounds_st(), st.floats(0, 1))
    def test_witness_soundness(self, b, frac):
        beta = frac * 0.9 * beta_cap(b)
        cert = certify_at_beta(b, beta)
        if cert is None:
            return
        assert max(cert.xi) == 1.0 and min(cert.xi) > 0
        rows = oracles.criterion_rows(b.d_inf, b.a_sup, b.G, b.F, b.tau_sup, b.kappa(beta),
                                      cert.xi, beta)
        assert np.all(-rows >= cert.eta - 1e-12)
        assert cert.eta > 0

    @settings(max_examples=60, deadline=None)
    @given(bounds_st(), st.floats(0, 1), st.floats(0, 1))
    def test_monotone_in_beta(self, b, f1, f0):
        b1 = f1 * 0.9 * beta_cap(b)
        if certify_at_beta(b, b1) is not None:
            assert certify_at_beta(b, f0 * b1) is not None

    @given(bounds_st(), st.floats(0.01, 100))
    def test_slack_scales_linearly(self, b, c):
        cert = certify_at_beta(b, 0.0)
        if cert is None:
            return
        lhs = criterion_lhs(b, cert.xi, 0.0)
        np.testing.assert_allclose(criterion_lhs(b, c * cert.xi_array, 0.0), c * lhs,
                                   rtol=1e-12, atol=1e-12 * c)
        assert np.all(criterion_lhs(b, c * cert.xi_array, 0.0) < 0)


class TestMaximizeBeta:
    def test_closed_forms(self):
        assert maximize_beta(derive_bounds(scalar_atom())).beta == pytest.approx(1.0, abs=1e-6)
        ref = oracles.scalar_distributed_rate()
        assert maximize_beta(derive_bounds(scalar_distributed())).beta == pytest.approx(
            ref, abs=1e-6)

    def test_infeasible_at_zero(self):
        with pytest.raises(InfeasibleError):
            maximize_beta(scalar_bounds(a=3.0))

    def test_zero_network_reaches_cap(self):
        b = BoundsSummary.from_arrays([1.5], [[0.0]], [1], [1], [[DelayKernel()]])
        cert = maximize_beta(b)
        assert cert.beta == pytest.approx(1.5, abs=1e-6) and cert.beta < 1.5

    @settings(max_examples=25, deadline=None)
    @given(bounds_st())
    def test_result_is_near_supremum(self, b):
        try:
            cert = maximize_beta(b, tol=1e-6)
        except InfeasibleError:
            assert certify_at_beta(b, 0.0) is None
            return
        cap = beta_cap(b)
        above = min(cert.beta + 2e-6, cap * (1 - 1e-12))
        assert above >= cap * (1 - 1e-9) or certify_at_beta(b, above) is None


class TestBoundednessCertificate:
    def test_examples(self):
        b = BoundsSummary.from_arrays([2.0], [[0.5]], [1], [1], [[atom(0.5)]])
        cert = certify_lemma1(b, [1.0])
        assert cert.eta == 1.0
        b1 = derive_bounds(scalar_atom(inputs=1.0))
        b1 = BoundsSummary(b1.d_inf, np.array([[0.5]]), b1.tau_sup, b1.G, b1.F, b1.kernels,
                           1.0)
        assert certify_lemma1(b1, [1.0]).bound == 2.0
        bad = certify_lemma1(BoundsSummary.from_arrays([1.0], [[1.0]], [1], [1], [[atom(0.5)]]),
                             [1.0])
        assert bad.eta == -0.5 and bad.bound is None and not bad.holds


class TestPointwise:
    def test_constant_model_slack_equals_eta(self):
        m = scalar_atom()
        cert = maximize_beta(derive_bounds(m))
        rep = check_pointwise_criterion(m, cert, np.linspace(0, 10, 11))
        np.testing.assert_allclose(rep.slacks, cert.eta, rtol=0, atol=1e-15)
        assert rep.certificate.pointwise_checked

    def test_oscillating_self_inhibition(self):
        m = from_discrete_delays([QuasiPeriodicSignal(2.0, ((1.0, 1.0, 0.0),))], [[0.0]],
                                 [[0.5]], [[0.0]], [0.0], TANH, TANH)
        cert = certify_at_beta(derive_bounds(m), 0.0)
        grid = np.linspace(0, 2 * math.pi, 4001)
        rep = check_pointwise_criterion(m, cert, grid)
        assert rep.min_slack == pytest.approx(0.5, abs=1e-9)
        assert math.sin(rep.t_at_min) == pytest.approx(-1.0, abs=1e-6)

    def test_periodic_model_dominated_by_uniform_slack(self):
        m = periodic_network()
        cert = maximize_beta(derive_bounds(m))
        rep = check_pointwise_criterion(m, cert, np.linspace(0, 30, 3001))
        assert rep.min_slack >= cert.eta - 1e-12


class TestBruteForce:
    def test_scalar_agreement(self):
        assert brute_force_feasibility(scalar_bounds(), 0.0).feasible
        assert certify_at_beta(scalar_bounds(), 0.0) is not None

    def test_boundary_is_infeasible(self):
        for res in (5, 20, 60):
            assert not brute_force_feasibility(scalar_bounds(), 1.0, resolution=res).feasible

    def test_limited_size(self):
        b = BoundsSummary.from_arrays(np.ones(5), np.zeros((5, 5)), np.ones(5), np.ones(5),
                                      [[DelayKernel()] * 5] * 5)
        with pytest.raises(ValueError):
            brute_force_feasibility(b, 0.0)

    def test_near_boundary_instances(self):
        # rescale self-inhibition so rho sits just inside / outside the unit circle
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = 3
            a = rng.uniform(0, 1, (n, n))
            b = BoundsSummary.from_arrays(np.ones(n), a, np.ones(n), np.ones(n),
                                          [[DelayKernel()] * n] * n)
            rho = spectral_radius(build_comparison_matrix(b, 0.0).entries)
            for target in (1 - 1e-4, 1 + 1e-4):
                scaled = BoundsSummary.from_arrays(np.full(n, rho / target), a, np.ones(n),
                                                   np.ones(n), [[DelayKernel()] * n] * n)
                spectral = certify_at_beta(scaled, 0.0) is not None
                assert spectral == (target < 1)
                assert brute_force_feasibility(scaled, 0.0).feasible == spectral
