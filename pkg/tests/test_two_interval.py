import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from delaybounds.errors import (
    AlphaOutOfRange,
    BudgetExhausted,
    DimensionMismatch,
    InfeasibleParams,
    UnsupportedSpace,
)
from delaybounds.function_spaces import VectorPolynomial, exact_energy, make_space
from delaybounds.single_interval import psd_check
from delaybounds.two_interval import (
    ERCParams,
    FMBParams,
    MERCParams,
    MLSRParams,
    RCCParams,
    SERCParams,
    SplitGeometry,
    WeightLadder,
    check_relation,
    convexified_bound,
    counterexample_search,
    dbbi_bound,
    dsfmb_bound,
    endpoint_matrix,
    erc_feasible,
    mlsr_from_serc,
    omega,
    omega_B,
    omega_erc,
    omega_F,
    omega_merc,
    omega_mlsr,
    omega_rcc,
    omega_serc,
    optimal_erc,
    optimal_fmb,
    optimal_merc,
    optimal_mlsr,
    optimal_rcc,
    optimal_serc,
    two_interval_moments,
)
from delaybounds.utils import symmetrize, trial_rng
from delaybounds.verification import ALPHA_GRID, random_erc, random_omega_params, random_rcc

seeds = st.integers(min_value=0, max_value=2**31)
alphas = st.floats(min_value=0.05, max_value=0.95)


@pytest.fixture
def ladder():
    return WeightLadder(np.array([[2.0, 0.5], [0.5, 1.0]]), 1)


def _zeros(ladder):
    return np.zeros((ladder.size, ladder.size))


class TestGeometry:
    def test_fractions(self):
        space = make_space("continuous", 1.0, 5.0)
        g = SplitGeometry.from_space(space, 2.0)
        assert (g.h, g.h1, g.h2) == (4.0, 1.0, 3.0)
        assert g.alpha + g.beta == 1.0
        assert g.alpha == 0.25

    def test_lengths_must_be_positive(self):
        with pytest.raises(AlphaOutOfRange):
            SplitGeometry(1.0, 0.0, 1.0)

    def test_ladder(self):
        ladder = WeightLadder(np.eye(1), 2)
        assert_allclose(ladder.matrix, np.diag([1.0, 3.0, 5.0]))
        assert_allclose(ladder.odd, [1.0, 3.0, 5.0])
        assert_allclose(ladder.matrix @ ladder.inverse, np.eye(3), atol=1e-14)
        assert_allclose(ladder.sqrt @ ladder.sqrt, ladder.matrix, atol=1e-12)


class TestBesselMatrix:
    def test_symmetric_split(self, ladder):
        Wl = ladder.matrix
        assert_allclose(omega_B(0.5, ladder), np.block([[2 * Wl, _zeros(ladder)], [_zeros(ladder), 2 * Wl]]))

    def test_quarter_split(self):
        assert_allclose(omega_B(0.25, WeightLadder(np.eye(1), 0)), np.diag([4.0, 4.0 / 3.0]))

    @pytest.mark.parametrize("alpha", [0.0, 1.0, 1e-9, -0.1])
    def test_singular_endpoints(self, alpha, ladder):
        with pytest.raises(AlphaOutOfRange):
            omega_B(alpha, ladder)


class TestConvexifiers:
    def test_zero_parameters(self, ladder):
        m1 = ladder.size
        zero = np.zeros((2 * m1, m1))
        assert not np.any(omega_F(SplitGeometry.from_alpha(0.3), FMBParams(zero, zero), ladder))
        assert not np.any(omega_mlsr(0.3, MLSRParams(zero, zero), ladder))

    def test_free_matrix_form_is_rescaled_mlsr(self, ladder, rng):
        m1 = ladder.size
        for alpha in (0.1, 0.5, 0.8):
            h = rng.uniform(0.5, 3.0)
            p = FMBParams(rng.normal(size=(2 * m1, m1)), rng.normal(size=(2 * m1, m1)))
            report = check_relation("A", p, alpha, ladder, h=h)
            assert report.holds
            assert report.residual <= 1e-12

    def test_erc_feasibility_examples(self, ladder):
        zero, Wl = _zeros(ladder), ladder.matrix
        assert erc_feasible(ERCParams(zero, zero, zero, zero), ladder).passed
        tight = erc_feasible(ERCParams(zero, zero, Wl, Wl), ladder)
        assert tight.passed
        assert abs(tight.min_eigenvalue) < 1e-10
        assert not erc_feasible(ERCParams(zero, zero, 2 * Wl, 2 * Wl), ladder).passed
        with pytest.raises(InfeasibleParams):
            omega_erc(0.5, ERCParams(zero, zero, 2 * Wl, 2 * Wl), ladder)

    def test_erc_special_cases(self, ladder):
        zero, Wl = _zeros(ladder), ladder.matrix
        assert_allclose(omega_erc(0.3, ERCParams(zero, zero, zero, zero), ladder),
                        np.block([[Wl, zero], [zero, Wl]]))
        Y = 0.5 * Wl
        assert_allclose(omega_erc(0.5, ERCParams(zero, zero, Y, Y), ladder),
                        omega_rcc(0.5, RCCParams(Y), ladder))

    def test_serc_and_merc_special_cases(self, ladder, rng):
        zero, Wl = _zeros(ladder), ladder.matrix
        alpha, beta = 0.3, 0.7
        expected = np.block([[(1 + beta) * Wl, zero], [zero, (1 + alpha) * Wl]])
        assert_allclose(omega_serc(alpha, SERCParams(zero, zero), ladder), expected)
        assert_allclose(omega_merc(alpha, MERCParams(zero), ladder), expected)
        assert_allclose(omega_merc(alpha, MERCParams(Wl), ladder), np.block([[Wl, Wl], [Wl, Wl]]), atol=1e-12)
        Y = rng.normal(size=Wl.shape)
        assert_allclose(omega_serc(alpha, SERCParams(Y, Y), ladder), omega_merc(alpha, MERCParams(Y), ladder),
                        atol=1e-12)

    def test_rcc_examples(self, ladder):
        zero, Wl = _zeros(ladder), ladder.matrix
        assert_allclose(omega_rcc(0.2, RCCParams(zero), ladder), np.block([[Wl, zero], [zero, Wl]]))
        assert_allclose(omega_rcc(0.2, RCCParams(Wl), ladder), omega_merc(0.2, MERCParams(Wl), ladder),
                        atol=1e-12)
        with pytest.raises(InfeasibleParams):
            omega_rcc(0.2, RCCParams(2 * Wl), ladder)

    def test_stacked_mlsr_reproduces_serc(self, ladder, rng):
        p = SERCParams(rng.normal(size=(4, 4)), rng.normal(size=(4, 4)))
        assert_allclose(omega_mlsr(0.4, mlsr_from_serc(p, ladder), ladder), omega_serc(0.4, p, ladder),
                        rtol=1e-12, atol=1e-12)

    def test_alpha_range_and_shapes(self, ladder):
        with pytest.raises(AlphaOutOfRange):
            omega_serc(1.5, SERCParams(_zeros(ladder), _zeros(ladder)), ladder)
        with pytest.raises(DimensionMismatch):
            omega_merc(0.5, MERCParams(np.zeros((3, 3))), ladder)
        with pytest.raises(DimensionMismatch):
            omega(0.5, FMBParams(None, None), ladder)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, order=st.integers(min_value=0, max_value=2), n=st.integers(min_value=1, max_value=2))
def test_bessel_matrix_dominates_every_convexifier(seed, order, n):
    rng = trial_rng(seed)
    A = rng.uniform(-1.0, 1.0, size=(n, n))
    ladder = WeightLadder(A.T @ A + 0.1 * np.eye(n), order)
    draws = random_omega_params(rng, ladder)
    for alpha in ALPHA_GRID[::3]:
        bessel = omega_B(alpha, ladder)
        for p in draws.values():
            assert psd_check(symmetrize(bessel - omega(alpha, p, ladder))).passed


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_endpoint_feasibility_covers_interior(seed):
    rng = trial_rng(seed)
    ladder = WeightLadder(np.array([[1.0, 0.2], [0.2, 0.5]]), 1)
    for p in (random_erc(rng, ladder), random_rcc(rng, ladder)):
        assert erc_feasible(p, ladder).passed
        for alpha in np.linspace(0.05, 0.95, 10):
            assert psd_check(symmetrize(endpoint_matrix(alpha, p, ladder))).passed


class TestBounds:
    def test_linear_function_is_tight_on_both_halves(self, unit_interval, linear_f):
        geometry, w = two_interval_moments(unit_interval, 0.5, 1, linear_f)
        ladder = WeightLadder(np.eye(2), 1)
        dbbi = dbbi_bound(w, omega_B(geometry.alpha, ladder), geometry.h)
        assert dbbi == pytest.approx(4.0 / 3.0, rel=1e-12)
        rcc = convexified_bound(w, omega_rcc(0.5, RCCParams(np.zeros((4, 4))), ladder), geometry.h)
        assert rcc <= 4.0 / 3.0

    def test_zero_function(self, unit_interval):
        f = VectorPolynomial.zeros(2)
        geometry, w = two_interval_moments(unit_interval, 0.3, 1, f)
        ladder = WeightLadder(np.eye(2), 1)
        alpha = geometry.alpha
        assert dbbi_bound(w, omega_B(alpha, ladder), geometry.h) == 0.0
        assert dsfmb_bound(w, omega_F(geometry, optimal_fmb(w, geometry, ladder), ladder), geometry.h) == 0.0
        assert convexified_bound(w, omega_rcc(alpha, optimal_rcc(w, ladder), ladder), geometry.h) == 0.0

    def test_discrete_spaces_are_not_split(self, linear_f):
        with pytest.raises(UnsupportedSpace):
            two_interval_moments(make_space("discrete", 0, 9), 4, 1, linear_f)

    def test_dimension_checks(self, unit_interval, linear_f):
        geometry, w = two_interval_moments(unit_interval, 0.5, 1, linear_f)
        with pytest.raises(DimensionMismatch):
            dbbi_bound(w, np.eye(3), geometry.h)

    @settings(max_examples=30, deadline=None)
    @given(seed=seeds, alpha=alphas)
    def test_optimal_parameters(self, seed, alpha):
        rng = trial_rng(seed)
        space = make_space("continuous", 0.0, 2.0)
        f = VectorPolynomial(rng.uniform(-1.0, 1.0, size=(2, 5)))
        W = np.array([[1.0, 0.3], [0.3, 0.8]])
        ladder = WeightLadder(W, 1)
        geometry, w = two_interval_moments(space, 2.0 * alpha, 1, f)
        a, h = geometry.alpha, geometry.h
        energy = exact_energy(space, f, W)
        dbbi = dbbi_bound(w, omega_B(a, ladder), h)
        mlsr = convexified_bound(w, omega_mlsr(a, optimal_mlsr(w, a, ladder), ladder), h)
        dsfmb = dsfmb_bound(w, omega_F(geometry, optimal_fmb(w, geometry, ladder), ladder), h)
        serc = convexified_bound(w, omega_serc(a, optimal_serc(w, a, ladder), ladder), h)
        erc = convexified_bound(w, omega_erc(a, optimal_erc(w, a, ladder), ladder), h)
        merc = convexified_bound(w, omega_merc(a, optimal_merc(w, a, ladder), ladder), h)
        rcc = convexified_bound(w, omega_rcc(a, optimal_rcc(w, ladder), ladder), h)

        assert dbbi <= energy * (1 + 1e-9)
        for value in (mlsr, dsfmb, serc, erc):
            assert value == pytest.approx(dbbi, rel=1e-8)
        assert rcc <= merc * (1 + 1e-9) and merc <= serc * (1 + 1e-9)

        Wl = ladder.matrix
        m1 = ladder.size
        na = np.sqrt(w.stacked[:m1] @ Wl @ w.stacked[:m1])
        nb = np.sqrt(w.stacked[m1:] @ Wl @ w.stacked[m1:])
        assert rcc == pytest.approx((na + nb) ** 2 / h, rel=1e-9)


class TestRelations:
    def test_identity_relations_on_zero_parameters(self, ladder):
        zero = _zeros(ladder)
        m1 = ladder.size
        assert check_relation("A", FMBParams(np.zeros((2 * m1, m1)), np.zeros((2 * m1, m1))), 0.5, ladder).holds
        report = check_relation("E", RCCParams(zero), 0.3, ladder)
        assert report.holds
        assert report.min_eigenvalue >= 0.0

    def test_forward_constructions(self, ladder, rng):
        p = SERCParams(rng.normal(size=(4, 4)), rng.normal(size=(4, 4)))
        assert check_relation("B", p, 0.6, ladder, search=False).holds
        assert check_relation("D", MERCParams(rng.normal(size=(4, 4))), 0.6, ladder, search=False).holds

    @settings(max_examples=30, deadline=None)
    @given(seed=seeds, alpha=alphas)
    def test_erc_below_serc_and_rcc_below_merc(self, seed, alpha):
        rng = trial_rng(seed)
        ladder = WeightLadder(np.array([[1.5, -0.4], [-0.4, 1.0]]), 1)
        report = check_relation("C", random_erc(rng, ladder), alpha, ladder)
        assert report.holds
        assert check_relation("E", random_rcc(rng, ladder), alpha, ladder).holds

    def test_unknown_relation(self, ladder):
        with pytest.raises(ValueError):
            check_relation("F", None, 0.5, ladder)


class TestCounterexamples:
    @pytest.mark.parametrize("kind", ["B", "D"])
    @pytest.mark.parametrize("order", [0, 1])
    def test_witness_is_found(self, kind, order):
        witness = counterexample_search(kind, 7, 10_000, WeightLadder(np.eye(1), order))
        assert witness.negative_value <= -1e-6
        assert witness.positive_value >= 1e-6
        assert witness.sweep_size == 50
        if kind == "B":
            assert 1.0 - 1e-3 <= witness.alpha < 1.0
        else:
            assert witness.alpha == 1.0
        record = witness.to_record()
        assert record["kind"] == kind
        assert len(record["y1"]) == 2 * (order + 1)

    def test_reverse_relation_reports_witness(self):
        ladder = WeightLadder(np.eye(1), 0)
        p = SERCParams(np.array([[0.3]]), np.array([[-0.2]]))
        report = check_relation("B", p, 0.5, ladder, seed=7, budget=100)
        assert report.holds
        assert report.witness is not None

    def test_empty_budget(self):
        with pytest.raises(BudgetExhausted):
            counterexample_search("B", 7, 0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            counterexample_search("C", 7, 10)
