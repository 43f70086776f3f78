import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from costboost import boosters as B
from costboost.core import CostSpec, Dataset, InputError
from costboost.datagen import SynthSpec, generate, random_dataset
from costboost.metrics import error_trace, exp_bound_trace
from costboost.numerics import golden_minimize
from costboost.weaklearn import StumpPool

CLAMP = 1e-12


def run(algo, ds, rounds=10, costs=(1.0, 1.0), **kw):
    return B.train(B.TrainConfig(algo, rounds, CostSpec(*costs), **kw), ds)


# --- goodness of a weak classifier ---------------------------------------

@pytest.mark.parametrize("eps,alpha", [(0.5, 0.0), (0.25, 0.5 * math.log(3.0)),
                                       (0.75, -0.5 * math.log(3.0))])
def test_alpha_from_error_values(eps, alpha):
    assert B.alpha_from_error(eps) == pytest.approx(alpha, abs=1e-12)


@given(st.floats(1e-6, 1.0 - 1e-6))
def test_alpha_from_error_antisymmetric(eps):
    a = B.alpha_from_error(eps)
    assert a == pytest.approx(-B.alpha_from_error(1.0 - eps), abs=1e-9)
    if abs(eps - 0.5) > 1e-12:
        assert (a > 0) == (eps < 0.5)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.5, 2.0])
def test_alpha_from_error_finite_at_extremes(eps):
    assert math.isfinite(B.alpha_from_error(eps))


# --- plain AdaBoost -------------------------------------------------------

def test_forced_geometry_first_round(four_points):
    model = run("adaboost", four_points, rounds=3)
    first = model.ensemble.members[0]
    assert first.stump.threshold == 2.5
    assert model.trace[0].epsilon == 0.0
    assert first.alpha == pytest.approx(0.5 * math.log((1 - CLAMP) / CLAMP))
    assert len(model.trace) == 3


def test_separable_single_round_normalizer():
    ds = Dataset(np.array([[3.0], [4.0], [0.0], [1.0]]), np.array([1, 1, -1, -1]))
    model = run("adaboost", ds, rounds=1)
    r = model.trace[0]
    assert r.train_error == 0.0
    # every example is correct, so the normalizer is exp(-alpha) = sqrt(clamp / (1 - clamp))
    assert r.z == pytest.approx(math.sqrt(CLAMP / (1 - CLAMP)), rel=1e-9)


def test_bound_dominates_training_error(noisy40):
    model = run("adaboost", noisy40, rounds=20)
    y = noisy40.labels
    f = np.zeros(noisy40.n)
    prod = 1.0
    for mem, r in zip(model.ensemble.members, model.trace):
        f += mem.alpha * mem.stump.predict(noisy40.features)
        err = np.mean(np.where(f >= 0, 1, -1) != y)
        eps = r.epsilon
        prod *= 2.0 * math.sqrt(eps * (1.0 - eps))
        assert err <= prod + 1e-12
        assert r.bound == pytest.approx(prod, rel=1e-9)


def test_weights_renormalized_each_round(noisy40):
    model = run("adaboost", noisy40, rounds=5, keep_weights=True)
    for w in model.weight_history:
        assert math.fsum(w) == pytest.approx(1.0, abs=1e-14)


# --- threshold tuning -----------------------------------------------------

def test_separable_scores_threshold_is_zero():
    scores = np.array([-2.0, -1.0, 1.0, 2.0])
    labels = np.array([-1, -1, 1, 1])
    for costs in [(1, 1), (5, 1), (1, 7)]:
        assert B.cost_minimizing_threshold(scores, labels, CostSpec(*costs)) == 0.0


def test_symmetric_tuning_is_noop_when_zero_is_optimal():
    ds = generate(SynthSpec("gaussian_blobs", 20, 20, seed=1, spread=0.3, separation=1.5))
    model = run("adaboost", ds, rounds=5)
    assert (model.ensemble.predict_batch(ds.features) == ds.labels).all()
    assert B.tune_threshold(model, ds, CostSpec()).threshold == 0.0


@given(st.integers(0, 10_000), st.floats(0.5, 4.0), st.floats(0.5, 4.0))
def test_threshold_matches_grid_search(seed, cp, cn):
    rng = np.random.default_rng(seed)
    scores = np.round(rng.normal(size=50), 2)
    labels = np.where(rng.random(50) < 0.4, 1, -1)
    labels[0], labels[1] = 1, -1
    spec = CostSpec(cp, cn)
    phi = B.cost_minimizing_threshold(scores, labels, spec)

    def cost(t):
        pred = scores >= t
        return (cp * np.sum(~pred & (labels == 1)) / np.sum(labels == 1)
                + cn * np.sum(pred & (labels == -1)) / np.sum(labels == -1))

    grid = np.linspace(-5.0, 5.0, 10_001)
    best_grid = min(cost(t) for t in grid)
    assert cost(phi) <= best_grid + 1e-12


def test_tune_threshold_rejects_empty_or_cost_vote(noisy40):
    csb = run("csb2", noisy40, rounds=3)
    with pytest.raises(InputError):
        B.tune_threshold(csb, noisy40, CostSpec())
    with pytest.raises(InputError):
        B.tune_threshold(run("adaboost", noisy40, 2), None, CostSpec())


def test_threshold_tuned_trainer_runs(noisy40):
    model = run("threshold_tuned", noisy40, rounds=10, costs=(3, 1))
    assert model.algorithm == "threshold_tuned"
    assert model.ensemble.cost_spec == CostSpec(3, 1)


@pytest.mark.parametrize("costs,expect", [((1, 1), 0.0), ((2, 1), math.log(0.5)),
                                          ((10, 5), math.log(0.5))])
def test_bayes_threshold(costs, expect):
    assert B.bayes_threshold(CostSpec(*costs)) == pytest.approx(expect, abs=1e-12)


# --- AsymBoost ------------------------------------------------------------

def test_asymboost_pre_emphasis_two_examples():
    ds = Dataset(np.array([[1.0], [0.0]]), np.array([1, -1]))
    model = run("asymboost", ds, rounds=2, costs=(4, 1), keep_weights=True)
    w0 = model.weight_history[0]
    expect = np.array([4 ** 0.25, 4 ** -0.25])
    assert np.allclose(w0, expect / expect.sum())
    assert w0 == pytest.approx([2 / 3, 1 / 3])


@given(st.integers(1, 50), st.floats(0.2, 9.0))
def test_asymboost_cumulative_factor(rounds, ratio):
    per_pos = ratio ** (1.0 / (2 * rounds))
    per_neg = ratio ** (-1.0 / (2 * rounds))
    assert per_pos ** rounds / per_neg ** rounds == pytest.approx(ratio, rel=1e-12)


def test_asymboost_equal_costs_is_adaboost(noisy40):
    a, b = run("adaboost", noisy40, 8), run("asymboost", noisy40, 8, costs=(3, 3))
    assert a.stump_indices == b.stump_indices and a.alphas == b.alphas


# --- AdaCost --------------------------------------------------------------

@pytest.mark.parametrize("c", [0.1, 0.5, 0.9])
def test_adacost_perfect_stump_closed_form(c):
    w = np.full(4, 0.25)
    y = np.array([1, 1, -1, -1])
    alpha, _ = B.adacost_alpha(w, y, y.copy(), np.full(4, c))
    assert alpha == pytest.approx(0.5 * math.log((1.5 - 0.5 * c) / (0.5 + 0.5 * c)))


def test_adacost_does_not_reduce_to_adaboost():
    w = np.full(4, 0.25)
    y = np.array([1, 1, -1, -1])
    h = np.array([1, 1, -1, 1])       # error 0.25
    alpha, _ = B.adacost_alpha(w, y, h, np.full(4, 0.5))
    assert not math.isclose(alpha, B.alpha_from_error(0.25))


def test_adacost_costly_mistake_grows_faster():
    w = np.full(2, 0.5)
    y = np.array([1, 1])
    h = np.array([-1, -1])
    cost = np.array([0.9, 0.2])
    alpha, beta = B.adacost_alpha(np.full(2, 0.5), np.array([1, 1]), np.array([1, 1]), cost)
    # use a positive goodness and the failure branch of beta for both examples
    beta_fail = 0.5 * (1.0 + cost)
    grown = w * np.exp(-alpha * y * h * beta_fail)
    assert grown[0] > grown[1]


def test_adacost_rejects_costs_above_one(noisy40):
    spec = CostSpec(1, 1, tuple([2.0] * noisy40.n))
    with pytest.raises(InputError):
        B.train(B.TrainConfig("adacost", 2, spec), noisy40)


# --- CSB family -----------------------------------------------------------

def test_csb0_two_example_update():
    w = np.array([2 / 3, 1 / 3])
    y = np.array([1, -1])
    h = np.array([1, 1])              # right on the positive only
    cost = np.array([2.0, 1.0])
    new = B.csb_update(w, y, h, cost, alpha=0.7, variant=0)
    assert np.allclose(new, [2 / 3, 1 / 3])
    assert np.allclose(new / new.sum(), [2 / 3, 1 / 3])


def test_csb1_ignores_alpha():
    w = np.array([0.2, 0.3, 0.5])
    y = np.array([1, -1, -1])
    h = np.array([-1, -1, 1])
    cost = np.array([3.0, 1.0, 1.0])
    a = B.csb_update(w, y, h, cost, alpha=0.1, variant=1)
    b = B.csb_update(w, y, h, cost, alpha=9.0, variant=1)
    assert np.array_equal(a, b)


def test_csb_init_is_cost_proportionate(noisy40):
    model = run("csb0", noisy40, 1, costs=(3, 1))
    w = model.initial_weights
    assert w[0] / w[-1] == pytest.approx(3.0)
    assert math.fsum(w) == pytest.approx(1.0)


def test_csb2_unit_costs_is_adaboost(noisy40):
    a, b = run("adaboost", noisy40, 8), run("csb2", noisy40, 8)
    assert a.stump_indices == b.stump_indices and a.alphas == b.alphas
    assert np.array_equal(a.ensemble.predict_batch(noisy40.features),
                          b.ensemble.predict_batch(noisy40.features))


def test_csb_is_not_scale_invariant(noisy40):
    # the cost factor only touches mistakes, so k * costs changes the emphasis
    a = run("csb0", noisy40, 6, costs=(2, 1), keep_weights=True)
    b = run("csb0", noisy40, 6, costs=(10, 5), keep_weights=True)
    assert not np.allclose(a.weight_history[-1], b.weight_history[-1])


# --- AdaC family ----------------------------------------------------------

def test_adac1_hand_computation():
    c = np.array([0.9, 0.3])
    d = np.array([0.5, 0.5])
    w1 = float(np.sum(c * d))
    eps = float(c[1] * d[1])
    assert (w1, eps) == pytest.approx((0.6, 0.15))
    assert B.adac_alpha(1, w1, None, eps) == pytest.approx(0.5 * math.log(1.3 / 0.7))
    assert B.adac_alpha(1, w1, None, eps) == pytest.approx(0.3095, abs=1e-4)


@given(st.floats(0.05, 1.0), st.floats(0.01, 0.49))
def test_adac2_constant_cost_cancels(c, eps0):
    assert B.adac_alpha(2, c, None, c * eps0) == pytest.approx(B.alpha_from_error(eps0),
                                                              rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("variant", [1, 2, 3])
def test_adac_unit_costs_collapse(variant):
    eps = 0.2
    assert B.adac_alpha(variant, 1.0, 1.0, eps) == pytest.approx(B.alpha_from_error(eps))


def test_adac_class_costs_scaled_into_unit_interval(noisy40):
    c = B.adac_costs(CostSpec(4, 2), noisy40)
    assert c.max() == 1.0 and c.min() == 0.5


# --- Cost-Sensitive AdaBoost ----------------------------------------------

def test_csa_alpha_matches_grid_oracle():
    cp, cn, b, dn, tp, tn = 2.0, 1.0, 0.1, 0.1, 0.5, 0.5
    alphas, _, _ = B.csa_alphas(cp, cn, [b], [dn], tp, tn)
    grid = np.linspace(0.0, 5.0, 1_000_001)
    best = grid[np.argmin(B.csa_loss(grid, cp, cn, b, dn, tp, tn))]
    assert alphas[0] == pytest.approx(best, abs=1e-5)


def test_csa_alpha_scale_free():
    a1, _, _ = B.csa_alphas(2.0, 1.0, [0.1], [0.05], 0.5, 0.5)
    a3, _, _ = B.csa_alphas(2.0, 1.0, [0.3], [0.15], 1.5, 1.5)
    assert a1[0] == pytest.approx(a3[0], abs=1e-12)


def test_csa_equal_costs_closed_form():
    eps_p, eps_n = 0.1, 0.15
    alphas, _, _ = B.csa_alphas(1.0, 1.0, [eps_p], [eps_n], 0.5, 0.5)
    assert alphas[0] == pytest.approx(B.alpha_from_error(eps_p + eps_n), abs=1e-13)


def test_csa_inadmissible_candidate_is_nan():
    alphas, _, _ = B.csa_alphas(2.0, 1.0, [0.4], [0.3], 0.5, 0.5)
    assert np.isnan(alphas[0])


@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.floats(0.05, 0.95),
       st.floats(0.0, 0.99), st.floats(0.0, 0.99))
def test_csa_alpha_is_a_stationary_point(cp, cn, tp, fb, fd):
    b, dn = fb * tp * 0.5, fd * (1 - tp) * 0.5
    alphas, b2, d2 = B.csa_alphas(cp, cn, [b], [dn], tp, 1 - tp)
    if np.isnan(alphas[0]):
        return
    a = alphas[0]
    lo = B.csa_loss(a, cp, cn, b2[0], d2[0], tp, 1 - tp)
    for da in (1e-4, -1e-4):
        if a + da >= 0:
            assert lo <= B.csa_loss(a + da, cp, cn, b2[0], d2[0], tp, 1 - tp) + 1e-12


def test_csa_update_direction(noisy40):
    model = run("cs_adaboost", noisy40, 3, costs=(2, 1), keep_weights=True)
    assert len(model.trace) == 3
    assert all(r.alpha > 0 for r in model.trace)


# --- AdaBoostDB -----------------------------------------------------------

def test_db_polynomial_coefficients():
    exps, coeffs = B.db_polynomial(2, 1, 0.6, 0.4, np.array([0.2]), np.array([0.3]))
    poly = dict(zip(exps, coeffs[0]))
    assert poly == pytest.approx({4: 0.12, 3: 0.12, 1: -0.28, 0: -0.48})


def test_db_root_matches_csa_alpha():
    a, b, ep, en = 0.6, 0.4, 0.2, 0.3
    exps, coeffs = B.db_polynomial(2, 1, a, b, np.array([ep]), np.array([en]))
    from costboost.numerics import positive_poly_root
    r = positive_poly_root(dict(zip(exps, coeffs[0])), tol=1e-15)
    # a and b already carry the class costs: a = C_P * A_P / (C_P * A_P + C_N * A_N)
    csa, _, _ = B.csa_alphas(2.0, 1.0, [a * ep / 2.0], [b * en / 1.0], a / 2.0, b / 1.0)
    assert math.log(r) == pytest.approx(csa[0], abs=1e-6)


def test_db_swapped_cost_order_matches_csa():
    exps, coeffs = B.db_polynomial(1, 3, 0.3, 0.7, np.array([0.1]), np.array([0.2]))
    from costboost.numerics import positive_poly_root
    r = positive_poly_root(dict(zip(exps, coeffs[0])), tol=1e-15)
    csa, _, _ = B.csa_alphas(1.0, 3.0, [0.03], [0.14 / 3.0], 0.3, 0.7 / 3.0)
    assert math.log(r) == pytest.approx(csa[0], abs=1e-9)


def test_db_contribution_condition():
    assert B.db_contributes(0.6, 0.4, 0.2, 0.3)
    assert not B.db_contributes(0.6, 0.4, 0.5, 0.5)
    assert not B.db_contributes(0.5, 0.5, 0.6, 0.4)


def test_db_selected_stumps_contribute(noisy40):
    model = run("adaboost_db", noisy40, 10, costs=(3, 1))
    assert all(r.alpha > 0 for r in model.trace)


def test_db_rejects_fractional_costs():
    with pytest.raises(InputError):
        B.TrainConfig("adaboost_db", 5, CostSpec(1.5, 1.0))


def test_db_stops_when_nothing_contributes():
    # XOR-like layout with equal costs and classes: every candidate sits at 1/2
    x = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    ds = Dataset(x, np.array([1, 1, -1, -1]))
    model = run("adaboost_db", ds, 5)
    assert model.trace == []
    assert model.stop_reason


# --- Cost-Generalized AdaBoost --------------------------------------------

def test_cga_equal_costs_balanced_is_adaboost():
    ds = random_dataset(30, 2, seed=5, n_pos=15)
    a, b = run("adaboost", ds, 10), run("cost_generalized", ds, 10, costs=(2, 2))
    assert a.stump_indices == b.stump_indices and a.alphas == b.alphas


def test_cga_initial_positive_mass():
    ds = random_dataset(30, 2, seed=6)
    model = run("cost_generalized", ds, 1, costs=(4, 1))
    assert model.trace[0].pos_mass == pytest.approx(0.8, abs=1e-15)


@given(st.integers(0, 1000), st.floats(0.1, 20.0))
def test_scale_invariant_algorithms(seed, k):
    ds = random_dataset(20, 2, seed)
    for algo in ("cost_generalized", "asymboost", "adac1", "adac2", "adac3", "adacost"):
        a = run(algo, ds, 6, costs=(3.0, 1.0))
        b = run(algo, ds, 6, costs=(3.0 * k, 1.0 * k))
        assert a.stump_indices == b.stump_indices, algo
        assert np.allclose(a.alphas, b.alphas, rtol=1e-9, atol=1e-12), algo


# --- properties shared by every variant -----------------------------------

@given(st.integers(0, 1000), st.sampled_from(["adaboost", "cost_generalized"]),
       st.floats(1.0, 5.0))
def test_bound_domination_property(seed, algo, cp):
    ds = random_dataset(24, 2, seed)
    model = run(algo, ds, 12, costs=(cp, 1.0))
    for r in model.trace:
        assert r.train_error <= r.bound * (1 + 1e-12) + 1e-15
    assert np.all(error_trace(model, ds) <= exp_bound_trace(model, ds) + 1e-12)


EMPHASIS_ALGOS = ["adaboost", "asymboost", "adacost", "csb0", "csb1", "csb2", "adac1",
                  "adac2", "adac3", "cs_adaboost", "adaboost_db", "cost_generalized"]


@pytest.mark.parametrize("algo", EMPHASIS_ALGOS)
def test_mistakes_gain_weight(algo):
    ds = random_dataset(30, 2, seed=21)
    model = run(algo, ds, 4, costs=(2.0, 1.0), keep_weights=True)
    cost = np.where(ds.positive, 2.0, 1.0)
    for t in range(len(model.trace) - 1):
        r, mem = model.trace[t], model.ensemble.members[t]
        if r.alpha <= 0:
            continue
        before, after = model.weight_history[t], model.weight_history[t + 1]
        h = mem.stump.predict(ds.features)
        wrong = h != ds.labels
        ratio = after / before
        for cls in (ds.positive, ~ds.positive):
            bad, good = wrong & cls, ~wrong & cls
            if bad.any() and good.any() and cost[cls][0] >= 1.0:
                assert ratio[bad].min() > ratio[good].max() * (1 - 1e-12) or algo == "csb0"


def test_every_algorithm_records_full_trace(noisy40):
    for algo in B.ALGORITHMS:
        costs = (2.0, 1.0)
        model = run(algo, noisy40, 5, costs=costs)
        assert 1 <= len(model.trace) <= 5
        assert [r.round for r in model.trace] == list(range(1, len(model.trace) + 1))


def test_config_validation():
    with pytest.raises(InputError):
        B.TrainConfig("nope", 5)
    with pytest.raises(InputError):
        B.TrainConfig("adaboost", 0)


def test_pool_mismatch_rejected(noisy40):
    other = random_dataset(10, 1, seed=3)
    with pytest.raises(InputError):
        B.train(B.TrainConfig("adaboost", 2), noisy40, StumpPool(other))


def test_golden_oracle_agrees_with_csa_bisection():
    loss = lambda a: float(B.csa_loss(a, 3.0, 1.0, 0.05, 0.1, 0.4, 0.6))  # noqa: E731
    alphas, _, _ = B.csa_alphas(3.0, 1.0, [0.05], [0.1], 0.4, 0.6)
    assert golden_minimize(loss, 0.0, 5.0, tol=1e-10) == pytest.approx(alphas[0], abs=1e-6)
