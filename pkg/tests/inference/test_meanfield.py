# SPDX-License-Identifier: GPL-3.0-or-later
"""
Tests for the mean field oracle.
"""

import csv
import itertools

import numpy as np
import pytest
from scipy.special import softmax

from triple_mrf.errors import InvalidParameterError, ShapeMismatchError
from triple_mrf.inference.meanfield import (
    PARALLEL,
    SEQUENTIAL,
    MfSchedule,
    mf_init,
    mf_update_cooccurrence,
    mf_update_generic,
    mf_update_triple,
    model_free_energy,
    reduce_to_cooccurrence,
    run_mf,
    write_trace_csv,
)
from triple_mrf.inference.pairwise import (
    CURRENT_Q,
    FIXED_UNARY,
    NO_KERNEL,
    CooccurrenceModel,
    DensePairwise,
    TriplePenaltyModel,
)
from triple_mrf.mrf.energy import distance
from triple_mrf.mrf.model import (
    ContextFilterBank,
    DistanceParams,
    PixelFeatureGrid,
    TripleWindow,
    UnaryField,
)


def scalar_update(q, model):
    """
    One parallel fixed-unary update written as plain loops over i, k, j and z.
    """
    p = model.unary.probabilities
    height, width, num_labels = p.shape
    costs = model.ctx.costs
    radius = model.ctx.radius
    window_radius = model.tw.radius

    def inside(row, col):
        return 0 <= row < height and 0 <= col < width

    def triple_sum(row, col, label):
        total = 0.0
        for dy in range(-window_radius, window_radius + 1):
            for dx in range(-window_radius, window_radius + 1):
                if (dy, dx) != (0, 0) and inside(row + dy, col + dx):
                    d = distance(model.feats, (row, col), (row + dy, col + dx), model.dp)
                    total += d * q[row + dy, col + dx, label]

        return p[row, col, label] * total

    updated = np.zeros_like(q)
    for row, col in itertools.product(range(height), range(width)):
        penalties = np.zeros(num_labels)
        for u in range(num_labels):
            component_costs = []
            for k in range(model.ctx.num_components):
                cost = 0.0
                for dy in range(-radius, radius + 1):
                    for dx in range(-radius, radius + 1):
                        if not inside(row + dy, col + dx):
                            continue

                        for v in range(num_labels):
                            cost += costs[k, u, dy + radius, dx + radius, v] * triple_sum(
                                row + dy, col + dx, v
                            )

                component_costs.append(cost)

            penalties[u] = min(component_costs)

        updated[row, col] = softmax(np.log(p[row, col]) - penalties)

    return updated


def symmetric_dense_model(rng, height, width, num_labels):
    psi = rng.normal(size=(height, width, height, width, num_labels, num_labels))
    psi = 0.5 * (psi + psi.transpose(2, 3, 0, 1, 5, 4))
    for row, col in itertools.product(range(height), range(width)):
        psi[row, col, row, col] = 0.0

    return DensePairwise(psi)


# MARK: Schedule


@pytest.mark.parametrize(
    "kwargs",
    [
        {"iterations": 0},
        {"iterations": 1.5},
        {"order": "random"},
        {"damping": -0.1},
        {"damping": 1.5},
    ],
)
def test_schedule_rejects_invalid_values(kwargs):
    with pytest.raises(InvalidParameterError):
        MfSchedule(**kwargs)


def test_schedule_defaults():
    schedule = MfSchedule()

    assert (schedule.iterations, schedule.order, schedule.damping) == (1, PARALLEL, 1.0)


# MARK: Triple Update


def test_zero_context_passes_unary_through(make_model):
    rng = np.random.default_rng(0)
    model = make_model(rng)
    zero = ContextFilterBank(np.zeros_like(model.ctx.costs))
    q = rng.dirichlet(np.ones(3), size=(5, 4))

    for order in (PARALLEL, SEQUENTIAL):
        updated = mf_update_triple(
            q, model.unary, zero, model.tw, model.feats, model.dp, MfSchedule(order=order)
        )
        np.testing.assert_allclose(updated, model.unary.probabilities, rtol=1e-12)


def test_single_pixel_returns_unary():
    unary = UnaryField(np.array([[[0.2, 0.3, 0.5]]]))
    ctx = ContextFilterBank(np.full((2, 3, 3, 3, 3), 4.0))
    feats = PixelFeatureGrid(np.array([[100.0]]))

    updated = mf_update_triple(
        mf_init(unary), unary, ctx, TripleWindow(5), feats, DistanceParams(1.0, 1.0)
    )

    np.testing.assert_allclose(updated, unary.probabilities, rtol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_update_matches_scalar_loops(make_model, seed):
    rng = np.random.default_rng(seed)
    model = make_model(rng, height=8, width=8, num_labels=3, num_components=2)
    q = rng.dirichlet(np.ones(3), size=(8, 8))

    updated = mf_update_triple(q, model.unary, model.ctx, model.tw, model.feats, model.dp)

    np.testing.assert_allclose(updated, scalar_update(q, model), rtol=1e-9, atol=1e-12)


def test_update_rows_are_distributions(make_model):
    rng = np.random.default_rng(3)
    model = make_model(rng, cost_scale=50.0)

    updated = mf_update_triple(
        mf_init(model.unary), model.unary, model.ctx, model.tw, model.feats, model.dp
    )

    assert np.all(updated >= 0.0)
    np.testing.assert_allclose(updated.sum(axis=-1), 1.0)


def test_current_q_matches_fixed_unary_on_first_pass(make_model):
    model = make_model(np.random.default_rng(8))
    q0 = mf_init(model.unary)
    args = (model.unary, model.ctx, model.tw, model.feats, model.dp)

    fixed = mf_update_triple(q0, *args, kernel_source=FIXED_UNARY)
    current = mf_update_triple(q0, *args, kernel_source=CURRENT_Q)

    np.testing.assert_array_equal(fixed, current)


def test_label_permutation_equivariance(make_model):
    rng = np.random.default_rng(12)
    model = make_model(rng)
    permutation = np.array([2, 0, 1])
    q = rng.dirichlet(np.ones(3), size=(5, 4))

    updated = mf_update_triple(q, model.unary, model.ctx, model.tw, model.feats, model.dp)

    permuted_costs = model.ctx.costs[:, permutation][..., permutation]
    permuted = mf_update_triple(
        q[..., permutation],
        UnaryField(model.unary.probabilities[..., permutation]),
        ContextFilterBank(permuted_costs),
        model.tw,
        model.feats,
        model.dp,
    )

    np.testing.assert_allclose(permuted, updated[..., permutation], rtol=1e-10)


def test_damping_mixes_with_previous_marginals(make_model):
    model = make_model(np.random.default_rng(6))
    q0 = mf_init(model.unary)
    args = (model.unary, model.ctx, model.tw, model.feats, model.dp)

    full = mf_update_triple(q0, *args)
    half = mf_update_triple(q0, *args, schedule=MfSchedule(damping=0.5))
    frozen = mf_update_triple(q0, *args, schedule=MfSchedule(damping=0.0))

    np.testing.assert_allclose(half, 0.5 * (full + q0), rtol=1e-12)
    np.testing.assert_allclose(frozen, q0, rtol=1e-12)


def test_update_rejects_mismatched_marginals(make_model):
    model = make_model(np.random.default_rng(1))

    with pytest.raises(ShapeMismatchError):
        mf_update_triple(
            np.full((4, 5, 3), 1 / 3), model.unary, model.ctx, model.tw, model.feats, model.dp
        )


# MARK: Co-occurrence Reduction


@pytest.mark.parametrize("seed", range(50))
def test_centre_tap_reduces_to_cooccurrence(make_model, seed):
    rng = np.random.default_rng(1000 + seed)
    num_labels = int(rng.integers(2, 5))
    model = make_model(
        rng,
        height=int(rng.integers(2, 7)),
        width=int(rng.integers(2, 7)),
        num_labels=num_labels,
        num_components=1,
        window=int(rng.choice([3, 5])),
        context_size=1,
    )
    q = rng.dirichlet(np.ones(num_labels), size=model.unary.shape)
    table = reduce_to_cooccurrence(model.ctx)
    args = (model.tw, model.feats, model.dp)

    triple = mf_update_triple(q, model.unary, model.ctx, *args)
    cooccurrence = mf_update_cooccurrence(q, model.unary, table, *args)

    np.testing.assert_allclose(triple, cooccurrence, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("shape", [(2, 3, 1, 1, 3), (1, 3, 3, 3, 3)])
def test_reduction_rejects_wider_banks(shape):
    with pytest.raises(ShapeMismatchError):
        reduce_to_cooccurrence(ContextFilterBank(np.zeros(shape)))


# MARK: Free Energy Descent


def test_run_mf_single_iteration_is_one_update(make_model):
    model = make_model(np.random.default_rng(4))
    triple = TriplePenaltyModel(model.unary, model.ctx, model.tw, model.feats, model.dp)
    q0 = mf_init(model.unary)

    q, trace = run_mf(q0, model.unary, triple, MfSchedule(iterations=1))

    np.testing.assert_array_equal(q, mf_update_generic(q0, model.unary, triple))
    assert trace == [model_free_energy(q, model.unary, triple)]


@pytest.mark.parametrize("seed", range(50))
def test_sequential_cooccurrence_never_increases_free_energy(make_model, seed):
    rng = np.random.default_rng(2000 + seed)
    model = make_model(rng, height=4, width=5)
    table = rng.normal(size=(3, 3))
    table = table + table.T
    cooccurrence = CooccurrenceModel(
        table, model.unary, model.tw, model.feats, model.dp, kernel_source=NO_KERNEL
    )
    q0 = mf_init(model.unary)
    start = model_free_energy(q0, model.unary, cooccurrence)

    _, trace = run_mf(q0, model.unary, cooccurrence, MfSchedule(iterations=5, order=SEQUENTIAL))

    values = [start] + trace
    for before, after in zip(values, values[1:]):
        assert after <= before + 1e-9


@pytest.mark.parametrize("seed", range(50))
def test_sequential_dense_never_increases_free_energy(seed):
    rng = np.random.default_rng(3000 + seed)
    unary = UnaryField(rng.dirichlet(np.ones(3), size=(3, 3)))
    dense = symmetric_dense_model(rng, 3, 3, 3)
    q0 = mf_init(unary)
    start = model_free_energy(q0, unary, dense)

    _, trace = run_mf(q0, unary, dense, MfSchedule(iterations=4, order=SEQUENTIAL))

    values = [start] + trace
    for before, after in zip(values, values[1:]):
        assert after <= before + 1e-9


def non_increasing(values):
    return all(after <= before + 1e-9 for before, after in zip(values, values[1:]))


def random_triple(make_model, seed, kernel_source):
    rng = np.random.default_rng(seed)
    model = make_model(
        rng,
        height=int(rng.integers(3, 9)),
        width=int(rng.integers(3, 9)),
        num_labels=int(rng.integers(2, 4)),
    )
    triple = TriplePenaltyModel(
        model.unary, model.ctx, model.tw, model.feats, model.dp, kernel_source=kernel_source
    )

    return model.unary, triple


@pytest.mark.parametrize("kernel_source", [FIXED_UNARY, CURRENT_Q])
def test_sequential_triple_descent_rate(make_model, kernel_source):
    outcomes = []
    for seed in range(60):
        unary, triple = random_triple(make_model, 4000 + seed, kernel_source)
        q0 = mf_init(unary)
        start = model_free_energy(q0, unary, triple)

        _, trace = run_mf(q0, unary, triple, MfSchedule(iterations=5, order=SEQUENTIAL))

        assert np.all(np.isfinite(trace))
        outcomes.append(non_increasing([start] + trace))

    rate = float(np.mean(outcomes))
    print(f"sequential {kernel_source}: {rate:.3f} of {len(outcomes)} runs non-increasing")
    # The triple update is not the coordinate minimiser of its free energy, so some runs rise.
    assert rate > 0.5


@pytest.mark.parametrize("kernel_source", [FIXED_UNARY, CURRENT_Q])
def test_parallel_triple_first_step_rate(make_model, kernel_source):
    lowered = []
    for seed in range(200):
        unary, triple = random_triple(make_model, 5000 + seed, kernel_source)
        q0 = mf_init(unary)
        start = model_free_energy(q0, unary, triple)

        _, trace = run_mf(q0, unary, triple, MfSchedule(iterations=1, order=PARALLEL))

        lowered.append(trace[0] < start)

    rate = float(np.mean(lowered))
    print(f"parallel {kernel_source}: {rate:.3f} of {len(lowered)} first steps lower F")
    assert rate > 0.5


def test_parallel_trace_is_finite(make_model):
    model = make_model(np.random.default_rng(5), cost_scale=5.0)
    triple = TriplePenaltyModel(model.unary, model.ctx, model.tw, model.feats, model.dp)

    _, trace = run_mf(mf_init(model.unary), model.unary, triple, MfSchedule(iterations=6))

    assert len(trace) == 6
    assert all(np.isfinite(trace))


# MARK: Trace CSV


def test_write_trace_csv(tmp_path):
    path = tmp_path / "traces" / "free_energy.csv"

    write_trace_csv([3.5, 1.25], path)

    with path.open(encoding="utf-8") as file:
        rows = list(csv.reader(file))

    assert rows == [["iter", "free_energy"], ["1", "3.5"], ["2", "1.25"]]
