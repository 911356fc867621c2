#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest
import torch
from scipy.integrate import quad
from scipy.linalg import expm

from gnflow.dynamics import (DEMO_ADJACENCY, DEMO_INITIAL, DEMO_MATRIX, SINK_MATRIX, SystemSpec, TrajectoryBatch,
                             demo_system, make_system, read_batch, rk4_solve, sample_dataset, sawtooth_wave,
                             shifted_initials, sink_rhs, solve_system, split_batch, square_wave,
                             triangle_solution, triangle_wave, write_batch)
from gnflow.errors import ConfigError, DataError, NumericalError, ShapeError
from gnflow.graphs import DagMatrix, random_dag


class TestSystems:

    def test_sink_rhs_on_demo_graph(self):
        out = sink_rhs(0.0, DEMO_INITIAL, DEMO_ADJACENCY, DEMO_MATRIX)
        np.testing.assert_allclose(out, [[0.1, -1.3], [-2.35, -1.35], [2.31, 1.1]], atol=1e-12)

    def test_sink_rhs_root_ignores_children(self):
        out = sink_rhs(0.0, DEMO_INITIAL, DEMO_ADJACENCY, DEMO_MATRIX)
        np.testing.assert_allclose(out[0], DEMO_INITIAL[0] @ DEMO_MATRIX.T, rtol=0, atol=1e-15)

    def test_sink_rhs_shape_error(self):
        with pytest.raises(ShapeError):
            sink_rhs(0.0, np.zeros((2, 2)), DEMO_ADJACENCY, DEMO_MATRIX)

    @pytest.mark.parametrize("t,expected", [
        (0.0, 0.0), (math.pi / 2, math.pi / 2), (math.pi, math.pi), (1.5 * math.pi, math.pi / 2), (2 * math.pi, 0.0),
    ])
    def test_triangle_wave(self, t, expected):
        assert float(triangle_wave(t)) == pytest.approx(expected, abs=1e-12)

    def test_triangle_wave_is_integral_of_sign(self):
        for t in np.linspace(0.1, 20.0, 37):
            kinks = [k * math.pi for k in range(1, int(t / math.pi) + 1)]
            value, _ = quad(lambda u: np.sign(np.sin(u)), 0.0, t, points=kinks or None, limit=200)
            assert float(triangle_wave(t)) == pytest.approx(value, abs=1e-8)

    def test_sawtooth_and_square(self):
        np.testing.assert_allclose(sawtooth_wave([0.0, 2.25, 7.5]), [0.0, 0.25, 0.5])
        np.testing.assert_array_equal(square_wave([1.0, 4.0]), [1.0, -1.0])

    def test_triangle_closed_form(self):
        X0 = np.array([[1.0], [0.0], [0.0]])
        out = triangle_solution(math.pi, X0, DEMO_ADJACENCY)
        assert out.shape == (3, 1)
        np.testing.assert_allclose(out[:, 0], [1 + math.pi, math.pi - 0.5 * (1 + math.pi), 0.3 * math.pi],
                                   atol=1e-12)
        assert triangle_solution(np.array([0.0, 1.0]), X0, DEMO_ADJACENCY).shape == (2, 3, 1)

    def test_closed_form_rejects_negative_time(self):
        with pytest.raises(ConfigError):
            triangle_solution(-1.0, np.zeros((3, 1)), DEMO_ADJACENCY)

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            make_system("lorenz", 3, 0.5, 0)

    @pytest.mark.parametrize("kind", ["sink", "triangle", "square"])
    def test_permutation_equivariance(self, kind, rng):
        A = random_dag(4, 0.7, seed=5).numpy()
        P = np.eye(4)[rng.permutation(4)]
        spec = SystemSpec(kind, DagMatrix(A))
        permuted = SystemSpec(kind, DagMatrix(P @ A @ P.T))
        X0 = rng.uniform(-1, 1, size=(4, spec.d))
        times = np.array([0.3, 1.1, 2.0])
        left = solve_system(permuted, P @ X0, times)
        right = np.einsum("ij,tjc->tic", P, solve_system(spec, X0, times))
        np.testing.assert_allclose(left, right, atol=1e-10)


class TestSolver:

    def test_constant(self):
        out = rk4_solve(lambda t, x: np.zeros_like(x), np.array([1.5, -2.0]), [0.5, 3.0])
        np.testing.assert_array_equal(out, [[1.5, -2.0], [1.5, -2.0]])

    def test_exponential_decay(self):
        out = rk4_solve(lambda t, x: -x, np.array([1.0]), [1.0])
        assert abs(out[0, 0] - math.exp(-1.0)) <= 1e-9

    def test_sink_without_graph_matches_expm(self):
        A = np.zeros((3, 3))
        X0 = DEMO_INITIAL
        out = rk4_solve(lambda t, X: sink_rhs(t, X, A, SINK_MATRIX), X0, [0.5, 1.0])
        for i, t in enumerate([0.5, 1.0]):
            np.testing.assert_allclose(out[i], X0 @ expm(t * SINK_MATRIX.T), atol=1e-7)

    def test_non_finite_state(self):
        with pytest.raises(NumericalError):
            rk4_solve(lambda t, x: x * np.nan, np.array([1.0]), [0.1])

    def test_unsorted_times(self):
        with pytest.raises(ConfigError):
            rk4_solve(lambda t, x: x, np.array([1.0]), [1.0, 0.5])

    def test_sink_residual(self):
        spec, X0 = demo_system()
        t, delta = 0.7, 1e-4
        out = solve_system(spec, X0, np.array([t - delta, t, t + delta]))
        derivative = (out[2] - out[0]) / (2 * delta)
        np.testing.assert_allclose(derivative, sink_rhs(t, out[1], spec.adjacency_array(), DEMO_MATRIX), atol=1e-5)


class TestInteraction:
    """Three-node Sink example with and without its graph"""

    times = np.linspace(0.0, 2.0, 41)

    def _pair(self):
        spec, X0 = demo_system()
        plain = SystemSpec("sink", DagMatrix.zeros(3), DEMO_MATRIX.copy())
        return spec, plain, X0

    def test_root_unaffected_by_graph(self):
        spec, plain, X0 = self._pair()
        np.testing.assert_allclose(solve_system(spec, X0, self.times)[:, 0],
                                   solve_system(plain, X0, self.times)[:, 0], rtol=0, atol=1e-14)

    def test_independent_nodes_follow_shifted_trajectories(self):
        _, plain, X0 = self._pair()
        shifts = np.array([0.0, 0.5, 1.0])
        moved = solve_system(plain, shifted_initials(plain, X0, shifts), self.times)
        for j, tau in enumerate(shifts):
            reference = solve_system(plain, X0, self.times + tau)[:, j]
            np.testing.assert_allclose(moved[:, j], reference, atol=1e-9)

    def test_child_deviates_with_graph(self):
        spec, plain, X0 = self._pair()
        gap = np.abs(solve_system(spec, X0, self.times)[:, 2] - solve_system(plain, X0, self.times)[:, 2])
        assert gap.max() > 1e-2

    def test_shift_shape(self):
        _, plain, X0 = self._pair()
        with pytest.raises(ShapeError):
            shifted_initials(plain, X0, [0.0, 1.0])


class TestSampleDataset:

    def test_deterministic(self):
        spec = make_system("triangle", 4, 0.5, 3)
        a, b = sample_dataset(spec, 5, 8, seed=11), sample_dataset(spec, 5, 8, seed=11)
        assert torch.equal(a.values, b.values) and torch.equal(a.times, b.times)

    def test_ranges(self):
        batch = sample_dataset(make_system("sink", 3, 0.5, 1), 6, 10, seed=2)
        assert batch.values.shape == (6, 10, 3, 2)
        assert float(batch.times.min()) >= 0.0 and float(batch.times.max()) <= 10.0
        assert bool((batch.times[:, 1:] > batch.times[:, :-1]).all())
        assert float(batch.initial.min()) >= 0.0 and float(batch.initial.max()) <= 1.0
        assert bool(batch.mask.all())

    def test_workers_do_not_change_data(self):
        spec = make_system("square", 3, 0.5, 4)
        serial = sample_dataset(spec, 6, 5, seed=9, mask_rate=0.3)
        threaded = sample_dataset(spec, 6, 5, seed=9, mask_rate=0.3, workers=2)
        for name in ("times", "values", "mask", "initial"):
            assert torch.equal(getattr(serial, name), getattr(threaded, name)), name

    def test_single_observation(self):
        batch = sample_dataset(make_system("sawtooth", 2, 0.5, 0), 3, 1, seed=0)
        assert batch.N == 1

    def test_mask_rate(self):
        batch = sample_dataset(make_system("triangle", 5, 0.5, 0), 40, 20, seed=0, mask_rate=0.25)
        hidden = 1.0 - float(batch.mask.double().mean())
        assert 0.2 < hidden < 0.3

    @pytest.mark.parametrize("kwargs", [dict(samples=0), dict(mask_rate=1.0), dict(mask_rate=-0.1)])
    def test_invalid(self, kwargs):
        args = dict(samples=3, N=4, seed=0, mask_rate=0.0)
        args.update(kwargs)
        with pytest.raises(ConfigError):
            sample_dataset(make_system("triangle", 3, 0.5, 0), **args)


class TestTrajectoryBatch:

    def _parts(self):
        times = torch.tensor([[0.0, 1.0, 2.0]], dtype=torch.float64)
        values = torch.zeros(1, 3, 2, 1, dtype=torch.float64)
        mask = torch.ones(1, 3, 2, dtype=torch.bool)
        return times, values, mask, torch.zeros(1, 2, 1, dtype=torch.float64)

    def test_mask_shape(self):
        times, values, _, initial = self._parts()
        with pytest.raises(ShapeError):
            TrajectoryBatch(times, values, torch.ones(1, 3, 3, dtype=torch.bool), initial)

    def test_times_must_increase(self):
        _, values, mask, initial = self._parts()
        with pytest.raises(DataError):
            TrajectoryBatch(torch.tensor([[0.0, 1.0, 1.0]], dtype=torch.float64), values, mask, initial)

    def test_nan_only_where_masked(self):
        times, values, mask, initial = self._parts()
        values[0, 1, 0, 0] = float("nan")
        with pytest.raises(DataError):
            TrajectoryBatch(times, values, mask, initial)
        mask[0, 1, 0] = False
        assert TrajectoryBatch(times, values, mask, initial).n == 2


class TestSplit:

    def test_default_ratios(self):
        batch = sample_dataset(make_system("triangle", 3, 0.5, 0), 10, 4, seed=0)
        train, val, test = split_batch(batch, seed=5)
        assert (len(train), len(val), len(test)) == (6, 2, 2)
        seen = torch.cat([train.times, val.times, test.times])
        assert len({tuple(row.tolist()) for row in seen}) == 10

    def test_deterministic(self):
        batch = sample_dataset(make_system("triangle", 3, 0.5, 0), 10, 4, seed=0)
        assert torch.equal(split_batch(batch, seed=1)[0].times, split_batch(batch, seed=1)[0].times)

    @pytest.mark.parametrize("ratios", [(0.5, 0.5, 0.5), (0.8, 0.3, -0.1), (0.5, 0.5)])
    def test_bad_ratios(self, ratios):
        batch = sample_dataset(make_system("triangle", 3, 0.5, 0), 10, 4, seed=0)
        with pytest.raises(ConfigError):
            split_batch(batch, ratios)

    def test_too_few_samples(self):
        batch = sample_dataset(make_system("triangle", 3, 0.5, 0), 2, 4, seed=0)
        with pytest.raises(ConfigError):
            split_batch(batch)


class TestBatchFiles:

    def test_round_trip(self, tmp_path):
        batch = sample_dataset(make_system("sink", 3, 0.6, 2), 4, 5, seed=7, mask_rate=0.2)
        write_batch(tmp_path / "d.txt", batch)
        loaded = read_batch(tmp_path / "d.txt")
        for name in ("times", "values", "mask", "initial"):
            assert torch.equal(getattr(loaded, name), getattr(batch, name)), name
        assert torch.equal(loaded.adjacency.weights, batch.adjacency.weights)
        assert (loaded.kind, loaded.seed) == ("sink", 7)

    def test_rewrite_is_byte_identical(self, tmp_path):
        batch = sample_dataset(make_system("triangle", 3, 0.5, 0), 3, 4, seed=1)
        write_batch(tmp_path / "a.txt", batch)
        write_batch(tmp_path / "b.txt", read_batch(tmp_path / "a.txt"))
        assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()
        assert (tmp_path / "a.txt").read_text().splitlines()[0] == "gnflow-data-v1 triangle 3 1 4 3 1"

    def test_unknown_version(self, tmp_path):
        (tmp_path / "d.txt").write_text("gnflow-data-v0 triangle 3 1 4 3 1\n")
        with pytest.raises(DataError):
            read_batch(tmp_path / "d.txt")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            read_batch(tmp_path / "absent.txt")

    def test_bad_mask_bits(self, tmp_path):
        batch = sample_dataset(make_system("triangle", 2, 0.5, 0), 1, 2, seed=0)
        write_batch(tmp_path / "d.txt", batch)
        lines = (tmp_path / "d.txt").read_text().splitlines()
        lines[5] = "1,2"
        (tmp_path / "d.txt").write_text("\n".join(lines) + "\n")
        with pytest.raises(DataError):
            read_batch(tmp_path / "d.txt")
