#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest
import torch
from torch import nn

from gnflow.diffcore import make_rng
from gnflow.dynamics import TrajectoryBatch
from gnflow.errors import ConfigError, DataError, ShapeError
from gnflow.flows import ResnetFlow
from gnflow.latent import (GaussianParams, HiddenStatePair, LatentFilter, LatentSmoother, evolve_hidden,
                           gaussian_kl, gaussian_nll)
from gnflow.latent.smoothing import observed_graph_features
from gnflow.training import build_model, prepare_data, train_gneuralflow

from conftest import tiny_config


def _scalar(mu, sigma):
    return GaussianParams(torch.tensor([mu], dtype=torch.float64), torch.tensor([math.log(sigma)], dtype=torch.float64))


class TestGaussian:

    def test_kl_of_identical_is_zero(self, rng):
        q = GaussianParams(torch.from_numpy(rng.normal(size=(3, 4))), torch.from_numpy(rng.normal(size=(3, 4))))
        assert float(gaussian_kl(q, q).abs().max()) == 0.0

    def test_kl_unit_shift(self):
        assert float(gaussian_kl(_scalar(1.0, 1.0))) == pytest.approx(0.5, abs=1e-15)

    def test_kl_closed_form_and_monte_carlo(self):
        q, p = _scalar(0.3, 0.5), _scalar(-0.2, 1.5)
        expected = math.log(1.5 / 0.5) + (0.25 + 0.25) / (2 * 2.25) - 0.5
        value = float(gaussian_kl(q, p))
        assert value == pytest.approx(expected, abs=1e-12)
        z = np.random.default_rng(0).normal(0.3, 0.5, size=200_000)
        log_q = -0.5 * ((z - 0.3) / 0.5) ** 2 - math.log(0.5)
        log_p = -0.5 * ((z + 0.2) / 1.5) ** 2 - math.log(1.5)
        assert float(np.mean(log_q - log_p)) == pytest.approx(value, abs=1e-2)

    def test_kl_non_negative(self, rng):
        q = GaussianParams(torch.from_numpy(rng.normal(size=500)), torch.from_numpy(rng.normal(size=500)))
        p = GaussianParams(torch.from_numpy(rng.normal(size=500)), torch.from_numpy(rng.normal(size=500)))
        assert bool((gaussian_kl(q, p) >= 0).all())

    def test_nll(self):
        assert float(gaussian_nll(torch.zeros(1, dtype=torch.float64), _scalar(0.0, 1.0))) == \
            pytest.approx(0.5 * math.log(2 * math.pi))
        assert float(gaussian_nll(torch.tensor([3.0], dtype=torch.float64), _scalar(1.0, 2.0))) == \
            pytest.approx(0.5 * math.log(2 * math.pi) + math.log(2.0) + 0.5)

    def test_from_head(self):
        g = GaussianParams.from_head(torch.arange(8, dtype=torch.float64).reshape(2, 4))
        assert g.mu.tolist() == [[0.0, 1.0], [4.0, 5.0]]
        with pytest.raises(ShapeError):
            GaussianParams.from_head(torch.zeros(2, 3, dtype=torch.float64))

    def test_sample_moments(self):
        g = _scalar(2.0, 0.5)
        eps = torch.from_numpy(np.random.default_rng(1).standard_normal(100_000))
        z = g.sample(eps)
        assert float(z.mean()) == pytest.approx(2.0, abs=1e-2)
        assert float(z.std()) == pytest.approx(0.5, abs=1e-2)


class TestEvolveHidden:

    def test_zero_elapsed_with_selector_projection(self, rng):
        h = 3
        flow = ResnetFlow(2 * h, hidden=8, use_graph=False, rng=make_rng(0, 10))
        proj = nn.Linear(2 * h, h, bias=False, dtype=torch.float64)
        with torch.no_grad():
            proj.weight.copy_(torch.cat([torch.eye(h), torch.zeros(h, h)], dim=1))
        pair = HiddenStatePair(torch.from_numpy(rng.normal(size=(2, 4, h))), torch.from_numpy(rng.normal(size=(2, 4, h))))
        times = torch.tensor([0.5, 2.0], dtype=torch.float64)
        out = evolve_hidden(pair, times, times, flow, proj)
        np.testing.assert_allclose(out.detach().numpy(), pair.H.numpy(), rtol=0, atol=1e-15)

    def test_backwards_time_rejected(self):
        flow = ResnetFlow(2, hidden=4, use_graph=False)
        with pytest.raises(ConfigError):
            evolve_hidden(HiddenStatePair.zeros(1, 2, 2, paired=False), 1.0, 0.5, flow, nn.Identity())


def _first_epochs_val_losses(task):
    config = tiny_config(task=task, graph="truth", nodes=5, samples=30, times=10, mask_rate=0.3,
                         epochs=20, patience=20, batch_size=50, lr=3e-3, seed=4)
    data = prepare_data(config)
    result = train_gneuralflow(config, (data.train, data.val))
    return [row["val_loss"] for row in result.history]


def _strictly_decreasing(losses):
    return all(math.isfinite(b) and b < a for a, b in zip(losses, losses[1:]))


def _batch(S=2, N=4, n=3, mask=None, seed=0):
    rng = np.random.default_rng(seed)
    times = np.sort(rng.uniform(0, 5, size=(S, N)), axis=1)
    values = rng.uniform(-1, 1, size=(S, N, n, 1))
    mask = np.ones((S, N, n), dtype=bool) if mask is None else mask
    return TrajectoryBatch(torch.from_numpy(times), torch.from_numpy(values), torch.from_numpy(mask),
                           torch.from_numpy(values[:, 0].copy()))


class TestSmoother:

    def test_shapes(self, demo_adjacency):
        model = build_model(tiny_config(task="smoothing"), 3, 1, truth=demo_adjacency)
        assert isinstance(model, LatentSmoother)
        batch = _batch()
        q = model.smooth_encode(batch)
        assert q.mu.shape == (2, 3, 4)
        assert bool((q.sigma > 0).all())
        assert model.predict(batch).shape == batch.values.shape
        assert math.isfinite(float(model.task_loss(batch)))

    def test_hidden_width_follows_graph(self, demo_adjacency):
        paired = build_model(tiny_config(task="smoothing", graph="truth"), 3, 1, truth=demo_adjacency)
        single = build_model(tiny_config(task="smoothing", graph="none"), 3, 1)
        assert paired.g_proj.in_features == 8 and single.g_proj.in_features == 4
        assert math.isfinite(float(single.task_loss(_batch())))

    def test_unobserved_sample(self):
        mask = np.ones((2, 4, 3), dtype=bool)
        mask[1] = False
        model = build_model(tiny_config(task="smoothing", graph="none"), 3, 1)
        with pytest.raises(DataError):
            model.smooth_encode(_batch(mask=mask))

    def test_single_observation(self):
        model = build_model(tiny_config(task="smoothing", graph="none"), 3, 1)
        batch = _batch(N=1)
        q = model.smooth_encode(batch)
        zeros = torch.zeros(6, 4, dtype=torch.float64)
        H, _ = model.lstm1(batch.values[:, 0].reshape(6, 1), (zeros, zeros))
        expected = GaussianParams.from_head(model.g(H.reshape(2, 3, 4)))
        np.testing.assert_allclose(q.mu.detach().numpy(), expected.mu.detach().numpy(), atol=1e-14)
        np.testing.assert_allclose(q.log_sigma.detach().numpy(), expected.log_sigma.detach().numpy(), atol=1e-14)

    def test_masked_nodes_leave_graph_features(self, demo_adjacency):
        model = build_model(tiny_config(task="smoothing", graph="truth"), 3, 1, truth=demo_adjacency)
        x = torch.ones(2, 3, 1, dtype=torch.float64)
        mask = torch.tensor([[True, False, True], [False, True, True]])
        out = observed_graph_features(model.gcn, model.adjacency.a_hat(), x, mask, True)
        assert bool((out[~mask] == 0).all())

    def test_backward_encoder(self, demo_adjacency):
        forward = build_model(tiny_config(task="smoothing"), 3, 1, truth=demo_adjacency)
        backward = build_model(tiny_config(task="smoothing", encoder_direction="backward"), 3, 1,
                               truth=demo_adjacency)
        batch = _batch()
        q_f, q_b = forward.smooth_encode(batch), backward.smooth_encode(batch)
        assert bool(torch.isfinite(q_b.mu).all())
        assert not torch.equal(q_f.mu, q_b.mu)

    def test_elbo_gradient_with_fixed_noise(self, demo_adjacency):
        model = build_model(tiny_config(task="smoothing", graph="truth"), 3, 1, truth=demo_adjacency)
        batch = _batch()
        bias = model.g.bias
        loss = model.elbo_loss(batch, 2, make_rng(0, 5))
        (analytic,) = torch.autograd.grad(loss, [bias])
        eps = 1e-6
        for k in (0, 5):
            with torch.no_grad():
                bias[k] += eps
                up = float(model.elbo_loss(batch, 2, make_rng(0, 5)))
                bias[k] -= 2 * eps
                down = float(model.elbo_loss(batch, 2, make_rng(0, 5)))
                bias[k] += eps
            assert float(analytic[k]) == pytest.approx((up - down) / (2 * eps), rel=1e-5, abs=1e-7)

    def test_evaluation_loss_is_repeatable(self, demo_adjacency):
        model = build_model(tiny_config(task="smoothing"), 3, 1, truth=demo_adjacency)
        batch = _batch()
        with torch.no_grad():
            assert float(model.evaluation_loss(batch)) == float(model.evaluation_loss(batch))

    def test_trains_with_learned_graph(self, make_config):
        config = make_config(task="smoothing", mask_rate=0.2, epochs=1)
        data = prepare_data(config)
        result = train_gneuralflow(config, (data.train, data.val))
        assert 1 <= len(result.history) <= config.outer_iterations
        assert not bool(torch.diagonal(result.model.adjacency.weight.detach()).any())

    @pytest.mark.slow
    def test_validation_elbo_decreases(self):
        losses = _first_epochs_val_losses("smoothing")
        assert len(losses) == 20
        assert _strictly_decreasing(losses)


class TestFilter:

    def _model(self, graph="none", adjacency=None):
        return build_model(tiny_config(task="filtering", graph=graph), 3, 1, truth=adjacency)

    def test_type_and_shapes(self, demo_adjacency):
        model = self._model("truth", demo_adjacency)
        assert isinstance(model, LatentFilter)
        batch = _batch()
        observations, posteriors = model.run(batch)
        assert len(observations) == len(posteriors) == 4
        assert all(bool((g.sigma > 0).all()) for g in observations + posteriors)
        assert model.predict(batch).shape == batch.values.shape
        assert math.isfinite(float(model.filter_loss(batch)))

    def test_saturated_update_gate_keeps_state(self, rng):
        model = self._model()
        with torch.no_grad():
            for p in model.gru1.parameters():
                p.zero_()
            model.gru1.bias_ih[4:8].fill_(50.0)
        pair = HiddenStatePair(torch.from_numpy(rng.normal(size=(2, 3, 4))))
        X = torch.from_numpy(rng.normal(size=(2, 3, 1)))
        new_pair, _, _ = model.filter_step(pair, X, None, 0.0, 0.7)
        h_prime = evolve_hidden(pair, 0.0, 0.7, model.hidden_flow, model.g_proj)
        assert torch.equal(new_pair.H, h_prime)

    def test_masked_nodes_keep_evolved_state(self, rng, demo_adjacency):
        model = self._model("truth", demo_adjacency)
        pair = HiddenStatePair(torch.from_numpy(rng.normal(size=(2, 3, 4))),
                               torch.from_numpy(rng.normal(size=(2, 3, 4))))
        X = torch.from_numpy(rng.normal(size=(2, 3, 1)))
        mask = torch.tensor([[True, False, True], [False, False, True]])
        new_pair, _, _ = model.filter_step(pair, X, model.adjacency.a_hat(), 0.2, 0.9, mask)
        h_prime = evolve_hidden(pair, 0.2, 0.9, model.hidden_flow, model.g_proj)
        assert torch.equal(new_pair.H[~mask], h_prime[~mask])
        assert torch.equal(new_pair.H_tilde[~mask], h_prime[~mask])
        assert not torch.equal(new_pair.H[mask], h_prime[mask])

    def test_kl_weight_zero_leaves_nll(self):
        model = self._model()
        batch = _batch()
        observations, _ = model.run(batch)
        nll = sum(float(gaussian_nll(batch.values[:, j], obs).sum()) for j, obs in enumerate(observations)) / 2
        assert float(model.filter_loss(batch, kl_weight=0.0)) == pytest.approx(nll, rel=1e-12)

    def test_unobserved_sample(self):
        mask = np.ones((2, 4, 3), dtype=bool)
        mask[0] = False
        with pytest.raises(DataError):
            self._model().filter_loss(_batch(mask=mask))

    @pytest.mark.slow
    def test_validation_loss_decreases(self):
        losses = _first_epochs_val_losses("filtering")
        assert len(losses) == 20
        assert _strictly_decreasing(losses)
