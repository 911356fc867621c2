#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Smoothing (VAE) head: a paired LSTM encoder produces q(Z₀ | X(t₀..t_N)),
a standard flow traces Z(t) from Z₀ and a Gaussian decoder reconstructs X.
"""

import logging
from typing import Optional

import numpy as np
import torch
from torch import nn

from gnflow.diffcore import DTYPE, make_rng
from gnflow.errors import DataError
from gnflow.flows import AdjacencyHolder, GcnEncoder, MLP, graph_features
from gnflow.flows.mlp import init_linear
from gnflow.graphs import mask_adjacency
from gnflow.latent.gaussian import HALF_LOG_2PI, GaussianParams, gaussian_kl
from gnflow.latent.heads import HiddenStatePair, apply_rowwise, evolve_hidden, init_recurrent

logger = logging.getLogger("latent")

EVAL_NOISE_STREAM = 99
TRAIN_NOISE_STREAM = 98


def check_observed(batch) -> None:
    per_sample = batch.mask.reshape(len(batch), -1).sum(dim=1)
    if bool((per_sample == 0).any()):
        raise DataError("every sample needs at least one observation")


def observed_graph_features(gcn: GcnEncoder, a_hat: Optional[torch.Tensor], x: torch.Tensor,
                            mask: torch.Tensor, use_graph: bool) -> torch.Tensor:
    """X̃(tⱼ) with absent nodes masked out of Â and X"""
    m = mask.to(x.dtype)[..., None]
    x = torch.where(m.bool(), x, torch.zeros_like(x))
    masked = mask_adjacency(a_hat, mask) if a_hat is not None else None
    return graph_features(gcn, masked, x, use_graph)


class LatentSmoother(nn.Module):
    task = "smoothing"

    def __init__(self, config, n: int, d: int, adjacency: AdjacencyHolder,
                 rng: Optional[np.random.Generator] = None):
        super().__init__()
        from gnflow.training.factory import build_flow

        rng = rng if rng is not None else make_rng(config.seed, 10)
        h = config.latent_dim
        self.n, self.d, self.h = n, d, h
        self.use_graph = adjacency.use_graph
        self.backward_encoder = config.encoder_direction == "backward"
        self.n_mc, self.eval_mc = config.n_mc, config.eval_mc
        self.seed = config.seed
        self.lipschitz_bound = config.lipschitz_bound
        width = 2 * h if self.use_graph else h

        self.adjacency = adjacency
        self.gcn = GcnEncoder(d, config.gcn_hidden, d, rng)
        self.hidden_flow = build_flow(config, width, False, rng)
        self.g_proj = init_linear(nn.Linear(width, h, bias=False, dtype=DTYPE), rng)
        self.lstm1 = init_recurrent(nn.LSTMCell(d, h, dtype=DTYPE), rng)
        self.lstm2 = init_recurrent(nn.LSTMCell(d, h, dtype=DTYPE), rng)
        self.g = init_linear(nn.Linear(h, 2 * h, dtype=DTYPE), rng, config.init_scale)
        self.latent_flow = build_flow(config, h, False, rng)
        self.decoder = MLP(h, d, config.hidden, 1, rng)
        self._train_noise = make_rng(config.seed, TRAIN_NOISE_STREAM)

    def smooth_encode(self, batch) -> GaussianParams:
        """q(Z₀) from the whole observed sequence"""
        check_observed(batch)
        S, N = batch.times.shape
        pair = HiddenStatePair.zeros(S, self.n, self.h, paired=self.use_graph, cells=True)
        a_hat = self.adjacency.a_hat()
        order = range(N - 1, -1, -1) if self.backward_encoder else range(N)
        t_prev = batch.times[:, N - 1 if self.backward_encoder else 0]
        for j in order:
            t_j = batch.times[:, j]
            # the backward encoder runs on reversed time
            elapsed_from, elapsed_to = (t_j, t_prev) if self.backward_encoder else (t_prev, t_j)
            h_prime = evolve_hidden(pair, elapsed_from, elapsed_to, self.hidden_flow, self.g_proj)
            x, m = batch.values[:, j], batch.mask[:, j]
            keep = m[..., None]
            x_obs = torch.where(keep, x, torch.zeros_like(x))
            H, C = apply_rowwise(self.lstm1, x_obs, (h_prime, pair.C))
            H = torch.where(keep, H, h_prime)
            C = torch.where(keep, C, pair.C)
            H_tilde, C_tilde = None, None
            if self.use_graph:
                x_tilde = observed_graph_features(self.gcn, a_hat, x, m, True)
                H_tilde, C_tilde = apply_rowwise(self.lstm2, x_tilde, (h_prime, pair.C_tilde))
                H_tilde = torch.where(keep, H_tilde, h_prime)
                C_tilde = torch.where(keep, C_tilde, pair.C_tilde)
            pair = HiddenStatePair(H, H_tilde, C, C_tilde)
            t_prev = t_j
        return GaussianParams.from_head(self.g(pair.H))

    def decode(self, batch, z0: torch.Tensor) -> torch.Tensor:
        """Decoder means at every observation time, Z(tⱼ) = F(tⱼ − t₀, Z₀)"""
        S, N = batch.times.shape
        elapsed = batch.times - batch.times[:, :1]
        Z = self.latent_flow(elapsed, z0[:, None].expand(S, N, *z0.shape[1:]), None)
        return self.decoder(Z)

    def elbo_loss(self, batch, n_mc: int = 1, rng: Optional[np.random.Generator] = None) -> torch.Tensor:
        """KL(q(Z₀) ‖ N(0, I)) − E_q[log p(X | Z₀)], averaged over samples"""
        rng = rng if rng is not None else self._train_noise
        q = self.smooth_encode(batch)
        kl = gaussian_kl(q).sum(dim=(-2, -1))
        keep = batch.mask[..., None].expand(batch.values.shape)
        recon = torch.zeros_like(kl)
        for _ in range(n_mc):
            eps = torch.from_numpy(rng.standard_normal(tuple(q.mu.shape)))
            mean = self.decode(batch, q.sample(eps))
            nll = HALF_LOG_2PI + 0.5 * (torch.where(keep, batch.values, mean) - mean) ** 2
            recon = recon + torch.where(keep, nll, torch.zeros_like(nll)).sum(dim=(1, 2, 3))
        return (kl + recon / n_mc).mean()

    def predict(self, batch) -> torch.Tensor:
        return self.decode(batch, self.smooth_encode(batch).mu)

    def task_loss(self, batch) -> torch.Tensor:
        return self.elbo_loss(batch, self.n_mc)

    def evaluation_loss(self, batch) -> torch.Tensor:
        return self.elbo_loss(batch, self.eval_mc, make_rng(self.seed, EVAL_NOISE_STREAM))
