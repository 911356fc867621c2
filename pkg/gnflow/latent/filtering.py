#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Filtering head: a paired GRU updates the hidden state at every observation,
with an observation Gaussian before the jump and a posterior Gaussian after.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
import torch
from torch import nn

from gnflow.diffcore import DTYPE, make_rng, ops
from gnflow.flows import AdjacencyHolder, GcnEncoder
from gnflow.flows.mlp import init_linear
from gnflow.latent.gaussian import GaussianParams, gaussian_kl, gaussian_nll
from gnflow.latent.heads import HiddenStatePair, apply_rowwise, evolve_hidden, init_recurrent
from gnflow.latent.smoothing import check_observed, observed_graph_features

logger = logging.getLogger("latent")


class LatentFilter(nn.Module):
    task = "filtering"

    def __init__(self, config, n: int, d: int, adjacency: AdjacencyHolder,
                 rng: Optional[np.random.Generator] = None):
        super().__init__()
        from gnflow.training.factory import build_flow

        rng = rng if rng is not None else make_rng(config.seed, 10)
        h = config.latent_dim
        self.n, self.d, self.h = n, d, h
        self.use_graph = adjacency.use_graph
        self.kl_weight = config.kl_weight
        self.lipschitz_bound = config.lipschitz_bound
        width = 2 * h if self.use_graph else h

        self.adjacency = adjacency
        self.gcn = GcnEncoder(d, config.gcn_hidden, d, rng)
        self.hidden_flow = build_flow(config, width, False, rng)
        self.g_proj = init_linear(nn.Linear(width, h, bias=False, dtype=DTYPE), rng)
        self.g_prep = init_linear(nn.Linear(d + h, h, dtype=DTYPE), rng)
        self.gru1 = init_recurrent(nn.GRUCell(h, h, dtype=DTYPE), rng)
        self.gru2 = init_recurrent(nn.GRUCell(h, h, dtype=DTYPE), rng)
        self.g_obs = init_linear(nn.Linear(h, 2 * d, dtype=DTYPE), rng, config.init_scale)
        self.g_post = init_linear(nn.Linear(h, 2 * d, dtype=DTYPE), rng, config.init_scale)

    def filter_step(self, pair: HiddenStatePair, X_t: torch.Tensor, a_hat: Optional[torch.Tensor],
                    t_prev, t, mask: Optional[torch.Tensor] = None
                    ) -> Tuple[HiddenStatePair, GaussianParams, GaussianParams]:
        """Evolve to t, emit the observation Gaussian, jump on X(t), emit the posterior"""
        if mask is None:
            mask = torch.ones(X_t.shape[:-1], dtype=torch.bool)
        keep = mask[..., None]
        h_prime = evolve_hidden(pair, t_prev, t, self.hidden_flow, self.g_proj)
        obs = GaussianParams.from_head(self.g_obs(h_prime))

        x_obs = torch.where(keep, X_t, torch.zeros_like(X_t))
        H = apply_rowwise(self.gru1, self.g_prep(ops.concat(x_obs, h_prime)), h_prime)
        H = torch.where(keep, H, h_prime)
        H_tilde = None
        if self.use_graph:
            x_tilde = observed_graph_features(self.gcn, a_hat, X_t, mask, True)
            H_tilde = apply_rowwise(self.gru2, self.g_prep(ops.concat(x_tilde, h_prime)), h_prime)
            H_tilde = torch.where(keep, H_tilde, h_prime)
        post = GaussianParams.from_head(self.g_post(H))
        return HiddenStatePair(H, H_tilde), obs, post

    def run(self, batch) -> Tuple[List[GaussianParams], List[GaussianParams]]:
        check_observed(batch)
        S, N = batch.times.shape
        pair = HiddenStatePair.zeros(S, self.n, self.h, paired=self.use_graph)
        a_hat = self.adjacency.a_hat()
        t_prev = batch.times[:, 0]
        observations, posteriors = [], []
        for j in range(N):
            t_j = batch.times[:, j]
            pair, obs, post = self.filter_step(pair, batch.values[:, j], a_hat, t_prev, t_j, batch.mask[:, j])
            observations.append(obs)
            posteriors.append(post)
            t_prev = t_j
        return observations, posteriors

    def filter_loss(self, batch, kl_weight: Optional[float] = None) -> torch.Tensor:
        """Σⱼ masked −log N(X(tⱼ) | obs) + λ·KL(obs ‖ post), averaged over samples"""
        kl_weight = self.kl_weight if kl_weight is None else kl_weight
        observations, posteriors = self.run(batch)
        total = torch.zeros(len(batch), dtype=torch.float64)
        for j, (obs, post) in enumerate(zip(observations, posteriors)):
            keep = batch.mask[:, j][..., None].expand(obs.mu.shape)
            x = torch.where(keep, batch.values[:, j], obs.mu)
            term = gaussian_nll(x, obs) + kl_weight * gaussian_kl(obs, post)
            total = total + torch.where(keep, term, torch.zeros_like(term)).sum(dim=(-2, -1))
        return total.mean()

    def predict(self, batch) -> torch.Tensor:
        """One-step-ahead observation means μ_obs(tⱼ), shaped like batch.values"""
        observations, _ = self.run(batch)
        return torch.stack([obs.mu for obs in observations], dim=1)

    def task_loss(self, batch) -> torch.Tensor:
        return self.filter_loss(batch)

    def evaluation_loss(self, batch) -> torch.Tensor:
        return self.filter_loss(batch)
