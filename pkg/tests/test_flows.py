#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import numpy as np
import pytest
import torch

from gnflow.diffcore import make_rng, spectral_norm
from gnflow.errors import ConfigError, DataError
from gnflow.flows import (AdjacencyHolder, CouplingFlow, GcnEncoder, GraphFlow, GruFlow, ResnetFlow,
                          check_gru_parameters, discover_architectures, enforce_contraction, gcn_encode,
                          get_architecture, invert_coupling, load_architecture)
from gnflow.flows.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from gnflow.flows.coupling import partition
from gnflow.flows.mlp import MLP
from gnflow.graphs import mask_adjacency, normalize_adjacency, random_dag

FLOWS = {"resnet": ResnetFlow, "gru": GruFlow, "coupling": CouplingFlow}


def build(arch, d=2, use_graph=True, seed=0, **kwargs):
    return FLOWS[arch](d, hidden=16, gcn_hidden=8, use_graph=use_graph, rng=make_rng(seed, 10), **kwargs)


def a_hat_of(n, seed=0, density=0.6):
    return normalize_adjacency(random_dag(n, density, seed)).a_hat


def random_x(rng, *shape):
    return torch.from_numpy(rng.uniform(-2, 2, size=shape))


class TestGcn:

    def test_identity_weights_on_empty_graph(self, rng):
        enc = GcnEncoder(3, 3, 3)
        with torch.no_grad():
            enc.W.copy_(torch.eye(3))
            enc.U.copy_(torch.eye(3))
        X = torch.from_numpy(rng.uniform(0, 1, size=(4, 3)))
        np.testing.assert_allclose(gcn_encode(np.zeros((4, 4)), X, enc).detach().numpy(), X.numpy(), atol=0)

    def test_matches_loop_oracle(self, rng):
        A = random_dag(5, 0.7, seed=3)
        enc = GcnEncoder(2, 3, 2, make_rng(1, 0))
        X = random_x(rng, 5, 2)
        a_hat = normalize_adjacency(A).a_hat.numpy()
        W, U, x = enc.W.detach().numpy(), enc.U.detach().numpy(), X.numpy()
        n, d, h = 5, 2, 3
        inner = np.zeros((n, h))
        for i in range(n):
            for k in range(h):
                inner[i, k] = max(0.0, sum(a_hat[i, j] * x[j, c] * W[c, k] for j in range(n) for c in range(d)))
        out = np.zeros((n, d))
        for i in range(n):
            for c in range(d):
                out[i, c] = sum(a_hat[i, j] * inner[j, k] * U[k, c] for j in range(n) for k in range(h))
        np.testing.assert_allclose(gcn_encode(A, X, enc).detach().numpy(), out, atol=1e-12)

    def test_permutation_equivariance(self, rng):
        A = random_dag(6, 0.5, seed=8).numpy()
        P = torch.from_numpy(np.eye(6)[rng.permutation(6)])
        enc = GcnEncoder(2, 4, 2, make_rng(2, 0))
        X = random_x(rng, 6, 2)
        left = gcn_encode(P @ torch.from_numpy(A) @ P.T, P @ X, enc)
        np.testing.assert_allclose(left.detach().numpy(), (P @ gcn_encode(A, X, enc)).detach().numpy(), atol=1e-12)

    def test_masked_rows_are_zero_and_rest_match_subgraph(self, rng):
        a_hat = a_hat_of(6, seed=4)
        mask = torch.tensor([True, False, True, True, False, True])
        enc = GcnEncoder(2, 4, 2, make_rng(3, 0))
        X = random_x(rng, 6, 2)
        out = enc(mask_adjacency(a_hat, mask), X).detach()
        assert bool((out[~mask] == 0).all())
        keep = mask.nonzero().flatten()
        sub = enc(a_hat[keep][:, keep], X[keep]).detach()
        np.testing.assert_allclose(out[keep].numpy(), sub.numpy(), atol=1e-12)


@pytest.mark.parametrize("arch", sorted(FLOWS))
class TestFlowContract:

    def test_initial_condition_identity(self, arch, rng):
        for seed in range(100):
            flow = build(arch, d=2, seed=seed)
            X = random_x(rng, 4, 2)
            assert torch.equal(flow(0.0, X, a_hat_of(4, seed)), X)

    def test_permutation_equivariance(self, arch, rng):
        flow = build(arch, d=2)
        A = random_dag(5, 0.6, seed=1).numpy()
        P = np.eye(5)[rng.permutation(5)]
        X = random_x(rng, 5, 2)
        Pt = torch.from_numpy(P)
        left = flow(0.7, Pt @ X, normalize_adjacency(P @ A @ P.T).a_hat)
        right = Pt @ flow(0.7, X, normalize_adjacency(A).a_hat)
        np.testing.assert_allclose(left.detach().numpy(), right.detach().numpy(), atol=1e-12)

    def test_graph_ablation(self, arch, rng):
        graph_flow = build(arch, d=2, use_graph=True, seed=5)
        plain_flow = build(arch, d=2, use_graph=False, seed=5)
        with torch.no_grad():
            for module in graph_flow.modules():
                if isinstance(module, GcnEncoder):
                    module.U.zero_()
        X = random_x(rng, 3, 4, 2)
        assert torch.equal(graph_flow(1.3, X, a_hat_of(4)), plain_flow(1.3, X, None))

    @pytest.mark.parametrize("t", [-0.1, float("nan"), float("inf")])
    def test_bad_time_rejected(self, arch, t, rng):
        with pytest.raises(ConfigError):
            build(arch)(t, random_x(rng, 3, 2), a_hat_of(3))

    def test_batched_times(self, arch, rng):
        flow = build(arch, d=2)
        times = torch.tensor([[0.0, 0.5, 2.0], [0.1, 0.2, 9.0]], dtype=torch.float64)
        X = random_x(rng, 2, 3, 4, 2)
        out = flow(times, X, a_hat_of(4))
        assert out.shape == X.shape
        assert torch.equal(out[0, 0], X[0, 0])

    def test_single_feature(self, arch, rng):
        out = build(arch, d=1)(1.0, random_x(rng, 2, 5, 1), a_hat_of(5))
        assert out.shape == (2, 5, 1)
        assert bool(torch.isfinite(out).all())


class TestContraction:

    def test_bounds_after_clipping(self):
        flow = build("resnet")
        with torch.no_grad():
            for p in flow.parameters():
                p.mul_(10.0)
        enforce_contraction(flow, 0.9)
        for module in flow.modules():
            if isinstance(module, MLP):
                for layer in module.linears():
                    assert spectral_norm(layer.weight) <= 0.9 + 1e-9
            elif isinstance(module, GcnEncoder):
                assert spectral_norm(module.W) <= 0.45 + 1e-9
                assert spectral_norm(module.U) <= 0.45 + 1e-9

    def test_compliant_parameters_untouched(self):
        flow = build("gru")
        enforce_contraction(flow)
        before = {k: v.clone() for k, v in flow.state_dict().items()}
        enforce_contraction(flow)
        for name, value in flow.state_dict().items():
            assert torch.equal(value, before[name]), name

    def test_gcn_lipschitz_bound(self, rng):
        bound = 0.9
        enc = GcnEncoder(2, 8, 2, make_rng(0, 0))
        with torch.no_grad():
            enc.W.mul_(10.0)
            enc.U.mul_(10.0)
        enforce_contraction(enc, bound)
        a_hat = a_hat_of(6, seed=2)
        X, Y = random_x(rng, 1000, 6, 2), random_x(rng, 1000, 6, 2)
        with torch.no_grad():
            ratio = (enc(a_hat, X) - enc(a_hat, Y)).flatten(1).norm(dim=1) / (X - Y).flatten(1).norm(dim=1)
        assert float(ratio.max()) <= 4 * bound ** 2
        assert float(ratio.max()) <= bound ** 2 * (1 + 1e-3)

    def test_resnet_residual_is_contractive(self, rng):
        flow = enforce_contraction(build("resnet"))
        a_hat = a_hat_of(4, seed=6)
        X, Y = random_x(rng, 1000, 4, 2), random_x(rng, 1000, 4, 2)
        with torch.no_grad():
            gap = (flow.residual(0.8, X, a_hat) - flow.residual(0.8, Y, a_hat)).flatten(1).norm(dim=1)
        assert bool((gap <= 0.99 * (X - Y).flatten(1).norm(dim=1)).all())

    def test_gru_gate_product_is_contractive(self, rng):
        assert check_gru_parameters(2.0 / 11.0, 1.0) == pytest.approx(2.0)
        flow = enforce_contraction(build("gru", alpha=2.0 / 11.0, beta=1.0))
        a_hat = a_hat_of(4, seed=7)
        X, Y = random_x(rng, 10000, 4, 2), random_x(rng, 10000, 4, 2)
        with torch.no_grad():
            gap = (flow.gate_product(1.0, X, a_hat) - flow.gate_product(1.0, Y, a_hat)).flatten(1).norm(dim=1)
        assert int((gap >= (X - Y).flatten(1).norm(dim=1)).sum()) == 0

    @pytest.mark.parametrize("arch", ["resnet", "gru"])
    def test_injective_on_sampled_pairs(self, arch, rng):
        flow = enforce_contraction(build(arch))
        a_hat = a_hat_of(4, seed=8)
        X, Y = random_x(rng, 10000, 4, 2), random_x(rng, 10000, 4, 2)
        far = (X - Y).flatten(1).norm(dim=1) >= 1e-3
        with torch.no_grad():
            gap = (flow(2.0, X, a_hat) - flow(2.0, Y, a_hat)).flatten(1).norm(dim=1)
        assert bool((gap[far] > 1e-9).all())


class TestGruParameters:

    def test_boundary_admitted(self):
        GruFlow(2, alpha=2.0 / 11.0, beta=1.0)

    def test_outside_rejected(self):
        with pytest.raises(ConfigError):
            GruFlow(2, alpha=0.2, beta=1.0)

    def test_relaxed_mode_warns_only(self):
        flow = GruFlow(2, alpha=0.2, beta=1.0, strict=False)
        assert flow.extra_meta() == {"alpha": 0.2, "beta": 1.0, "strict": False}


class TestCoupling:

    @pytest.mark.parametrize("width,block,expected", [
        (4, 0, ([0, 2], [1, 3])),
        (4, 1, ([1, 3], [0, 2])),
        (3, 0, ([0, 2], [1])),
        (2, 1, ([1], [0])),
    ])
    def test_partition(self, width, block, expected):
        assert partition(width, block) == expected

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_round_trip(self, d, rng):
        flow = build("coupling", d=d, blocks=3)
        a_hat = a_hat_of(5, seed=d)
        X = random_x(rng, 7, 5, d)
        Y = flow.forward_full(1.7, X, a_hat)
        restored = invert_coupling(1.7, Y, a_hat, flow)
        assert float((restored - flow.lift(X)).abs().max()) <= 1e-10

    def test_single_feature_uses_graph(self, rng):
        chain = np.diag(np.ones(4), k=1)
        a_hat = normalize_adjacency(chain).a_hat
        flow = build("coupling", d=1, seed=2)
        X = random_x(rng, 5, 1)
        out = flow(1.0, X, a_hat).detach()
        without_edges = flow(1.0, X, torch.eye(5, dtype=torch.float64)).detach()
        assert float((out - without_edges).abs().max()) > 1e-8
        shifted = X.clone()
        shifted[0, 0] += 1.0
        moved = flow(1.0, shifted, a_hat).detach()
        assert float((moved[1:] - out[1:]).abs().max()) > 1e-8

    def test_single_feature_without_graph_is_nodewise(self, rng):
        flow = build("coupling", d=1, use_graph=False, seed=2)
        X = random_x(rng, 5, 1)
        shifted = X.clone()
        shifted[0, 0] += 1.0
        assert torch.equal(flow(1.0, shifted, None)[1:], flow(1.0, X, None)[1:])

    def test_single_feature_block_order(self):
        flow = build("coupling", d=1)
        assert flow.blocks[0].v_idx.tolist() == [0]
        assert flow.blocks[1].u_idx.tolist() == [0]

    def test_inverse_at_zero_time(self, rng):
        flow = build("coupling", d=2)
        Y = random_x(rng, 4, 2)
        assert torch.equal(invert_coupling(0.0, Y, a_hat_of(4), flow), Y)

    def test_pure_rescaling(self, rng):
        flow = build("coupling", d=2, blocks=1)
        block = flow.blocks[0]
        with torch.no_grad():
            for trunk in (block.mlp1, block.mlp2):
                for layer in trunk.linears():
                    layer.weight.zero_()
            block.mlp4.out.weight.zero_()
        X = random_x(rng, 5, 2)
        Y = flow(1.0, X, a_hat_of(5)).detach()
        ratio = Y[:, 0] / X[:, 0]
        np.testing.assert_allclose(ratio.numpy(), float(ratio[0]), rtol=1e-12)
        assert torch.equal(Y[:, 1], X[:, 1])
        np.testing.assert_allclose(invert_coupling(1.0, Y, a_hat_of(5), flow).detach().numpy(), X.numpy(),
                                   atol=1e-14)


class TestGraphFlow:

    def test_modes(self, demo_adjacency):
        learned = AdjacencyHolder(3, "learned", demo_adjacency)
        truth = AdjacencyHolder(3, "truth", demo_adjacency)
        none = AdjacencyHolder(3, "none", demo_adjacency)
        assert learned.weight.requires_grad and not truth.weight.requires_grad
        assert none.a_hat() is None
        assert float(truth.constraint()) == 0.0
        assert not bool(none.weight.any())

    def test_unknown_mode(self):
        with pytest.raises(ConfigError):
            AdjacencyHolder(3, "random")

    def test_forward_from_initial_conditions(self, demo_adjacency, rng):
        model = GraphFlow(build("resnet", d=2), AdjacencyHolder(3, "learned", demo_adjacency))
        times = torch.tensor([[0.0, 1.0, 4.0], [0.0, 0.3, 0.4]], dtype=torch.float64)
        X0 = random_x(rng, 2, 3, 2)
        out = model(times, X0)
        assert out.shape == (2, 3, 3, 2)
        assert torch.equal(out[:, 0], X0)

    def test_graph_mode_must_match_flow(self):
        with pytest.raises(ConfigError):
            GraphFlow(build("resnet", use_graph=False), AdjacencyHolder(3, "learned"))


class TestRegistry:

    def test_discover(self):
        assert discover_architectures() == ["coupling", "gru", "resnet"]

    def test_load(self):
        assert load_architecture("gru") is GruFlow
        assert get_architecture("coupling") is CouplingFlow

    def test_unknown_lists_valid_set(self):
        with pytest.raises(ConfigError, match="coupling"):
            load_architecture("transformer")


class TestCheckpoint:

    def test_round_trip(self, tmp_path, demo_adjacency):
        model = GraphFlow(build("resnet"), AdjacencyHolder(3, "learned", demo_adjacency))
        ckpt = Checkpoint("resnet", 3, 2, 16, {"graph": "learned"}, model.state_dict())
        save_checkpoint(tmp_path / "m.ckpt", ckpt)
        loaded = load_checkpoint(tmp_path / "m.ckpt")
        assert (loaded.arch, loaded.n, loaded.d, loaded.hidden, loaded.meta) == ("resnet", 3, 2, 16, {"graph": "learned"})
        assert list(loaded.tensors) == list(ckpt.tensors)
        for name, value in ckpt.tensors.items():
            assert torch.equal(loaded.tensors[name], value.to(torch.float64)), name
        assert (tmp_path / "m.ckpt").read_text().startswith("gnflow-v1 resnet 3 2 16\n")

    def test_unknown_version(self, tmp_path):
        (tmp_path / "m.ckpt").write_text("gnflow-v0 resnet 3 2 16\nmeta {}\n")
        with pytest.raises(DataError):
            load_checkpoint(tmp_path / "m.ckpt")

    def test_truncated(self, tmp_path):
        (tmp_path / "m.ckpt").write_text("gnflow-v1 resnet 3 2 16\nmeta {}\ntensor w 2,2\n1.0,2.0\n")
        with pytest.raises(DataError):
            load_checkpoint(tmp_path / "m.ckpt")
