"""Shared toy problems: deterministic/noisy affine inner maps with a
quadratic outer level, small enough to hand-check every update."""

import numpy as np
import pytest

from dascgd.problem import ProblemInstance


class AffineProblem(ProblemInstance):
    """g_j(x) = M_j^T x + c_j with optional frozen additive noise per draw;
    f_j(y) = 0.5 ||y||^2 for every agent (so grad f = y).

    A draw freezes one noise realization, so re-evaluating the same sample at
    two points shares it, mirroring how the benchmark freezes (s', reward)."""

    def __init__(self, mats, offsets, value_noise=0.0, jac_noise=0.0, outer_noise=0.0):
        self.mats = [np.atleast_2d(np.asarray(m, dtype=float)) for m in mats]
        self.offsets = [np.atleast_1d(np.asarray(c, dtype=float)) for c in offsets]
        self.n = len(self.mats)
        self.d, self.p = self.mats[0].shape
        self.value_noise = value_noise
        self.jac_noise = jac_noise
        self.outer_noise = outer_noise

    def inner_draw(self, j, batch, rng):
        scale = 1.0 / np.sqrt(batch)
        return (
            self.value_noise * scale * rng.standard_normal(self.p),
            self.jac_noise * scale * rng.standard_normal((self.d, self.p)),
        )

    def inner_eval(self, j, sample, x):
        eps_v, eps_j = sample
        return self.inner_mean(j, x) + eps_v, self.inner_jacobian_mean(j, x) + eps_j

    def outer_grad_sample(self, j, y, rng):
        grad = self.outer_grad(j, y)
        if self.outer_noise:
            grad = grad + self.outer_noise * rng.standard_normal(self.p)
        return grad

    def inner_mean(self, j, x):
        return self.mats[j].T @ x + self.offsets[j]

    def inner_jacobian_mean(self, j, x=None):
        return self.mats[j].copy()

    def outer_value(self, j, y):
        return 0.5 * float(y @ y)

    def outer_grad(self, j, y):
        return np.asarray(y, dtype=float)


def scalar_identity_problem():
    """n=1, g(x) = x, f(y) = y^2/2: every update is hand-checkable."""
    return AffineProblem(mats=[[[1.0]]], offsets=[[0.0]])


def constant_inner_problem(n, d=3, seed=0):
    """g_j constant (M_j = 0): with alpha = 0 a run is pure gossip mixing."""
    rng = np.random.default_rng(seed)
    p = d
    return AffineProblem(
        mats=[np.zeros((d, p)) for _ in range(n)],
        offsets=[rng.standard_normal(p) for _ in range(n)],
    )


@pytest.fixture
def tiny_instance():
    """Forced 1-state instance with h(x) = (x-1)^2/2 + x^2/2, x* = 0.5."""
    from dascgd.problem import RLInstance

    return RLInstance(
        features=[[1.0]],
        transitions=[[1.0]],
        reward_means=[[[1.0]]],
        discount=0.0,
        ridge=1.0,
    )
