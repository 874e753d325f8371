"""Two-level compositional problems with an averaged inner map.

The objective is h(x) = (1/n) sum_j f_j(gbar(x)) with gbar(x) =
(1/n) sum_j g_j(x), where each agent j owns a private inner map g_j
(available only through unbiased samples during optimization) and an
outer function f_j.  ``RLInstance`` is the concrete benchmark: multi-agent
policy evaluation with linear value features, where

    g_j(x) = (x^T, E_{s'}[r_j(s,s') + discount * phi_{s'}^T x | s], s=1..S)^T
    f_j(y) = 1/(2S) sum_s (phi_s^T y[:d] - y[d+s])^2 + ridge/2 ||y[:d]||^2.

Both levels have closed-form oracles, so simulated runs can be scored
against the exact objective and its exact minimizer.
"""

import json
from dataclasses import dataclass

import numpy as np

from ._kernels import rl_inner_eval
from .errors import ConfigurationError, DimensionError, NumericalError

ROW_SUM_TOL = 1e-12


@dataclass
class InnerSample:
    """One frozen draw of the randomness of the inner map: a successor state
    and a noisy reward per (state, batch slot).  The same sample can be
    re-evaluated at several decision points."""

    next_state: np.ndarray  # (S, batch) int64
    reward: np.ndarray  # (S, batch) float64


class ProblemInstance:
    """Base class: agent count ``n``, decision dimension ``d``, inner output
    dimension ``p``, plus stochastic and exact oracles per agent.

    Instances are immutable after construction; all randomness flows through
    caller-supplied generators, so concurrent reads are safe.
    """

    n: int
    d: int
    p: int

    # --- stochastic oracles -------------------------------------------------

    def inner_draw(self, j, batch, rng):
        """Draw the randomness for one stochastic evaluation of g_j."""
        raise NotImplementedError

    def inner_eval(self, j, sample, x):
        """Evaluate the sampled inner map at x: returns (value (p,), jacobian (d, p))."""
        raise NotImplementedError

    def sample_inner(self, j, x, batch, rng):
        """Unbiased stochastic (value, jacobian) of g_j at x, averaged over ``batch`` draws."""
        if batch < 1:
            raise ConfigurationError(f"batch must be >= 1, got {batch}")
        return self.inner_eval(j, self.inner_draw(j, batch, rng), x)

    def outer_grad_sample(self, j, y, rng):
        """Stochastic gradient of f_j at y.  Default: the exact gradient
        (deterministic outer level); noisy problems override."""
        return self.outer_grad(j, y)

    # --- exact oracles ------------------------------------------------------

    def inner_mean(self, j, x):
        raise NotImplementedError

    def inner_jacobian_mean(self, j, x):
        raise NotImplementedError

    def outer_value(self, j, y):
        raise NotImplementedError

    def outer_grad(self, j, y):
        raise NotImplementedError

    def inner_average(self, x):
        """gbar(x) = (1/n) sum_j g_j(x)."""
        acc = self.inner_mean(0, x)
        for j in range(1, self.n):
            acc = acc + self.inner_mean(j, x)
        return acc / self.n

    def full_objective(self, x):
        """h(x); accepts a single point (d,) or a stack of points (m, d)."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            return np.array([self.full_objective(row) for row in x])
        gbar = self.inner_average(x)
        return sum(self.outer_value(j, gbar) for j in range(self.n)) / self.n

    def full_gradient(self, x):
        """grad h(x) by the chain rule through the averaged inner map."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            return np.stack([self.full_gradient(row) for row in x])
        gbar = self.inner_average(x)
        jac = sum(self.inner_jacobian_mean(j, x) for j in range(self.n)) / self.n
        fgrad = sum(self.outer_grad(j, gbar) for j in range(self.n)) / self.n
        return jac @ fgrad


class RLInstance(ProblemInstance):
    """Multi-agent policy-evaluation benchmark with exact quadratic oracles.

    Parameters
    ----------
    features : (S, d) state features, entries in [0, 1].
    transitions : (S, S) row-stochastic transition matrix.
    reward_means : (n, S, S) per-agent mean rewards, entries in [0, 1];
        sampled rewards are N(mean, 1).
    discount : discount factor in [0, 1).
    ridge : l2 regularization coefficient, >= 0.
    seed : generation seed kept for serialization (informational).
    """

    def __init__(self, features, transitions, reward_means, discount, ridge, seed=None):
        features = np.array(features, dtype=float)
        transitions = np.array(transitions, dtype=float)
        reward_means = np.array(reward_means, dtype=float)
        if features.ndim != 2:
            raise DimensionError(f"features must be (S, d), got shape {features.shape}")
        n_states, dim = features.shape
        if transitions.shape != (n_states, n_states):
            raise DimensionError(
                f"transitions must be ({n_states}, {n_states}), got {transitions.shape}"
            )
        if reward_means.ndim != 3 or reward_means.shape[1:] != (n_states, n_states):
            raise DimensionError(
                f"reward_means must be (n, {n_states}, {n_states}), got {reward_means.shape}"
            )
        if not (0.0 <= discount < 1.0):
            raise ConfigurationError(f"discount must be in [0, 1), got {discount}")
        if ridge < 0:
            raise ConfigurationError(f"ridge must be >= 0, got {ridge}")
        row_defect = np.max(np.abs(transitions.sum(axis=1) - 1.0))
        if row_defect > ROW_SUM_TOL or transitions.min() < 0:
            raise ConfigurationError(
                f"transition rows must be nonnegative and sum to 1 (defect {row_defect:.2e})"
            )

        self.n = int(reward_means.shape[0])
        self.d = int(dim)
        self.S = int(n_states)
        self.p = self.d + self.S
        self.discount = float(discount)
        self.ridge = float(ridge)
        self.seed = seed
        self.features = features
        self.transitions = transitions
        self.reward_means = reward_means

        # cached pieces of the quadratic objective:
        # h(x) = 1/(2S) ||A x - b||^2 + ridge/2 ||x||^2
        self._proj_features = transitions @ features  # P Phi, (S, d)
        self._design = features - self.discount * self._proj_features  # A
        # expected next reward per agent and state: sum_{s'} P[s,s'] r_j[s,s']
        self._mean_next_reward = (transitions[None, :, :] * reward_means).sum(axis=2)
        self._target = self._mean_next_reward.mean(axis=0)  # b, (S,)
        cum = np.cumsum(transitions, axis=1)
        cum[:, -1] = 1.0  # guard against fp undershoot in the last column
        self._cum_transitions = cum
        self._row_offsets = 2.0 * np.arange(self.S)
        self._rows = np.arange(self.S)[:, None]

        for arr in (
            self.features,
            self.transitions,
            self.reward_means,
            self._proj_features,
            self._design,
            self._mean_next_reward,
            self._target,
            self._cum_transitions,
        ):
            arr.setflags(write=False)

    # --- exact oracles ------------------------------------------------------

    def inner_mean(self, j, x):
        x = np.asarray(x, dtype=float)
        tail = self._mean_next_reward[j] + self.discount * (self._proj_features @ x)
        return np.concatenate([x, tail])

    def inner_jacobian_mean(self, j, x=None):
        jac = np.empty((self.d, self.p))
        jac[:, : self.d] = np.eye(self.d)
        jac[:, self.d :] = self.discount * self._proj_features.T
        return jac

    def outer_value(self, j, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.p,):
            raise DimensionError(f"y must have length {self.p}, got shape {y.shape}")
        head = y[: self.d]
        resid = self.features @ head - y[self.d :]
        return float(resid @ resid) / (2 * self.S) + 0.5 * self.ridge * float(head @ head)

    def outer_grad(self, j, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.p,):
            raise DimensionError(f"y must have length {self.p}, got shape {y.shape}")
        head = y[: self.d]
        resid = self.features @ head - y[self.d :]
        grad = np.empty(self.p)
        grad[: self.d] = self.features.T @ resid / self.S + self.ridge * head
        grad[self.d :] = -resid / self.S
        return grad

    def full_objective(self, x):
        x = np.asarray(x, dtype=float)
        resid = x @ self._design.T - self._target
        return (resid**2).sum(axis=-1) / (2 * self.S) + 0.5 * self.ridge * (x**2).sum(axis=-1)

    def full_gradient(self, x):
        x = np.asarray(x, dtype=float)
        resid = x @ self._design.T - self._target
        return resid @ self._design / self.S + self.ridge * x

    def quadratic_system(self):
        """(A, b) with h(x) = 1/(2S)||Ax - b||^2 + ridge/2 ||x||^2."""
        return self._design, self._target

    # --- stochastic oracles -------------------------------------------------

    def inner_draw(self, j, batch, rng):
        if batch < 1:
            raise ConfigurationError(f"batch must be >= 1, got {batch}")
        u = rng.random((self.S, batch))
        # vectorized per-row inverse-cdf draw: rows are disjoint once offset by 2
        flat = np.searchsorted(
            (self._cum_transitions + self._row_offsets[:, None]).ravel(),
            u + self._row_offsets[:, None],
            side="right",
        )
        next_state = flat - self._rows * self.S
        noise = rng.standard_normal((self.S, batch))
        reward = self.reward_means[j][self._rows, next_state] + noise
        return InnerSample(next_state.astype(np.int64), reward)

    def inner_eval(self, j, sample, x):
        x = np.ascontiguousarray(x, dtype=float)
        proj = self.features @ x
        value_tail, jac_tail = rl_inner_eval(
            sample.next_state, sample.reward, proj, self.features, self.discount
        )
        value = np.concatenate([x, value_tail])
        jac = np.empty((self.d, self.p))
        jac[:, : self.d] = np.eye(self.d)
        jac[:, self.d :] = jac_tail.T
        return value, jac

    # --- serialization ------------------------------------------------------

    def to_dict(self):
        return {
            "n": self.n,
            "d": self.d,
            "states": self.S,
            "discount": self.discount,
            "ridge": self.ridge,
            "seed": self.seed,
            "features": self.features.tolist(),
            "transitions": self.transitions.tolist(),
            "reward_means": self.reward_means.tolist(),
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def from_dict(cls, payload):
        return cls(
            features=payload["features"],
            transitions=payload["transitions"],
            reward_means=payload["reward_means"],
            discount=payload["discount"],
            ridge=payload["ridge"],
            seed=payload.get("seed"),
        )

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def generate_instance(n, d, states, discount=0.95, ridge=1.0, seed=0):
    """Random benchmark instance: features and mean rewards uniform on [0, 1],
    transition rows uniform then normalized.  Deterministic given ``seed``.

    Draw order is fixed (features, transitions, rewards) so serialized
    instances reproduce bit-identically.
    """
    if n < 1 or d < 1 or states < 1:
        raise ConfigurationError(f"need n, d, states >= 1, got ({n}, {d}, {states})")
    if not (0.0 < discount < 1.0):
        raise ConfigurationError(f"discount must be in (0, 1), got {discount}")
    if ridge < 0:
        raise ConfigurationError(f"ridge must be >= 0, got {ridge}")
    rng = np.random.default_rng(seed)
    features = rng.random((states, d))
    raw = rng.random((states, states))
    transitions = raw / raw.sum(axis=1, keepdims=True)
    reward_means = rng.random((n, states, states))
    return RLInstance(features, transitions, reward_means, discount, ridge, seed=seed)


def solve_optimal(inst):
    """Exact minimizer of the quadratic benchmark objective via the normal
    equations x* = (A^T A / S + ridge I)^{-1} A^T b / S."""
    design, target = inst.quadratic_system()
    n_states = design.shape[0]
    lhs = design.T @ design / n_states + inst.ridge * np.eye(inst.d)
    rhs = design.T @ target / n_states
    try:
        x_star = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"normal equations are singular: {exc}") from exc
    grad_norm = float(np.linalg.norm(inst.full_gradient(x_star)))
    scale = max(1.0, float(np.linalg.norm(rhs)))
    if not np.isfinite(grad_norm) or grad_norm > 1e-8 * scale:
        raise NumericalError(
            f"normal-equation solve is inaccurate (|grad| = {grad_norm:.2e}); "
            "the system is likely rank deficient"
        )
    return x_star


class PooledProblem(ProblemInstance):
    """Single-agent pooling of a multi-agent problem: every stochastic call
    draws from each underlying agent and averages, so one 'sample' costs
    base.n underlying samples.  Used by the centralized baseline."""

    def __init__(self, base):
        self.base = base
        self.n = 1
        self.d = base.d
        self.p = base.p

    def inner_draw(self, j, batch, rng):
        return [self.base.inner_draw(i, batch, rng) for i in range(self.base.n)]

    def inner_eval(self, j, samples, x):
        value, jac = self.base.inner_eval(0, samples[0], x)
        for i in range(1, self.base.n):
            v_i, j_i = self.base.inner_eval(i, samples[i], x)
            value = value + v_i
            jac = jac + j_i
        return value / self.base.n, jac / self.base.n

    def outer_grad_sample(self, j, y, rng):
        acc = self.base.outer_grad_sample(0, y, rng)
        for i in range(1, self.base.n):
            acc = acc + self.base.outer_grad_sample(i, y, rng)
        return acc / self.base.n

    def inner_mean(self, j, x):
        return self.base.inner_average(x)

    def inner_jacobian_mean(self, j, x=None):
        acc = self.base.inner_jacobian_mean(0, x)
        for i in range(1, self.base.n):
            acc = acc + self.base.inner_jacobian_mean(i, x)
        return acc / self.base.n

    def outer_value(self, j, y):
        return sum(self.base.outer_value(i, y) for i in range(self.base.n)) / self.base.n

    def outer_grad(self, j, y):
        acc = self.base.outer_grad(0, y)
        for i in range(1, self.base.n):
            acc = acc + self.base.outer_grad(i, y)
        return acc / self.base.n

    def full_objective(self, x):
        return self.base.full_objective(x)

    def full_gradient(self, x):
        return self.base.full_gradient(x)


def pool_problem(inst):
    """Centralized single-agent view of ``inst`` with pooled sampling."""
    return PooledProblem(inst)
