"""Synchronous-round state transitions for the decentralized compositional
gradient methods.

Per round, every agent draws one fresh inner sample, evaluates it at both the
old and the new decision point (hybrid variance reduction needs the shared
draw), and maintains two dynamic-average-consensus trackers: y follows the
network average of the inner-value estimates G, z follows the average of the
inner-Jacobian estimates.  The compressed variant exchanges only compressed
differences against slowly updated reference states (the ``comm`` procedure),
never the raw iterates.

Determinism contract: agent i's randomness in round k comes from the child
stream (master_seed, agent_id=i, round=k), so trajectories are bit-identical
regardless of agent update order.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DivergenceError, NumericalError
from .network import MixingMatrix
from .problem import pool_problem

MIRROR_TOL = 1e-6  # comm() input sanity check on H^w = W H


def agent_rng(seed, agent, round_index):
    """Per-(agent, round) child generator of a master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(agent, round_index)))


def round_rngs(seed, n, round_index):
    return [agent_rng(seed, i, round_index) for i in range(n)]


@dataclass(frozen=True)
class StepSizes:
    """Per-round scalars.  alpha scales the descent direction, beta/gamma are
    the hybrid-estimator mixing weights; the compressed variant adds the
    consensus stepsize alpha_w and the reference-state scalings."""

    alpha: float
    beta: float
    gamma: float
    alpha_w: float = 0.5
    alpha_x: float = 0.5
    alpha_y: float = 0.5
    alpha_z: float = 0.5

    def __post_init__(self):
        # alpha = 0 is allowed: it turns a run into pure gossip mixing
        if self.alpha < 0:
            raise ConfigurationError(f"alpha must be >= 0, got {self.alpha}")
        if not 0 < self.beta <= 1 or not 0 < self.gamma <= 1:
            raise ConfigurationError(
                f"beta and gamma must lie in (0, 1], got ({self.beta}, {self.gamma})"
            )
        for name in ("alpha_w", "alpha_x", "alpha_y", "alpha_z"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ConfigurationError(f"{name} must lie in (0, 1], got {value}")

    @classmethod
    def sqrt_horizon(cls, s1, s2, s3, horizon, **scalings):
        """Theory schedule: alpha = s1/sqrt(K), beta = s2/sqrt(K), gamma = s3/sqrt(K)."""
        root = float(np.sqrt(horizon))
        return cls(alpha=s1 / root, beta=s2 / root, gamma=s3 / root, **scalings)


@dataclass
class AgentState:
    """One agent's view (slices of the stacked state)."""

    x: np.ndarray
    G: np.ndarray
    Ghat: np.ndarray
    y: np.ndarray
    z: np.ndarray
    hx: np.ndarray | None = None
    hy: np.ndarray | None = None
    hz: np.ndarray | None = None
    hxw: np.ndarray | None = None
    hyw: np.ndarray | None = None
    hzw: np.ndarray | None = None


@dataclass
class NetworkState:
    """Stacked iterates, one row per agent: x (n,d), G,y (n,p), Ghat,z (n,d,p);
    compressed mode adds the reference states h* and their mixed copies h*w."""

    x: np.ndarray
    G: np.ndarray
    Ghat: np.ndarray
    y: np.ndarray
    z: np.ndarray
    hx: np.ndarray | None = None
    hy: np.ndarray | None = None
    hz: np.ndarray | None = None
    hxw: np.ndarray | None = None
    hyw: np.ndarray | None = None
    hzw: np.ndarray | None = None

    @property
    def compressed(self):
        return self.hx is not None

    def __len__(self):
        return self.x.shape[0]

    def __getitem__(self, i):
        fields = {}
        for name in ("x", "G", "Ghat", "y", "z", "hx", "hy", "hz", "hxw", "hyw", "hzw"):
            value = getattr(self, name)
            fields[name] = value[i] if value is not None else None
        return AgentState(**fields)


def init_states(problem, W, mode="plain", seed=0):
    """Round-0 initialization: x drawn 0.1 * N(0, I) per agent, the value and
    Jacobian estimates from one stochastic inner sample at x, trackers set
    equal to the estimates (y = G, z = Ghat).  Compressed mode zero-initializes
    the reference states, whose mixed copies W @ 0 are zero too."""
    if mode not in ("plain", "compressed"):
        raise ConfigurationError(f"mode must be 'plain' or 'compressed', got {mode!r}")
    n, d, p = problem.n, problem.d, problem.p
    x = np.empty((n, d))
    G = np.empty((n, p))
    Ghat = np.empty((n, d, p))
    for i in range(n):
        rng = agent_rng(seed, i, 0)
        x[i] = 0.1 * rng.standard_normal(d)
        sample = problem.inner_draw(i, 1, rng)
        G[i], jac = problem.inner_eval(i, sample, x[i])
        Ghat[i] = jac
    state = NetworkState(x=x, G=G, Ghat=Ghat, y=G.copy(), z=Ghat.copy())
    if mode == "compressed":
        state.hx = np.zeros_like(x)
        state.hy = np.zeros_like(G)
        state.hz = np.zeros_like(Ghat)
        state.hxw = W.mix(state.hx)
        state.hyw = W.mix(state.hy)
        state.hzw = W.mix(state.hz)
    return state


def _check_finite(arrays):
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise DivergenceError("non-finite iterate detected")


def _descent_direction(problem, state, batch, rngs):
    """U rows: z_i @ grad F_i(y_i; zeta), plus the frozen inner samples and
    their evaluations at the current x (drawn before x moves)."""
    n = len(state)
    samples, values_old, jacs_old = [], [], []
    direction = np.empty_like(state.x)
    for i in range(n):
        sample = problem.inner_draw(i, batch, rngs[i])
        v_old, j_old = problem.inner_eval(i, sample, state.x[i])
        fgrad = problem.outer_grad_sample(i, state.y[i], rngs[i])
        direction[i] = state.z[i] @ fgrad
        samples.append(sample)
        values_old.append(v_old)
        jacs_old.append(j_old)
    return direction, samples, values_old, jacs_old


def _hybrid_updates(problem, state, sizes, samples, values_old, jacs_old, x_new):
    """Re-evaluate the frozen samples at the new points and blend:
    G' = (1-beta)(G - G(x_k)) + G(x_{k+1}), same for the Jacobian with gamma."""
    n = len(state)
    G_new = np.empty_like(state.G)
    Ghat_new = np.empty_like(state.Ghat)
    for i in range(n):
        v_new, j_new = problem.inner_eval(i, samples[i], x_new[i])
        G_new[i] = (1.0 - sizes.beta) * (state.G[i] - values_old[i]) + v_new
        Ghat_new[i] = (1.0 - sizes.gamma) * (state.Ghat[i] - jacs_old[i]) + j_new
    return G_new, Ghat_new


def dascgd_step(state, W, problem, sizes, batch, rngs):
    """One uncompressed round; returns (new_state, bits transmitted).

    x' = W x - alpha U, hybrid updates of G and Ghat on the shared sample,
    tracker updates y' = W y + G' - G and z' = W z + Ghat' - Ghat."""
    direction, samples, values_old, jacs_old = _descent_direction(problem, state, batch, rngs)
    x_new = W.mix(state.x) - sizes.alpha * direction
    G_new, Ghat_new = _hybrid_updates(problem, state, sizes, samples, values_old, jacs_old, x_new)
    y_new = W.mix(state.y) + G_new - state.G
    z_new = W.mix(state.z) + Ghat_new - state.Ghat
    _check_finite((x_new, G_new, Ghat_new, y_new, z_new))
    bits = W.directed_edges * (problem.d + problem.p + problem.d * problem.p) * 64
    return NetworkState(x=x_new, G=G_new, Ghat=Ghat_new, y=y_new, z=z_new), bits


def comm(v, h, h_w, compressor, alpha_scale, W, rngs):
    """Difference-compression exchange against reference states.

    Q = C(v - h); v_hat = h + Q; v_hat_w = h_w + W Q;
    h' = (1-a) h + a v_hat; h_w' = (1-a) h_w + a v_hat_w.
    Requires the mirror invariant h_w = W h on input; returns
    (v_hat, v_hat_w, h', h_w', bits) where bits counts the compressed Q
    messages over every directed edge (reference states are never sent)."""
    defect = float(np.max(np.abs(h_w - W.mix(h))))
    if defect > MIRROR_TOL * (1.0 + float(np.max(np.abs(h)))):
        raise NumericalError(f"reference mirror desynced from W @ H (defect {defect:.2e})")
    q = np.empty_like(v)
    for i in range(len(v)):
        q[i] = compressor.compress(v[i] - h[i], rngs[i] if rngs is not None else None)
    v_hat = h + q
    v_hat_w = h_w + W.mix(q)
    h_new = (1.0 - alpha_scale) * h + alpha_scale * v_hat
    h_w_new = (1.0 - alpha_scale) * h_w + alpha_scale * v_hat_w
    bits = compressor.bits_per_message(v[0].size) * W.directed_edges
    return v_hat, v_hat_w, h_new, h_w_new, bits


def cdascgd_step(state, W, problem, sizes, compressors, batch, rngs):
    """One compressed round: three comm() exchanges (x, y, z messages with
    their own compressors and scalings), then the same descent/hybrid/tracker
    updates driven by the compressed differences:
    x' = x - alpha_w (x_hat - x_hat_w) - alpha U."""
    comp_x, comp_y, comp_z = compressors
    x_hat, x_hat_w, hx_new, hxw_new, bits_x = comm(
        state.x, state.hx, state.hxw, comp_x, sizes.alpha_x, W, rngs
    )
    y_hat, y_hat_w, hy_new, hyw_new, bits_y = comm(
        state.y, state.hy, state.hyw, comp_y, sizes.alpha_y, W, rngs
    )
    z_hat, z_hat_w, hz_new, hzw_new, bits_z = comm(
        state.z, state.hz, state.hzw, comp_z, sizes.alpha_z, W, rngs
    )
    direction, samples, values_old, jacs_old = _descent_direction(problem, state, batch, rngs)
    x_new = state.x - sizes.alpha_w * (x_hat - x_hat_w) - sizes.alpha * direction
    G_new, Ghat_new = _hybrid_updates(problem, state, sizes, samples, values_old, jacs_old, x_new)
    y_new = state.y - sizes.alpha_w * (y_hat - y_hat_w) + G_new - state.G
    z_new = state.z - sizes.alpha_w * (z_hat - z_hat_w) + Ghat_new - state.Ghat
    _check_finite((x_new, G_new, Ghat_new, y_new, z_new))
    new_state = NetworkState(
        x=x_new, G=G_new, Ghat=Ghat_new, y=y_new, z=z_new,
        hx=hx_new, hy=hy_new, hz=hz_new, hxw=hxw_new, hyw=hyw_new, hzw=hzw_new,
    )
    return new_state, bits_x + bits_y + bits_z


_W_SINGLE = None


def _single_agent_matrix():
    global _W_SINGLE
    if _W_SINGLE is None:
        _W_SINGLE = MixingMatrix(np.ones((1, 1)), name="single")
    return _W_SINGLE


def centralized_step(state, problem, sizes, batch, rng):
    """Single aggregated agent running the same recursion with W = [1]; the
    problem should be a pooled view so each round consumes batch * n samples."""
    return dascgd_step(state, _single_agent_matrix(), problem, sizes, batch, [rng])


ALGORITHMS = ("dascgd", "cdascgd", "central")


def run(problem, W, algo, sizes, K, batch, seed, compressors=None, metric_every=1, x_star=None):
    """Execute K synchronous rounds from a fresh initialization and record
    metrics; deterministic given ``seed``.  Returns a harness RunRecord."""
    from .harness import RunRecord, metrics  # local import: harness drives run()

    if K < 1:
        raise ConfigurationError(f"K must be >= 1, got {K}")
    if algo not in ALGORITHMS:
        raise ConfigurationError(f"algo must be one of {ALGORITHMS}, got {algo!r}")
    if algo == "cdascgd" and compressors is None:
        raise ConfigurationError("cdascgd requires a (C_x, C_y, C_z) compressor triple")
    if algo != "cdascgd" and compressors is not None:
        raise ConfigurationError(f"compressors are only valid with cdascgd, not {algo!r}")

    score_problem = problem
    if algo == "central":
        problem = pool_problem(problem)
        W = _single_agent_matrix()

    if x_star is None:
        from .problem import solve_optimal

        x_star = solve_optimal(score_problem)
    h_star = float(score_problem.full_objective(x_star))

    mode = "compressed" if algo == "cdascgd" else "plain"
    state = init_states(problem, W, mode=mode, seed=seed)

    record = RunRecord(
        metadata={
            "algo": algo,
            "topology": W.name,
            "n": problem.n,
            "d": problem.d,
            "p": problem.p,
            "K": K,
            "batch": batch,
            "seed": seed,
            "rho": W.rho,
            "stepsizes": {
                "alpha": sizes.alpha, "beta": sizes.beta, "gamma": sizes.gamma,
                "alpha_w": sizes.alpha_w, "alpha_x": sizes.alpha_x,
                "alpha_y": sizes.alpha_y, "alpha_z": sizes.alpha_z,
            },
            "compressors": [c.spec() for c in compressors] if compressors else None,
            "metric_every": metric_every,
            "bits_scope": "network total over all directed edges",
            "stepsize_feasibility_checked": False,
        },
    )
    bits_total = 0
    record.append(0, metrics(state, score_problem, x_star, h_star), bits_total)
    for k in range(1, K + 1):
        rngs = round_rngs(seed, problem.n, k)
        try:
            if algo == "dascgd":
                state, bits = dascgd_step(state, W, problem, sizes, batch, rngs)
            elif algo == "cdascgd":
                state, bits = cdascgd_step(state, W, problem, sizes, compressors, batch, rngs)
            else:
                state, bits = centralized_step(state, problem, sizes, batch, rngs[0])
        except DivergenceError as exc:
            raise DivergenceError(f"round {k}: {exc}", round_index=k) from exc
        bits_total += bits
        if k % metric_every == 0 or k == K:
            row = metrics(state, score_problem, x_star, h_star)
            if not all(np.isfinite(v) for v in row.values()):
                raise DivergenceError(f"round {k}: non-finite metric", round_index=k)
            record.append(k, row, bits_total)
    return record
