"""Acceptance suite: one test per release criterion, each printing a
[PASS]/[FAIL] line (run with ``pytest tests/test_acceptance.py -v -s``).

The convergence checks mirror the benchmark configuration: ring of 6 agents,
alpha = beta = gamma = 0.01, batch 5, d = 32, 100 states, ridge 1, K = 5000,
10 seeds averaged.
"""

import time

import numpy as np
import pytest

from dascgd.algorithms import StepSizes, cdascgd_step, dascgd_step, init_states, round_rngs, run
from dascgd.compressors import IdentityCompressor, LBitQuantizer, contract_estimate, top_t
from dascgd.network import ring_weights
from dascgd.problem import generate_instance, solve_optimal

BENCH_SEEDS = range(10)


def report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def bench():
    inst = generate_instance(6, 32, 100, discount=0.95, ridge=1.0, seed=7)
    return inst, ring_weights(6), solve_optimal(inst)


@pytest.fixture(scope="module")
def desk_scale_dascgd(bench):
    """Benchmark-config uncompressed runs, 10 seeds; shared by two criteria."""
    inst, W, x_star = bench
    sizes = StepSizes(alpha=0.01, beta=0.01, gamma=0.01)
    start = time.perf_counter()
    records = [
        run(inst, W, "dascgd", sizes, K=5000, batch=5, seed=s, x_star=x_star, metric_every=10)
        for s in BENCH_SEEDS
    ]
    return records, time.perf_counter() - start


def test_reduction_oracle():
    inst = generate_instance(6, 5, 10, seed=3)
    W = ring_weights(6)
    sizes = StepSizes(
        alpha=0.01, beta=0.01, gamma=0.01, alpha_w=1.0, alpha_x=1.0, alpha_y=1.0, alpha_z=1.0
    )
    identity = (IdentityCompressor(),) * 3
    plain = init_states(inst, W, "plain", seed=9)
    compressed = init_states(inst, W, "compressed", seed=9)
    start = time.perf_counter()
    worst = 0.0
    for k in range(1, 101):
        plain, _ = dascgd_step(plain, W, inst, sizes, 5, round_rngs(9, 6, k))
        compressed, _ = cdascgd_step(compressed, W, inst, sizes, identity, 5, round_rngs(9, 6, k))
        for name in ("x", "G", "Ghat", "y", "z"):
            a, b = getattr(plain, name), getattr(compressed, name)
            # relative error with matching absolute floor for coordinates
            # transiting zero (iterate scales here are 1e-2..3)
            worst = max(worst, float(np.max(np.abs(a - b) / (np.abs(a) + 1e-12))))
            np.testing.assert_allclose(b, a, rtol=1e-12, atol=1e-12)
    elapsed = time.perf_counter() - start
    report(
        "reduction oracle",
        elapsed < 5.0,
        f"identity-compressed run matches uncompressed within rtol/atol 1e-12 "
        f"over 100 rounds (worst scaled deviation {worst:.2e}), {elapsed:.2f}s < 5s",
    )


def test_tracking_identities():
    inst = generate_instance(6, 8, 20, seed=12)
    W = ring_weights(6)
    sizes = StepSizes(alpha=0.01, beta=0.05, gamma=0.05)
    quant = (LBitQuantizer(2),) * 3
    worst_track = 0.0
    worst_mirror = 0.0
    plain = init_states(inst, W, "plain", seed=1)
    compressed = init_states(inst, W, "compressed", seed=1)
    for k in range(1, 1001):
        plain, _ = dascgd_step(plain, W, inst, sizes, 2, round_rngs(1, 6, k))
        compressed, _ = cdascgd_step(compressed, W, inst, sizes, quant, 2, round_rngs(1, 6, k))
        for state in (plain, compressed):
            worst_track = max(
                worst_track,
                float(np.linalg.norm(state.y.mean(0) - state.G.mean(0))),
                float(np.linalg.norm(state.z.mean(0) - state.Ghat.mean(0))),
            )
        for h, hw in (
            (compressed.hx, compressed.hxw),
            (compressed.hy, compressed.hyw),
            (compressed.hz, compressed.hzw),
        ):
            worst_mirror = max(worst_mirror, float(np.max(np.abs(hw - W.mix(h)))))
    report(
        "tracking identities",
        worst_track <= 1e-9 and worst_mirror <= 1e-9,
        f"1000 rounds, both algorithms: max tracker deviation {worst_track:.2e} <= 1e-9, "
        f"max reference-mirror defect {worst_mirror:.2e} <= 1e-9",
    )


def test_oracle_correctness():
    rng = np.random.default_rng(0)
    worst_fd = 0.0
    worst_opt = 0.0
    for seed in range(3):
        inst = generate_instance(3, 6, 10, seed=seed)
        for _ in range(10):
            x = rng.standard_normal(inst.d)
            grad = inst.full_gradient(x)
            fd = np.empty_like(x)
            for i in range(x.size):
                hi, lo = x.copy(), x.copy()
                hi[i] += 1e-5
                lo[i] -= 1e-5
                fd[i] = (inst.full_objective(hi) - inst.full_objective(lo)) / 2e-5
            worst_fd = max(worst_fd, float(np.linalg.norm(grad - fd) / np.linalg.norm(fd)))
        worst_opt = max(
            worst_opt, float(np.linalg.norm(inst.full_gradient(solve_optimal(inst))))
        )
    report(
        "oracle correctness",
        worst_fd < 1e-6 and worst_opt < 1e-8,
        f"gradient vs central differences rel err {worst_fd:.2e} < 1e-6; "
        f"|grad h(x*)| {worst_opt:.2e} < 1e-8",
    )


def test_spectral_gap_and_contraction():
    worst_gap = 0.0
    for n in (4, 6, 12, 24):
        W = ring_weights(n)
        formula = 0.5 + 0.5 * np.cos(2 * np.pi / n)
        worst_gap = max(worst_gap, abs(W.rho - formula))
    W = ring_weights(6)
    rng = np.random.default_rng(5)
    v = rng.standard_normal(6)
    base = np.linalg.norm(v - v.mean())
    contraction_ok = True
    current = v.copy()
    for k in range(1, 51):
        current = W.W @ current
        dev = np.linalg.norm(current - current.mean())
        contraction_ok &= dev <= W.rho**k * base * (1 + 1e-8) + 1e-12 * base
    report(
        "spectral gap",
        worst_gap <= 1e-8 and contraction_ok,
        f"ring gap vs circulant formula within {worst_gap:.2e} <= 1e-8 for n in 4,6,12,24; "
        f"powers contract at rate rho for k <= 50: {contraction_ok}",
    )


def test_compressor_contracts():
    rng = np.random.default_rng(4)
    violations = 0
    for _ in range(10_000):
        m = int(rng.integers(2, 40))
        keep = int(rng.integers(1, m + 1))
        x = rng.standard_normal(m)
        out, _ = top_t(x, keep)
        if np.sum((out - x) ** 2) > (1 - keep / m) * np.sum(x**2) * (1 + 1e-12):
            violations += 1
    psi = {}
    for nbits in (2, 4):
        _, psi_hat = contract_estimate(LBitQuantizer(nbits), 32, 10_000, np.random.default_rng(11))
        psi[nbits] = psi_hat
    report(
        "compressor contracts",
        violations == 0 and psi[2] > 0 and psi[4] > 0,
        f"top-t contraction violations {violations}/10000; "
        f"quantizer psi_hat l=2: {psi[2]:.3f} > 0, l=4: {psi[4]:.3f} > 0",
    )


def test_convergence_at_desk_scale(desk_scale_dascgd):
    records, elapsed = desk_scale_dascgd
    res0 = np.mean([r.initial("avg_residual") for r in records])
    res_final = np.mean([r.final("avg_residual") for r in records])
    gsq0 = np.mean([r.initial("avg_grad_sq") for r in records])
    gsq_final = np.mean([r.final("avg_grad_sq") for r in records])
    cons0 = np.mean([r.initial("consensus_x") for r in records])
    cons_final = np.mean([r.final("consensus_x") for r in records])
    ok = (
        res_final <= res0 / 10
        and gsq_final <= 0.1 * gsq0
        and cons_final <= cons0 / 10
        and elapsed < 300.0
    )
    report(
        "convergence at desk scale",
        ok,
        f"residual {res0:.3e} -> {res_final:.3e} (x{res0 / res_final:.0f}), "
        f"grad_sq {gsq0:.3e} -> {gsq_final:.3e}, "
        f"consensus_x {cons0:.3e} -> {cons_final:.3e}, "
        f"10 seeds in {elapsed:.0f}s < 300s",
    )


def test_rate_trend(bench):
    inst, W, x_star = bench
    averages = {}
    for horizon in (2000, 8000):
        sizes = StepSizes.sqrt_horizon(0.3, 0.3, 0.3, horizon)
        per_seed = []
        for s in BENCH_SEEDS:
            rec = run(inst, W, "dascgd", sizes, K=horizon, batch=5, seed=s, x_star=x_star)
            per_seed.append(rec.column("avg_grad_sq")[1:].mean())
        averages[horizon] = float(np.mean(per_seed))
    ratio = averages[8000] / averages[2000]
    report(
        "rate trend",
        ratio <= 0.75,
        f"M(2000)={averages[2000]:.3e}, M(8000)={averages[8000]:.3e}, "
        f"ratio {ratio:.3f} <= 0.75 (theory 0.5)",
    )


def test_compression_parity(bench, desk_scale_dascgd):
    inst, W, x_star = bench
    d_records, _ = desk_scale_dascgd
    sizes = StepSizes(alpha=0.01, beta=0.01, gamma=0.01)
    quant = (LBitQuantizer(4),) * 3
    c_records = [
        run(
            inst, W, "cdascgd", sizes, K=5000, batch=5, seed=s,
            x_star=x_star, compressors=quant, metric_every=10,
        )
        for s in BENCH_SEEDS
    ]
    res_d = np.mean([r.final("avg_residual") for r in d_records])
    res_c = np.mean([r.final("avg_residual") for r in c_records])
    ratio = res_c / res_d

    # exact bit accounting per message class: compressed bits * 64m must equal
    # uncompressed bits * (4m + 64)
    edges, K = W.directed_edges, 5000
    bits_ok = True
    for m in (inst.d, inst.p, inst.d * inst.p):
        compressed_bits = K * edges * (4 * m + 64)
        uncompressed_bits = K * edges * 64 * m
        bits_ok &= compressed_bits * 64 * m == uncompressed_bits * (4 * m + 64)
        bits_ok &= compressed_bits <= uncompressed_bits
    total_c = K * edges * sum(4 * m + 64 for m in (inst.d, inst.p, inst.d * inst.p))
    total_d = K * edges * 64 * (inst.d + inst.p + inst.d * inst.p)
    bits_ok &= all(int(r.final("bits_cumulative")) == total_c for r in c_records)
    bits_ok &= all(int(r.final("bits_cumulative")) == total_d for r in d_records)
    report(
        "compression parity",
        ratio <= 3.0 and bits_ok,
        f"final residual compressed/uncompressed = {ratio:.2f} <= 3; "
        f"per-class bit counts exact ({total_c / total_d:.4f} of uncompressed)",
    )
