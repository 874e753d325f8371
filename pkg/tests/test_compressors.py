import numpy as np
import pytest

from dascgd.compressors import (
    IdentityCompressor,
    LBitQuantizer,
    TopTSparsifier,
    contract_estimate,
    parse_compressor,
    quantize_lbit,
    top_t,
)
from dascgd.errors import ConfigurationError


class PinnedRng:
    """Stands in for a Generator; returns a fixed uniform vector."""

    def __init__(self, u):
        self.u = np.asarray(u, dtype=float)

    def random(self, size):
        assert size == self.u.size
        return self.u.copy()


# --- quantizer ------------------------------------------------------------


def test_quantize_zero_vector():
    out, bits = quantize_lbit(np.zeros(3), 2, np.random.default_rng(0))
    np.testing.assert_array_equal(out, np.zeros(3))
    assert bits == 3 * 2 + 64


def test_quantize_saturated_entries():
    # |x| = xmax: floor(2 + u) = 2 for any u < 1, so both entries reproduce
    out, bits = quantize_lbit(np.array([1.0, -1.0]), 2, np.random.default_rng(1))
    np.testing.assert_array_equal(out, [1.0, -1.0])
    assert bits == 2 * 2 + 64


def test_quantize_pinned_uniforms():
    # l=2: scale = xmax/2 = 0.4; entry 2 has 2|x|/xmax = 0.5
    # u = 0.3 -> floor(0.8) = 0;  u = 0.6 -> floor(1.1) = 1 -> 0.4
    out, _ = quantize_lbit(np.array([0.8, 0.2]), 2, PinnedRng([0.3, 0.3]))
    np.testing.assert_allclose(out, [0.8, 0.0])
    out, _ = quantize_lbit(np.array([0.8, 0.2]), 2, PinnedRng([0.3, 0.6]))
    np.testing.assert_allclose(out, [0.8, 0.4])


def test_quantize_output_bounded_and_sign_preserving():
    rng = np.random.default_rng(2)
    for nbits in (1, 2, 4, 8):
        for _ in range(200):
            x = rng.standard_normal(rng.integers(1, 40))
            out, _ = quantize_lbit(x, nbits, rng)
            xmax = np.abs(x).max()
            assert np.all(np.abs(out) <= xmax * (1 + 2.0 ** (1 - nbits)) + 1e-15)
            sign = np.sign(out)
            assert np.all((sign == 0) | (sign == np.sign(x)))


def test_quantize_unbiased_in_expectation():
    # stochastic rounding: E floor(a + u) = a, so E C(x) = x entrywise
    rng = np.random.default_rng(3)
    x = np.array([0.7, -0.3, 0.1, 0.9])
    trials = 40_000
    acc = np.zeros_like(x)
    for _ in range(trials):
        out, _ = quantize_lbit(x, 2, rng)
        acc += out
    np.testing.assert_allclose(acc / trials, x, atol=4 * 0.45 / np.sqrt(trials))


def test_quantize_rejects_bad_bits():
    with pytest.raises(ConfigurationError):
        quantize_lbit(np.ones(3), 0, np.random.default_rng(0))


# --- top-t ------------------------------------------------------------------


def test_top_t_keeps_largest_magnitudes():
    out, bits = top_t(np.array([3.0, -5.0, 1.0]), 1)
    np.testing.assert_array_equal(out, [0.0, -5.0, 0.0])
    assert bits == 1 * (64 + 2)


def test_top_t_keep_all_is_identity():
    x = np.array([0.5, -0.1, 2.0])
    out, _ = top_t(x, 3)
    np.testing.assert_array_equal(out, x)


def test_top_t_zero_vector():
    out, _ = top_t(np.zeros(4), 2)
    np.testing.assert_array_equal(out, np.zeros(4))


def test_top_t_tie_breaks_by_lowest_index():
    out, _ = top_t(np.array([2.0, -2.0, 1.0]), 1)
    np.testing.assert_array_equal(out, [2.0, 0.0, 0.0])


def test_top_t_rejects_out_of_range():
    with pytest.raises(ConfigurationError):
        top_t(np.ones(3), 0)
    with pytest.raises(ConfigurationError):
        top_t(np.ones(3), 4)


def test_top_t_exact_contraction_inequality():
    rng = np.random.default_rng(4)
    for _ in range(10_000):
        m = int(rng.integers(2, 24))
        keep = int(rng.integers(1, m + 1))
        x = rng.standard_normal(m)
        out, _ = top_t(x, keep)
        lhs = np.sum((out - x) ** 2)
        rhs = (1 - keep / m) * np.sum(x**2)
        assert lhs <= rhs * (1 + 1e-12)


# --- bit accounting ---------------------------------------------------------


def test_bits_per_message():
    assert IdentityCompressor().bits_per_message(10) == 640
    assert LBitQuantizer(2).bits_per_message(32) == 2 * 32 + 64
    assert TopTSparsifier(10).bits_per_message(1024) == 10 * (64 + 10)
    assert TopTSparsifier(1).bits_per_message(1) == 64  # index costs 0 bits


# --- matrix stacking ---------------------------------------------------------


@pytest.mark.parametrize(
    "comp", [IdentityCompressor(), LBitQuantizer(3), TopTSparsifier(4)]
)
def test_matrix_compression_equals_column_stacked_vector(comp):
    rng = np.random.default_rng(5)
    mat = rng.standard_normal((4, 3))
    as_matrix = comp.compress(mat, PinnedRng(np.linspace(0.05, 0.95, 12)))
    as_vector = comp.compress(mat.flatten(order="F"), PinnedRng(np.linspace(0.05, 0.95, 12)))
    np.testing.assert_array_equal(as_matrix, as_vector.reshape((4, 3), order="F"))


def test_identity_has_zero_error():
    rng = np.random.default_rng(6)
    x = rng.standard_normal(17)
    out = IdentityCompressor().compress(x, rng)
    np.testing.assert_array_equal(out, x)


# --- contract estimation -----------------------------------------------------


def test_contract_estimate_exact_for_top_t():
    r_hat, psi_hat = contract_estimate(TopTSparsifier(3), 12, 100, np.random.default_rng(0))
    assert (r_hat, psi_hat) == (1.0, 0.25)


def test_contract_estimate_exact_for_identity():
    r_hat, psi_hat = contract_estimate(IdentityCompressor(), 8, 100, np.random.default_rng(0))
    assert (r_hat, psi_hat) == (1.0, 1.0)


@pytest.mark.parametrize("nbits", [2, 4])
def test_contract_estimate_quantizer_contracts(nbits):
    r_hat, psi_hat = contract_estimate(
        LBitQuantizer(nbits), 32, 10_000, np.random.default_rng(11)
    )
    assert r_hat > 0
    assert psi_hat > 0


def test_contract_estimate_rejects_few_trials():
    with pytest.raises(ConfigurationError):
        contract_estimate(LBitQuantizer(2), 8, 99, np.random.default_rng(0))


# --- parsing -----------------------------------------------------------------


def test_parse_compressor_specs():
    assert parse_compressor("none").kind == "identity"
    quant = parse_compressor("quant:l=2")
    assert quant.kind == "quantizer" and quant.nbits == 2
    topt = parse_compressor("topt:t=10")
    assert topt.kind == "top_t" and topt.keep == 10
    assert parse_compressor("quant:l=4").spec() == "quant:l=4"


@pytest.mark.parametrize("text", ["quant", "quant:l=x", "gzip:9", "topt:k=3"])
def test_parse_compressor_rejects_junk(text):
    with pytest.raises(ConfigurationError):
        parse_compressor(text)
