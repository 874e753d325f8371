"""Contractive message compressors with exact transmitted-bit accounting.

Every compressor C targets the contract E||C(x)/r - x||^2 <= (1 - psi)||x||^2
for some r > 0, psi in (0, 1].  Matrices are compressed by column-stacking
into a vector and reshaping back.

Bit conventions (so bit plots are reproducible): floats cost 64 bits; the
quantizer sends one 64-bit scale per message plus ``l`` bits per entry; the
sparsifier sends 64 + ceil(log2(m)) bits per kept entry (value + index).
"""

import numpy as np

from ._kernels import quantize_values
from .errors import ConfigurationError

FLOAT_BITS = 64


def quantize_lbit(x, nbits, rng):
    """Stochastic l-bit quantizer: returns (compressed, bits).

    C(x) = xmax/2^(l-1) * sign(x) * floor(2^(l-1)|x|/xmax + u) with u uniform
    on [0,1]^m and xmax the largest absolute entry; the zero vector maps to
    zero (only the scale is sent)."""
    if nbits < 1:
        raise ConfigurationError(f"nbits must be >= 1, got {nbits}")
    x = np.ascontiguousarray(x, dtype=float)
    m = x.size
    if m < 1:
        raise ConfigurationError("cannot compress an empty vector")
    u = rng.random(m)
    out = quantize_values(x, u, nbits)
    return out, m * nbits + FLOAT_BITS


def top_t(x, keep):
    """Keep the ``keep`` largest-magnitude entries (ties: lowest index),
    zero the rest.  Returns (compressed, bits)."""
    x = np.asarray(x, dtype=float)
    m = x.size
    if not 1 <= keep <= m:
        raise ConfigurationError(f"keep must be in [1, {m}], got {keep}")
    order = np.argsort(-np.abs(x), kind="stable")
    out = np.zeros_like(x)
    kept = order[:keep]
    out[kept] = x[kept]
    return out, keep * (FLOAT_BITS + _index_bits(m))


def _index_bits(m):
    return (m - 1).bit_length()


class Compressor:
    """Shape-preserving operator; 2-D inputs are column-stacked first."""

    kind = "base"

    def compress(self, x, rng=None):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self._compress_vector(x, rng)
        stacked = self._compress_vector(x.flatten(order="F"), rng)
        return stacked.reshape(x.shape, order="F")

    def _compress_vector(self, x, rng):
        raise NotImplementedError

    def bits_per_message(self, m):
        raise NotImplementedError

    def nominal_contract(self, m):
        """Exact (r, psi) when known, else None (estimate empirically)."""
        return None

    def __repr__(self):
        return self.spec()

    def spec(self):
        raise NotImplementedError


class IdentityCompressor(Compressor):
    kind = "identity"

    def _compress_vector(self, x, rng):
        return x.copy()

    def bits_per_message(self, m):
        return m * FLOAT_BITS

    def nominal_contract(self, m):
        return 1.0, 1.0

    def spec(self):
        return "none"


class LBitQuantizer(Compressor):
    kind = "quantizer"

    def __init__(self, nbits):
        if nbits < 1:
            raise ConfigurationError(f"nbits must be >= 1, got {nbits}")
        self.nbits = int(nbits)

    def _compress_vector(self, x, rng):
        out, _ = quantize_lbit(x, self.nbits, rng)
        return out

    def bits_per_message(self, m):
        return m * self.nbits + FLOAT_BITS

    def spec(self):
        return f"quant:l={self.nbits}"


class TopTSparsifier(Compressor):
    kind = "top_t"

    def __init__(self, keep):
        if keep < 1:
            raise ConfigurationError(f"keep must be >= 1, got {keep}")
        self.keep = int(keep)

    def _compress_vector(self, x, rng):
        out, _ = top_t(x, self.keep)
        return out

    def bits_per_message(self, m):
        if self.keep > m:
            raise ConfigurationError(f"keep={self.keep} exceeds message size {m}")
        return self.keep * (FLOAT_BITS + _index_bits(m))

    def nominal_contract(self, m):
        return 1.0, self.keep / m

    def spec(self):
        return f"topt:t={self.keep}"


def parse_compressor(text):
    """CLI string to compressor: 'none', 'quant:l=2', 'topt:t=10'."""
    text = text.strip().lower()
    if text in ("none", "identity", ""):
        return IdentityCompressor()
    if ":" in text:
        head, _, arg = text.partition(":")
        key, _, value = arg.partition("=")
        try:
            value = int(value)
        except ValueError as exc:
            raise ConfigurationError(f"bad compressor spec {text!r}") from exc
        if head == "quant" and key == "l":
            return LBitQuantizer(value)
        if head == "topt" and key == "t":
            return TopTSparsifier(value)
    raise ConfigurationError(
        f"unknown compressor {text!r}; expected none, quant:l=INT, or topt:t=INT"
    )


def contract_estimate(compressor, m, trials, rng):
    """Empirical contract constants (r_hat, psi_hat) over ``trials`` standard
    normal vectors: r_hat is the scaling minimizing the mean relative error,
    psi_hat = 1 - max observed ||C(x)/r_hat - x||^2 / ||x||^2.

    Identity and top-t contracts are exact and returned directly."""
    if trials < 100:
        raise ConfigurationError(f"trials must be >= 100, got {trials}")
    exact = compressor.nominal_contract(m)
    if exact is not None:
        return exact
    draws = rng.standard_normal((trials, m))
    outputs = np.stack([compressor.compress(x, rng) for x in draws])
    sq_norms = (draws**2).sum(axis=1)
    cross = (outputs * draws).sum(axis=1) / sq_norms
    energy = (outputs**2).sum(axis=1) / sq_norms
    denom = cross.sum()
    r_hat = energy.sum() / denom if denom > 0 else 1.0
    ratios = ((outputs / r_hat - draws) ** 2).sum(axis=1) / sq_norms
    return float(r_hat), float(1.0 - ratios.max())
