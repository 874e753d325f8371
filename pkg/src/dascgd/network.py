"""Gossip weight matrices for ring and exponential-hop topologies.

All matrices are nonnegative and doubly stochastic; the cached spectral gap
rho = ||W - 11^T/n||_2 < 1 (for connected graphs) governs how fast repeated
mixing contracts disagreement between agents.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, TopologyError

STOCHASTICITY_TOL = 1e-12


@dataclass(frozen=True)
class StochasticityReport:
    ok: bool
    max_row_defect: float
    max_col_defect: float
    min_entry: float


def validate_doubly_stochastic(W, tol=STOCHASTICITY_TOL):
    """Diagnostic check: row sums, column sums and nonnegativity."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise TopologyError(f"weight matrix must be square, got shape {W.shape}")
    row = float(np.max(np.abs(W.sum(axis=1) - 1.0)))
    col = float(np.max(np.abs(W.sum(axis=0) - 1.0)))
    low = float(W.min())
    return StochasticityReport(row <= tol and col <= tol and low >= 0.0, row, col, low)


def spectral_gap(W, tol=1e-10, max_iter=100_000):
    """rho = ||W - 11^T/n||_2 via power iteration on M = (W-J)(W-J)^T.

    Stops on the eigen-residual ||Mv - lam v|| <= tol * lam, which bounds the
    error of the Rayleigh estimate directly (M is symmetric PSD)."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    centered = W - 1.0 / n
    M = centered @ centered.T
    v = np.random.default_rng(0x5EC7).standard_normal(n)
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = M @ v
        norm_w = np.linalg.norm(w)
        if norm_w < 1e-300:
            return 0.0
        v = w / norm_w
        Mv = M @ v
        lam = float(v @ Mv)
        if np.linalg.norm(Mv - lam * v) <= tol * max(lam, 1e-30):
            return math.sqrt(max(lam, 0.0))
    raise NumericalError(f"power iteration did not converge in {max_iter} iterations")


class MixingMatrix:
    """Validated doubly stochastic gossip matrix with cached spectral gap and
    neighbor lists.  Immutable after construction."""

    def __init__(self, W, name="custom"):
        W = np.array(W, dtype=float)
        report = validate_doubly_stochastic(W)
        if not report.ok:
            raise TopologyError(
                "matrix is not doubly stochastic: "
                f"row defect {report.max_row_defect:.2e}, "
                f"col defect {report.max_col_defect:.2e}, "
                f"min entry {report.min_entry:.2e}"
            )
        self.n = W.shape[0]
        self.W = W
        self.W.setflags(write=False)
        self.name = name
        self.rho = spectral_gap(W)
        idx = np.arange(self.n)
        self.out_neighbors = tuple(
            np.flatnonzero((W[i] > 0) & (idx != i)) for i in range(self.n)
        )
        self.directed_edges = int(sum(len(nb) for nb in self.out_neighbors))

    def mix(self, values):
        """Apply W blockwise: values has shape (n, ...) with one row per agent."""
        flat = values.reshape(self.n, -1)
        return (self.W @ flat).reshape(values.shape)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.W:
                writer.writerow([repr(float(v)) for v in row])

    def __repr__(self):
        return f"MixingMatrix({self.name}, n={self.n}, rho={self.rho:.6f})"


def ring_weights(n):
    """Ring: 0.5 self weight, 0.25 to each ring neighbor (with wraparound)."""
    if n < 3:
        raise TopologyError(f"ring needs n >= 3 (wrap edge duplicates below), got {n}")
    W = np.zeros((n, n))
    np.fill_diagonal(W, 0.5)
    for i in range(n):
        W[i, (i + 1) % n] = 0.25
        W[i, (i - 1) % n] = 0.25
    return MixingMatrix(W, name=f"ring({n})")


def exponential_weights(n):
    """Exponential graph: node i links to i +/- 2^m (mod n) for
    m = 0..floor(log2(n-1)); self-inclusive uniform weights.  The hop set is
    the same for every node, so the circulant result is already doubly
    stochastic; a Sinkhorn pass repairs any residual defect."""
    if n < 2:
        raise TopologyError(f"exponential graph needs n >= 2, got {n}")
    hops = {2**m % n for m in range(int(math.floor(math.log2(n - 1))) + 1)}
    hops |= {(n - h) % n for h in hops}
    hops.discard(0)
    weight = 1.0 / (len(hops) + 1)
    W = np.zeros((n, n))
    np.fill_diagonal(W, weight)
    for i in range(n):
        for h in hops:
            W[i, (i + h) % n] = weight
    if not validate_doubly_stochastic(W).ok:
        W = _sinkhorn(W)
    return MixingMatrix(W, name=f"exponential({n})")


def _sinkhorn(W, tol=STOCHASTICITY_TOL, max_passes=1000):
    """Alternate row/column normalization until doubly stochastic."""
    W = np.array(W, dtype=float)
    for _ in range(max_passes):
        W /= W.sum(axis=1, keepdims=True)
        W /= W.sum(axis=0, keepdims=True)
        if validate_doubly_stochastic(W).ok:
            return W
    raise TopologyError(f"Sinkhorn balancing did not converge in {max_passes} passes")
