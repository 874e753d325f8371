"""Experiment orchestration: metric computation, CSV emission, seed sweeps.

Metrics are computed with the exact oracles (never samples), so the recorded
curves are noise-free functions of the iterates.  Bits are network totals
over all directed edges.  Identical config + seed produces byte-identical
CSV files.
"""

import json
import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .algorithms import StepSizes, run
from .compressors import parse_compressor
from .errors import ConfigurationError
from .network import exponential_weights, ring_weights
from .problem import generate_instance, solve_optimal

log = logging.getLogger("dascgd")
log.addHandler(logging.NullHandler())
if os.environ.get("DASCGD_LOG"):
    logging.basicConfig(level=os.environ["DASCGD_LOG"].upper())

METRIC_COLUMNS = (
    "k",
    "avg_residual",
    "avg_grad_sq",
    "consensus_x",
    "consensus_y",
    "consensus_z",
    "track_err_y",
    "track_err_z",
    "bits_cumulative",
)
CSV_HEADER = ",".join(METRIC_COLUMNS)


def metrics(state, problem, x_star, h_star=None):
    """Exact metric row for the current iterates.

    avg_residual = mean_j h(x_j) - h(x*); avg_grad_sq = mean_j ||grad h(x_j)||^2;
    consensus_v = ||v - 1 (x) vbar||^2; track_err_* = distance between the mean
    tracker and the mean estimate it follows."""
    if h_star is None:
        h_star = float(problem.full_objective(x_star))
    X = state.x
    with np.errstate(over="ignore", invalid="ignore"):
        values = np.atleast_1d(problem.full_objective(X))
        grads = np.atleast_2d(problem.full_gradient(X))
        return {
            "avg_residual": float(values.mean() - h_star),
            "avg_grad_sq": float((grads**2).sum(axis=1).mean()),
            "consensus_x": float(((X - X.mean(axis=0)) ** 2).sum()),
            "consensus_y": float(((state.y - state.y.mean(axis=0)) ** 2).sum()),
            "consensus_z": float(((state.z - state.z.mean(axis=0)) ** 2).sum()),
            "track_err_y": float(np.linalg.norm(state.y.mean(axis=0) - state.G.mean(axis=0))),
            "track_err_z": float(np.linalg.norm(state.z.mean(axis=0) - state.Ghat.mean(axis=0))),
        }


@dataclass
class RunRecord:
    """Metadata plus one metric row per recorded round."""

    metadata: dict
    rows: list = field(default_factory=list)

    def append(self, k, metric_row, bits_cumulative):
        self.rows.append(
            (
                int(k),
                metric_row["avg_residual"],
                metric_row["avg_grad_sq"],
                metric_row["consensus_x"],
                metric_row["consensus_y"],
                metric_row["consensus_z"],
                metric_row["track_err_y"],
                metric_row["track_err_z"],
                int(bits_cumulative),
            )
        )

    def column(self, name):
        idx = METRIC_COLUMNS.index(name)
        return np.array([row[idx] for row in self.rows])

    def initial(self, name):
        return self.column(name)[0]

    def final(self, name):
        return self.column(name)[-1]

    def to_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(CSV_HEADER + "\n")
            for row in self.rows:
                fh.write(",".join(_format_cell(v) for v in row) + "\n")

    @staticmethod
    def mean_of(records):
        """Row-wise arithmetic mean across seeds (rows must align on k)."""
        first = records[0]
        ks = first.column("k")
        for rec in records[1:]:
            if not np.array_equal(rec.column("k"), ks):
                raise ConfigurationError("records do not share a metric cadence")
        stacked = np.stack([[row[1:] for row in rec.rows] for rec in records])
        averaged = stacked.mean(axis=0)
        out = RunRecord(metadata={**first.metadata, "seed": [r.metadata["seed"] for r in records]})
        for k, row in zip(ks, averaged):
            out.rows.append((int(k), *[float(v) for v in row]))
        return out


def _format_cell(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def bits_for_round(algo, n, d, p, compressors, edge_count):
    """Bits transmitted network-wide in one round.

    Uncompressed: every agent sends x, y and z as raw floats over each
    directed edge.  Compressed: only the three compressed difference
    messages are sent."""
    if min(n, d, p) < 1:
        raise ConfigurationError("dimensions must be positive")
    if algo in ("dascgd", "central"):
        return edge_count * (d + p + d * p) * 64
    if algo == "cdascgd":
        comp_x, comp_y, comp_z = compressors
        return edge_count * (
            comp_x.bits_per_message(d)
            + comp_y.bits_per_message(p)
            + comp_z.bits_per_message(d * p)
        )
    raise ConfigurationError(f"unknown algo {algo!r}")


@dataclass
class RunConfig:
    """One experiment: a problem instance, a topology, an algorithm, and the
    sweep settings.  CLI flags override file values (see ``cli``)."""

    algo: str = "dascgd"
    topology: str = "ring"
    n: int = 6
    d: int = 32
    states: int = 100
    k: int = 5000
    alpha: float = 0.01
    beta: float = 0.01
    gamma: float = 0.01
    alpha_w: float = 0.5
    alpha_x: float = 0.5
    alpha_y: float = 0.5
    alpha_z: float = 0.5
    compressor_x: str = "none"
    compressor_y: str = "none"
    compressor_z: str = "none"
    batch: int = 5
    reps: int = 10
    seed: int = 0
    out: str = "runs"
    discount: float = 0.95
    ridge: float = 1.0
    metric_every: int = 1
    schedule: str = "const"

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            payload = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(payload) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**payload)

    def with_overrides(self, **overrides):
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def validate(self):
        if self.algo not in ("dascgd", "cdascgd", "central"):
            raise ConfigurationError(f"unknown algo {self.algo!r}")
        if self.topology not in ("ring", "exp"):
            raise ConfigurationError(f"unknown topology {self.topology!r}")
        if self.reps < 1:
            raise ConfigurationError(f"reps must be >= 1, got {self.reps}")
        if self.k < 1:
            raise ConfigurationError(f"k must be >= 1, got {self.k}")
        if self.metric_every < 1:
            raise ConfigurationError(f"metric_every must be >= 1, got {self.metric_every}")
        if self.schedule not in ("const", "sqrtk"):
            raise ConfigurationError(f"schedule must be const or sqrtk, got {self.schedule!r}")
        compressed = any(
            spec not in ("none", "") for spec in
            (self.compressor_x, self.compressor_y, self.compressor_z)
        )
        if compressed and self.algo != "cdascgd":
            raise ConfigurationError(
                f"compressors require algo=cdascgd, got algo={self.algo!r}"
            )
        return self

    def mixing_matrix(self):
        if self.topology == "ring":
            return ring_weights(self.n)
        return exponential_weights(self.n)

    def stepsizes(self):
        scalings = dict(
            alpha_w=self.alpha_w, alpha_x=self.alpha_x,
            alpha_y=self.alpha_y, alpha_z=self.alpha_z,
        )
        if self.schedule == "sqrtk":
            return StepSizes.sqrt_horizon(self.alpha, self.beta, self.gamma, self.k, **scalings)
        return StepSizes(alpha=self.alpha, beta=self.beta, gamma=self.gamma, **scalings)

    def compressor_triple(self):
        if self.algo != "cdascgd":
            return None
        return (
            parse_compressor(self.compressor_x),
            parse_compressor(self.compressor_y),
            parse_compressor(self.compressor_z),
        )

    def stem(self):
        return f"{self.algo}_{self.topology}_n{self.n}"


def run_experiment(config, instance=None):
    """Run ``config.reps`` seeded repetitions, write one CSV per seed plus the
    mean-across-seeds CSV and a metadata sidecar, and return the records.

    Rep r uses master seed ``config.seed + r``; all reps share one problem
    instance generated from ``config.seed``."""
    config.validate()
    if instance is None:
        instance = generate_instance(
            config.n, config.d, config.states,
            discount=config.discount, ridge=config.ridge, seed=config.seed,
        )
    W = config.mixing_matrix()
    sizes = config.stepsizes()
    compressors = config.compressor_triple()
    x_star = solve_optimal(instance)

    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for rep in range(config.reps):
        rep_seed = config.seed + rep
        log.info("rep %d/%d (seed %d)", rep + 1, config.reps, rep_seed)
        rec = run(
            instance, W, config.algo, sizes, config.k, config.batch, rep_seed,
            compressors=compressors, metric_every=config.metric_every, x_star=x_star,
        )
        rec.to_csv(out_dir / f"{config.stem()}_seed{rep_seed}.csv")
        records.append(rec)
    mean_rec = RunRecord.mean_of(records)
    mean_rec.to_csv(out_dir / f"{config.stem()}_mean.csv")
    with open(out_dir / f"{config.stem()}_meta.json", "w") as fh:
        json.dump(mean_rec.metadata, fh, indent=2)

    summary = {
        "final_avg_residual": mean_rec.final("avg_residual"),
        "final_avg_grad_sq": mean_rec.final("avg_grad_sq"),
        "total_bits": int(mean_rec.final("bits_cumulative")),
        "csv": str(out_dir / f"{config.stem()}_mean.csv"),
    }
    print(
        f"{config.stem()}: final avg_residual={summary['final_avg_residual']:.6e} "
        f"avg_grad_sq={summary['final_avg_grad_sq']:.6e} bits={summary['total_bits']}"
    )
    return records, mean_rec, summary
