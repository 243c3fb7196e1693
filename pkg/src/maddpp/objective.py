"""Accuracy/fairness objective and the lambda grid sweep.

total = (1 - theta) * accuracy_loss + theta * fairness_loss, evaluated for
every lambda on a grid; lambda_star is the grid argmin (ties broken toward
the largest lambda, i.e. toward more fairness).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .densities import G0, bin_index, build_density_vector, madd
from .errors import EmptyGroup, EmptyPopulation, LengthMismatch, MissingLabels
from .transport import FipMap, generalized_inverse

DEFAULT_THETA = 0.5
DEFAULT_THRESHOLD = 0.5
DEFAULT_GRID_SIZE = 1000


def default_lambda_grid(size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """Evenly spaced lambda values over [0, 1] inclusive."""
    return np.linspace(0.0, 1.0, size)


@dataclass(frozen=True)
class ObjectiveConfig:
    theta: float = DEFAULT_THETA
    threshold: float = DEFAULT_THRESHOLD
    m: int = 100
    lambda_grid: np.ndarray = field(default_factory=default_lambda_grid, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "lambda_grid", np.asarray(self.lambda_grid, dtype=float))
        g = self.lambda_grid
        assert 0.0 <= self.theta <= 1.0, "theta must be in [0, 1]"
        assert 0.0 < self.threshold < 1.0, "threshold must be in (0, 1)"
        assert g.size > 0 and np.all(np.diff(g) >= 0), "lambda grid must be sorted, non-empty"
        assert g[0] >= 0.0 and g[-1] <= 1.0, "lambda grid must lie in [0, 1]"


@dataclass(frozen=True)
class SweepResult:
    """Per-lambda losses over the grid plus the selected lambda_star."""

    lambdas: np.ndarray = field(repr=False)
    accuracy_losses: np.ndarray = field(repr=False)
    fairness_losses: np.ndarray = field(repr=False)
    total_losses: np.ndarray = field(repr=False)
    lambda_star: float
    min_total_loss: float
    config: ObjectiveConfig

    def rows(self):
        return zip(self.lambdas.tolist(), self.accuracy_losses.tolist(),
                   self.fairness_losses.tolist(), self.total_losses.tolist())

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "accuracy_loss", "fairness_loss", "total_loss"])
            for row in self.rows():
                w.writerow([format(v, ".17g") for v in row])

    def to_json_dict(self) -> dict:
        return {
            "lambda_star": self.lambda_star,
            "min_total_loss": self.min_total_loss,
            "config": {
                "theta": self.config.theta,
                "threshold": self.config.threshold,
                "m": self.config.m,
                "grid_size": int(self.lambdas.size),
            },
            "rows": [
                {"lambda": l, "accuracy_loss": a, "fairness_loss": f, "total_loss": t}
                for l, a, f, t in self.rows()
            ],
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)


def apply_threshold(probas, t: float) -> np.ndarray:
    """Binary predictions: 1 iff proba >= t (boundary inclusive)."""
    return (np.asarray(probas, dtype=float) >= t).astype(int)


def accuracy_loss(preds, labels) -> float:
    """Fraction of incorrect predictions (1 minus accuracy)."""
    preds = np.asarray(preds)
    labels = np.asarray(labels)
    if preds.size != labels.size:
        raise LengthMismatch(f"{preds.size} predictions vs {labels.size} labels")
    if preds.size == 0:
        raise EmptyPopulation("no predictions to score")
    return float(np.mean(preds != labels))


def fairness_loss(records, m: int) -> float:
    """Half the MADD between the two groups' density vectors, in [0, 1]."""
    p0 = [r.proba for r in records if r.group == G0]
    p1 = [r.proba for r in records if r.group != G0]
    if not p0 or not p1:
        raise EmptyGroup("both groups must be non-empty")
    return 0.5 * madd(build_density_vector(p0, m), build_density_vector(p1, m))


def total_loss(acc: float, fair: float, theta: float) -> float:
    return (1.0 - theta) * acc + theta * fair


def sweep(records, config: ObjectiveConfig,
          sample_loss: Callable[[np.ndarray, np.ndarray, float], float] | None = None,
          ) -> SweepResult:
    """Evaluate the objective on every grid lambda and select lambda_star.

    The group and pooled CDFs are built once; each grid point only mixes
    their knots, remaps the batch, and rescores.  `sample_loss`, when
    given, replaces the default 0/1 accuracy loss; it receives the
    remapped probabilities, the labels and the threshold, and must return
    a non-negative mean loss.
    """
    labels = np.array([-1 if r.label is None else r.label for r in records])
    if np.any(labels < 0):
        raise MissingLabels("every record needs a label to sweep")
    groups = np.array([r.group for r in records])
    probas = np.array([r.proba for r in records], dtype=float)
    mask0 = groups == G0
    if not mask0.any() or mask0.all():
        raise EmptyGroup("both groups must be non-empty")

    base = FipMap.from_probas(probas[mask0], probas[~mask0], 0.0, config.m)
    # per-record quantile under its own group's CDF, fixed across lambdas
    u = np.empty_like(probas)
    u[mask0] = np.clip(base.cdf_g0(probas[mask0]), 0.0, 1.0)
    u[~mask0] = np.clip(base.cdf_g1(probas[~mask0]), 0.0, 1.0)

    grid = config.lambda_grid
    acc = np.empty(grid.size)
    fair = np.empty(grid.size)
    edges_bins = config.m
    n0 = int(mask0.sum())
    n1 = int((~mask0).sum())

    for i, lam in enumerate(grid.tolist()):
        fm = FipMap(lam=lam, cdf_g0=base.cdf_g0, cdf_g1=base.cdf_g1, cdf_all=base.cdf_all)
        new_p = np.empty_like(probas)
        new_p[mask0] = generalized_inverse(fm.mixed_g0, u[mask0])
        new_p[~mask0] = generalized_inverse(fm.mixed_g1, u[~mask0])
        if sample_loss is None:
            acc[i] = float(np.mean(apply_threshold(new_p, config.threshold) != labels))
        else:
            acc[i] = float(sample_loss(new_p, labels, config.threshold))
        c0 = np.bincount(bin_index(new_p[mask0], edges_bins), minlength=edges_bins)
        c1 = np.bincount(bin_index(new_p[~mask0], edges_bins), minlength=edges_bins)
        fair[i] = 0.5 * float(np.abs(c0 / n0 - c1 / n1).sum())

    tot = (1.0 - config.theta) * acc + config.theta * fair
    # argmin with ties broken toward the largest lambda
    best = grid.size - 1 - int(np.argmin(tot[::-1]))
    return SweepResult(lambdas=grid, accuracy_losses=acc, fairness_losses=fair,
                       total_losses=tot, lambda_star=float(grid[best]),
                       min_total_loss=float(tot[best]), config=config)
