"""Synthetic predicted-probability generator with two known source densities.

Group 0 probabilities follow a gamma(4, 1) density compressed onto [0, 1]
(x-axis squeezed by 11 about its anchor at 0, then renormalized); group 1
follows a normal(0.55, 1) density with its x-axis squeezed by 10 about the
mean (so the peak stays at 0.55), likewise truncated and renormalized.
Labels are Bernoulli draws with the sampled probability as success rate,
so the data behave like the output of a well-calibrated but group-biased
classifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .densities import G0, G1, ScoredRecord

GAMMA_4_FACTORIAL = 6.0  # Gamma(4) for the integer-shape closed form
CDF_TABLE_NODES = 10_001


def _gamma41_pdf(z):
    """gamma(shape=4, rate=1) density, closed form for integer shape."""
    z = np.asarray(z, dtype=float)
    return np.where(z >= 0, z ** 3 * np.exp(-np.minimum(z, 700.0)) / GAMMA_4_FACTORIAL, 0.0)


def _normal_pdf(z, mean, sd):
    z = np.asarray(z, dtype=float)
    return np.exp(-0.5 * ((z - mean) / sd) ** 2) / (sd * math.sqrt(2 * math.pi))


def _trapezoid_integral(fx, xs):
    return float(np.trapezoid(fx, xs))


@dataclass(frozen=True)
class SimulationSpec:
    n_g0: int = 10_000
    n_g1: int = 10_000
    gamma_shape: float = 4.0
    gamma_rate: float = 1.0
    gamma_xscale: float = 11.0
    normal_mean: float = 0.55
    normal_sd: float = 1.0
    normal_xscale: float = 10.0
    seed: int = 0
    c0: float = field(init=False)
    c1: float = field(init=False)

    def _raw_g1(self, x):
        # squeeze about the mean keeps the normal's peak at normal_mean
        z = self.normal_mean + self.normal_xscale * (np.asarray(x, dtype=float) - self.normal_mean)
        return _normal_pdf(z, self.normal_mean, self.normal_sd)

    def __post_init__(self):
        xs = np.linspace(0.0, 1.0, CDF_TABLE_NODES)
        c0 = _trapezoid_integral(_gamma41_pdf(self.gamma_xscale * xs), xs)
        c1 = _trapezoid_integral(self._raw_g1(xs), xs)
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "c1", c1)


def pdf_g0(x, spec: SimulationSpec):
    """Normalized truncated density of group 0 probabilities; 0 outside [0, 1]."""
    x = np.asarray(x, dtype=float)
    inside = (x >= 0.0) & (x <= 1.0)
    return np.where(inside, _gamma41_pdf(spec.gamma_xscale * x) / spec.c0, 0.0)


def pdf_g1(x, spec: SimulationSpec):
    """Normalized truncated density of group 1 probabilities; 0 outside [0, 1]."""
    x = np.asarray(x, dtype=float)
    inside = (x >= 0.0) & (x <= 1.0)
    return np.where(inside, spec._raw_g1(x) / spec.c1, 0.0)


def tabulated_cdf(pdf_vals: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Cumulative trapezoid integral of a tabulated pdf, rescaled to end at 1."""
    widths = np.diff(xs)
    increments = 0.5 * (pdf_vals[1:] + pdf_vals[:-1]) * widths
    cdf = np.concatenate([[0.0], np.cumsum(increments)])
    return cdf / cdf[-1]


def _inverse_transform(u: np.ndarray, cdf: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return np.interp(u, cdf, xs)


def sample(spec: SimulationSpec) -> list[ScoredRecord]:
    """Draw the full record set: group 0 first, then group 1.

    A single seeded generator drives both the inverse-transform probability
    draws and the Bernoulli labels, consumed in record order, so the whole
    experiment is reproducible from the seed alone.
    """
    xs = np.linspace(0.0, 1.0, CDF_TABLE_NODES)
    cdf0 = tabulated_cdf(pdf_g0(xs, spec), xs)
    cdf1 = tabulated_cdf(pdf_g1(xs, spec), xs)

    rng = np.random.default_rng(spec.seed)
    records = []
    for group, cdf, count in ((G0, cdf0, spec.n_g0), (G1, cdf1, spec.n_g1)):
        draws = rng.random((count, 2))
        probas = _inverse_transform(draws[:, 0], cdf, xs)
        labels = (draws[:, 1] < probas).astype(int)
        records.extend(
            ScoredRecord(proba=float(p), group=group, label=int(y))
            for p, y in zip(probas, labels))
    return records
