"""Piecewise-linear CDFs and the fip probability remapping.

fip (fairness_improved_prediction) moves each group's predicted
probabilities toward the pooled distribution: a record with probability p
in group g is remapped to inv(mix_g)(cdf_g(p)), where mix_g is the
convex combination (1 - lam) * cdf_g + lam * cdf_pooled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .densities import DensityVector, G0, G1, build_density_vector, pool_density_vectors
from .errors import EmptyGroup, InvalidLambda, InvalidQuantile


@dataclass(frozen=True)
class PiecewiseLinearCdf:
    """Monotone CDF on [0, 1], linear between bin-edge knots."""

    knots_x: np.ndarray = field(repr=False)
    knots_y: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "knots_x", np.asarray(self.knots_x, dtype=float))
        object.__setattr__(self, "knots_y", np.asarray(self.knots_y, dtype=float))
        y = self.knots_y
        assert len(self.knots_x) == len(y)
        assert abs(y[0]) <= 1e-9 and abs(y[-1] - 1.0) <= 1e-9
        assert np.all(np.diff(y) >= -1e-12), "CDF must be non-decreasing"

    def __call__(self, x):
        return np.interp(x, self.knots_x, self.knots_y)


def build_cdf(d: DensityVector) -> PiecewiseLinearCdf:
    """CDF with knot k holding the exact cumulative mass of the first k bins."""
    y = np.concatenate([[0.0], np.cumsum(d.bins)])
    y[-1] = 1.0  # exact, the cumsum is 1 up to rounding
    x = np.arange(d.m + 1) / d.m
    return PiecewiseLinearCdf(knots_x=x, knots_y=y)


def generalized_inverse(cdf: PiecewiseLinearCdf, u) -> np.ndarray | float:
    """inf{x : CDF(x) >= u}; leftmost preimage on flat segments, clamped to [0, 1]."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0) or np.any(u_arr > 1) or not np.all(np.isfinite(u_arr)):
        raise InvalidQuantile(f"quantile must be in [0, 1], got {u!r}")
    y = cdf.knots_y
    x = cdf.knots_x
    # first knot with y >= u; the segment just before it is strictly rising
    j = np.searchsorted(y, u_arr, side="left")
    j = np.clip(j, 0, len(y) - 1)
    out = np.where(j == 0, x[0], 0.0)
    rising = j > 0
    jr = np.maximum(j, 1)
    dy = y[jr] - y[jr - 1]
    frac = np.divide(u_arr - y[jr - 1], dy, out=np.zeros_like(u_arr), where=dy > 0)
    out = np.where(rising, x[jr - 1] + frac * (x[jr] - x[jr - 1]), out)
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class FipMap:
    """The remapping for one lambda: group CDFs, pooled CDF and their mixtures."""

    lam: float
    cdf_g0: PiecewiseLinearCdf
    cdf_g1: PiecewiseLinearCdf
    cdf_all: PiecewiseLinearCdf
    mixed_g0: PiecewiseLinearCdf = field(init=False)
    mixed_g1: PiecewiseLinearCdf = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise InvalidLambda(f"lambda must be in [0, 1], got {self.lam}")
        object.__setattr__(self, "mixed_g0", _mix(self.cdf_g0, self.cdf_all, self.lam))
        object.__setattr__(self, "mixed_g1", _mix(self.cdf_g1, self.cdf_all, self.lam))

    @classmethod
    def from_probas(cls, probas_g0, probas_g1, lam: float, m: int) -> "FipMap":
        if len(probas_g0) == 0 or len(probas_g1) == 0:
            raise EmptyGroup("both groups must be non-empty")
        d0 = build_density_vector(probas_g0, m)
        d1 = build_density_vector(probas_g1, m)
        pooled = pool_density_vectors(d0, d1)
        return cls(lam=lam, cdf_g0=build_cdf(d0), cdf_g1=build_cdf(d1),
                   cdf_all=build_cdf(pooled))

    def remap(self, probas, group: int) -> np.ndarray:
        """New probabilities for records of one group, order preserved."""
        cdf = self.cdf_g0 if group == G0 else self.cdf_g1
        mixed = self.mixed_g0 if group == G0 else self.mixed_g1
        u = cdf(np.asarray(probas, dtype=float))
        u = np.clip(u, 0.0, 1.0)
        return np.atleast_1d(generalized_inverse(mixed, u))


def _mix(cdf_group: PiecewiseLinearCdf, cdf_all: PiecewiseLinearCdf, lam: float):
    # knotwise convex combination; both CDFs share the same bin-edge knots
    return PiecewiseLinearCdf(
        knots_x=cdf_group.knots_x,
        knots_y=(1.0 - lam) * cdf_group.knots_y + lam * cdf_all.knots_y,
    )


def fip(records, lam: float, m: int) -> list[float]:
    """Remap a batch of ScoredRecords; output order matches input order."""
    if not 0.0 <= lam <= 1.0:
        raise InvalidLambda(f"lambda must be in [0, 1], got {lam}")
    groups = np.array([r.group for r in records])
    probas = np.array([r.proba for r in records], dtype=float)
    mask0 = groups == G0
    if not mask0.any() or mask0.all():
        raise EmptyGroup("both groups must be non-empty")
    fm = FipMap.from_probas(probas[mask0], probas[~mask0], lam, m)
    out = np.empty_like(probas)
    out[mask0] = fm.remap(probas[mask0], G0)
    out[~mask0] = fm.remap(probas[~mask0], G1)
    return out.tolist()
