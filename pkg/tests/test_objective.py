import csv
import json

import numpy as np
import pytest

from maddpp.densities import ScoredRecord
from maddpp.errors import EmptyGroup, EmptyPopulation, LengthMismatch, MissingLabels
from maddpp.objective import (
    ObjectiveConfig,
    accuracy_loss,
    apply_threshold,
    default_lambda_grid,
    fairness_loss,
    sweep,
    total_loss,
)


class TestApplyThreshold:
    def test_boundary_inclusive(self):
        np.testing.assert_array_equal(apply_threshold([0.49, 0.5, 0.51], 0.5), [0, 1, 1])

    def test_one(self):
        np.testing.assert_array_equal(apply_threshold([1.0], 0.5), [1])

    def test_plain(self):
        np.testing.assert_array_equal(apply_threshold([0.2, 0.8], 0.5), [0, 1])


class TestAccuracyLoss:
    def test_perfect(self):
        assert accuracy_loss([0, 1, 1], [0, 1, 1]) == 0.0

    def test_all_wrong(self):
        assert accuracy_loss([1, 0], [0, 1]) == 1.0

    def test_hand_count(self):
        preds = [1] * 10
        labels = [0] * 3 + [1] * 7
        assert accuracy_loss(preds, labels) == pytest.approx(0.3)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            accuracy_loss([1], [1, 0])

    def test_empty(self):
        with pytest.raises(EmptyPopulation):
            accuracy_loss([], [])


class TestFairnessLoss:
    def test_identical_groups(self):
        records = [ScoredRecord(0.3, 0), ScoredRecord(0.3, 1)]
        assert fairness_loss(records, 10) == 0.0

    def test_disjoint_supports(self):
        records = [ScoredRecord(0.1, 0), ScoredRecord(0.9, 1)]
        assert fairness_loss(records, 2) == pytest.approx(1.0)

    def test_hand_value(self):
        # group densities [0.6, 0.4] and [0.4, 0.6] -> half of 0.4
        records = ([ScoredRecord(0.2, 0)] * 3 + [ScoredRecord(0.8, 0)] * 2 +
                   [ScoredRecord(0.2, 1)] * 2 + [ScoredRecord(0.8, 1)] * 3)
        assert fairness_loss(records, 2) == pytest.approx(0.2)

    def test_empty_group(self):
        with pytest.raises(EmptyGroup):
            fairness_loss([ScoredRecord(0.1, 0)], 2)


class TestTotalLoss:
    def test_reported_optimum_value(self):
        # 0.390 accuracy and 0.063 fairness combine to 0.2265 at theta = 0.5
        assert total_loss(0.390, 0.063, 0.5) == pytest.approx(0.2265)

    def test_theta_extremes(self):
        assert total_loss(0.3, 0.9, 0.0) == 0.3
        assert total_loss(0.3, 0.9, 1.0) == 0.9


def labeled_records(rng, n, shift=0.35):
    """Two groups with shifted probability distributions and Bernoulli labels."""
    p0 = np.clip(rng.random(n) * 0.6, 0, 1)
    p1 = np.clip(rng.random(n) * 0.6 + shift, 0, 1)
    recs = [ScoredRecord(float(p), 0, int(rng.random() < p)) for p in p0]
    recs += [ScoredRecord(float(p), 1, int(rng.random() < p)) for p in p1]
    return recs


class TestSweep:
    def test_rows_recompose_total(self):
        rng = np.random.default_rng(0)
        config = ObjectiveConfig(m=20, lambda_grid=default_lambda_grid(21))
        res = sweep(labeled_records(rng, 300), config)
        for lam, acc, fair, tot in res.rows():
            assert tot == pytest.approx((1 - config.theta) * acc + config.theta * fair,
                                        abs=1e-12)
            assert 0.0 <= acc <= 1.0 and 0.0 <= fair <= 1.0

    def test_identical_groups_flat(self):
        rng = np.random.default_rng(1)
        base = rng.random(400)
        recs = [ScoredRecord(float(p), g, int(rng.random() < p))
                for g in (0, 1) for p in base]
        res = sweep(recs, ObjectiveConfig(m=10, lambda_grid=default_lambda_grid(11)))
        assert res.fairness_losses.max() < 0.1
        assert 0.0 <= res.lambda_star <= 1.0

    def test_degenerate_grid(self):
        rng = np.random.default_rng(2)
        res = sweep(labeled_records(rng, 50),
                    ObjectiveConfig(m=10, lambda_grid=[0.0]))
        assert res.lambda_star == 0.0
        assert res.lambdas.size == 1

    def test_tie_breaks_toward_largest_lambda(self):
        # theta=1 with identical groups: fairness is 0 everywhere, all ties
        rng = np.random.default_rng(3)
        base = rng.random(100)
        recs = [ScoredRecord(float(p), g, 1) for g in (0, 1) for p in base]
        res = sweep(recs, ObjectiveConfig(theta=1.0, m=2,
                                          lambda_grid=default_lambda_grid(5)))
        ties = np.isclose(res.total_losses, res.min_total_loss)
        assert res.lambda_star == res.lambdas[ties].max()

    def test_missing_labels(self):
        recs = [ScoredRecord(0.5, 0), ScoredRecord(0.5, 1, label=1)]
        with pytest.raises(MissingLabels):
            sweep(recs, ObjectiveConfig(m=2, lambda_grid=[0.0]))

    def test_empty_group_propagates(self):
        recs = [ScoredRecord(0.5, 0, 1), ScoredRecord(0.6, 0, 0)]
        with pytest.raises(EmptyGroup):
            sweep(recs, ObjectiveConfig(m=2, lambda_grid=[0.0]))

    def test_lambda_zero_row_matches_premitigation(self):
        rng = np.random.default_rng(4)
        recs = labeled_records(rng, 500)
        m = 50
        res = sweep(recs, ObjectiveConfig(m=m, lambda_grid=default_lambda_grid(3)))
        probas = [r.proba for r in recs]
        labels = [r.label for r in recs]
        acc0 = accuracy_loss(apply_threshold(probas, 0.5), labels)
        fair0 = fairness_loss(recs, m)
        # lambda=0 remap moves each record by at most one bin
        assert res.accuracy_losses[0] == pytest.approx(acc0, abs=0.05)
        assert res.fairness_losses[0] == pytest.approx(fair0, abs=0.1)

    def test_custom_sample_loss(self):
        rng = np.random.default_rng(5)
        recs = labeled_records(rng, 100)

        def brier(probas, labels, threshold):
            return float(np.mean((np.asarray(probas) - np.asarray(labels)) ** 2))

        res = sweep(recs, ObjectiveConfig(m=10, lambda_grid=[0.0, 1.0]),
                    sample_loss=brier)
        assert np.all(res.accuracy_losses >= 0)

    def test_fairness_decreases_with_lambda(self):
        rng = np.random.default_rng(6)
        recs = labeled_records(rng, 10_000)
        res = sweep(recs, ObjectiveConfig(m=100, lambda_grid=default_lambda_grid(51)))
        assert res.fairness_losses[-1] < res.fairness_losses[0]
        corr = np.corrcoef(res.lambdas, res.fairness_losses)[0, 1]
        assert corr <= -0.95


class TestThresholdCrossing:
    def test_flips_equal_straddles(self):
        rng = np.random.default_rng(8)
        from maddpp.transport import fip

        for _ in range(30):
            recs = labeled_records(rng, int(rng.integers(20, 200)))
            lam = float(rng.random())
            t = 0.5
            probas = np.array([r.proba for r in recs])
            new_p = np.array(fip(recs, lam, 25))
            flipped = set(np.nonzero(apply_threshold(new_p, t)
                                     != apply_threshold(probas, t))[0])
            straddle = set(np.nonzero((probas >= t) != (new_p >= t))[0])
            assert flipped == straddle


class TestSerialization:
    def test_csv_and_json(self, tmp_path):
        rng = np.random.default_rng(10)
        res = sweep(labeled_records(rng, 100),
                    ObjectiveConfig(m=10, lambda_grid=default_lambda_grid(5)))
        csv_path = tmp_path / "sweep.csv"
        json_path = tmp_path / "sweep.json"
        res.write_csv(csv_path)
        res.write_json(json_path)

        with open(csv_path) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 5
        assert set(rows[0]) == {"lambda", "accuracy_loss", "fairness_loss", "total_loss"}
        np.testing.assert_allclose([float(r["lambda"]) for r in rows], res.lambdas)

        with open(json_path) as fh:
            payload = json.load(fh)
        assert payload["lambda_star"] == res.lambda_star
        assert payload["min_total_loss"] == res.min_total_loss
        assert payload["config"]["m"] == 10
        assert len(payload["rows"]) == 5
