import helpers  # noqa: F401

import math
import unittest

import numpy as np

from app.errors import NumericError, TrainingError, UsageError
from app.models import FeatureMatrix, NoiseConfig
from app.numerics import (
    ParamStore,
    PlateauDecay,
    add_gaussian_noise,
    check_finite,
    clip_grad_norm,
    cross_entropy,
    dropout_mask,
    grad_check,
    log_softmax,
    log_sum_exp,
    relative_error,
    sgd_step,
    softmax,
)


class LogSumExpTests(unittest.TestCase):
    def test_two_zeros_give_log_two(self):
        self.assertAlmostEqual(log_sum_exp([0.0, 0.0]), math.log(2), places=12)

    def test_minus_infinity_is_the_identity(self):
        self.assertEqual(log_sum_exp([-np.inf, 5.0]), 5.0)

    def test_large_values_do_not_overflow(self):
        self.assertAlmostEqual(log_sum_exp([1000.0] * 3), 1000.0 + math.log(3), places=9)

    def test_all_minus_infinity_stays_minus_infinity(self):
        self.assertEqual(log_sum_exp([-np.inf, -np.inf]), -np.inf)

    def test_empty_input_is_a_usage_error(self):
        with self.assertRaises(UsageError):
            log_sum_exp([])

    def test_shift_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            v = rng.normal(size=5) * 10
            c = rng.normal() * 50
            self.assertAlmostEqual(log_sum_exp(v + c), log_sum_exp(v) + c, delta=1e-12 * max(1.0, abs(c)) * 10)


class SoftmaxTests(unittest.TestCase):
    def test_symmetric_logits(self):
        np.testing.assert_allclose(softmax([0.0, 0.0]), [0.5, 0.5])

    def test_single_element(self):
        np.testing.assert_allclose(softmax([7.3]), [1.0])

    def test_log_one_log_three(self):
        np.testing.assert_allclose(softmax([0.0, math.log(3)]), [0.25, 0.75], atol=1e-12)

    def test_rows_normalise_and_keep_argmax(self):
        rng = np.random.default_rng(0)
        logits = rng.normal(size=(10, 6)) * 5
        p = softmax(logits)
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_array_equal(p.argmax(axis=1), logits.argmax(axis=1))
        np.testing.assert_allclose(softmax(logits + 100.0), p, atol=1e-12)

    def test_log_softmax_matches_log_of_softmax(self):
        logits = np.array([[1.0, 2.0, 3.0]])
        np.testing.assert_allclose(log_softmax(logits), np.log(softmax(logits)), atol=1e-12)


class CrossEntropyTests(unittest.TestCase):
    def test_one_hot_is_zero(self):
        self.assertEqual(cross_entropy([0.0, 1.0, 0.0], 1), 0.0)

    def test_uniform_is_log_k(self):
        self.assertAlmostEqual(cross_entropy([0.25] * 4, 2), math.log(4), places=12)

    def test_direct_value(self):
        self.assertAlmostEqual(cross_entropy([0.25, 0.75], 1), -math.log(0.75), places=12)

    def test_zero_probability_is_infinite(self):
        with self.assertLogs("cse2e", level="WARNING"):
            self.assertEqual(cross_entropy([1.0, 0.0], 1), float("inf"))

    def test_target_out_of_range(self):
        with self.assertRaises(UsageError):
            cross_entropy([1.0], 3)


class ParamStoreTests(unittest.TestCase):
    def test_every_tensor_has_a_matching_grad(self):
        store = ParamStore(0)
        store.add("w", 3, 4)
        store.add("b", 1, 4, init="constant", value=0.5)
        self.assertEqual(store.grad("w").shape, (3, 4))
        np.testing.assert_array_equal(store["b"], np.full((1, 4), 0.5))
        self.assertEqual(store.size(), 16)

    def test_uniform_init_is_bounded_by_fan_in(self):
        store = ParamStore(1)
        w = store.add("w", 50, 16)
        self.assertLessEqual(np.abs(w).max(), 1 / 4)

    def test_same_seed_same_init(self):
        a = ParamStore(7).add("w", 4, 4)
        b = ParamStore(7).add("w", 4, 4)
        np.testing.assert_array_equal(a, b)

    def test_duplicate_name_rejected(self):
        store = ParamStore()
        store.add("w", 1, 1)
        with self.assertRaises(UsageError):
            store.add("w", 1, 1)

    def test_unknown_name_is_a_usage_error(self):
        with self.assertRaises(UsageError):
            ParamStore()["missing"]

    def test_accumulate_row_touches_one_row(self):
        store = ParamStore()
        store.add("e", 3, 2, init="constant")
        store.accumulate_row("e", 1, np.array([1.0, 2.0]))
        np.testing.assert_array_equal(store.grad("e"), [[0, 0], [1, 2], [0, 0]])

    def test_set_rejects_shape_change(self):
        store = ParamStore()
        store.add("w", 2, 2)
        with self.assertRaises(UsageError):
            store.set("w", np.zeros((3, 2)))


class SgdTests(unittest.TestCase):
    def _store(self, w: float, g: float) -> ParamStore:
        store = ParamStore()
        store.set("w", np.array([[w]]))
        store.accumulate("w", np.array([[g]]))
        return store

    def test_single_step(self):
        store = sgd_step(self._store(1.0, 0.5), 0.1)
        self.assertAlmostEqual(store["w"][0, 0], 0.95, places=12)
        self.assertEqual(store.grad("w")[0, 0], 0.0)

    def test_zero_grad_leaves_weight(self):
        store = sgd_step(self._store(1.0, 0.0), 0.1)
        self.assertEqual(store["w"][0, 0], 1.0)

    def test_two_steps_with_decay(self):
        store = sgd_step(self._store(1.0, 1.0), 0.1)
        store.accumulate("w", np.array([[1.0]]))
        sgd_step(store, 0.01)
        self.assertAlmostEqual(store["w"][0, 0], 0.89, places=12)

    def test_nan_gradient_names_the_parameter(self):
        store = self._store(1.0, float("nan"))
        with self.assertRaises(TrainingError) as ctx:
            sgd_step(store, 0.1)
        self.assertIn("w", str(ctx.exception))
        self.assertEqual(store["w"][0, 0], 1.0)

    def test_step_bumps_version(self):
        store = self._store(1.0, 1.0)
        sgd_step(store, 0.1)
        self.assertEqual(store.version, 1)

    def test_clip_scales_to_max_norm(self):
        store = ParamStore()
        store.set("a", np.zeros((1, 2)))
        store.accumulate("a", np.array([[3.0, 4.0]]))
        self.assertAlmostEqual(clip_grad_norm(store, 1.0), 5.0)
        self.assertAlmostEqual(store.grad_norm(), 1.0)
        np.testing.assert_allclose(store.grad("a"), [[0.6, 0.8]])


class PlateauDecayTests(unittest.TestCase):
    def test_decays_after_patience_epochs_without_improvement(self):
        sched = PlateauDecay(0.1, 0.1, 3)
        decayed = [sched.step(loss) for loss in (5.0, 4.0, 4.5, 4.2, 4.1, 3.0)]
        self.assertEqual(decayed, [False, False, False, False, True, False])
        self.assertAlmostEqual(sched.lr, 0.01)


class NoiseTests(unittest.TestCase):
    def test_zero_sigma_is_identity(self):
        x = FeatureMatrix(np.arange(6.0).reshape(3, 2))
        np.testing.assert_array_equal(add_gaussian_noise(x, NoiseConfig(0.0)).frames, x.frames)

    def test_sample_std(self):
        x = FeatureMatrix(np.zeros((1000, 100)))
        noisy = add_gaussian_noise(x, NoiseConfig(0.6, seed=11))
        self.assertTrue(0.594 <= noisy.frames.std() <= 0.606)

    def test_same_seed_same_noise(self):
        x = FeatureMatrix(np.zeros((5, 3)))
        a = add_gaussian_noise(x, NoiseConfig(0.6, seed=2)).frames
        b = add_gaussian_noise(x, NoiseConfig(0.6, seed=2)).frames
        np.testing.assert_array_equal(a, b)

    def test_dropout_mask_is_inverted(self):
        mask = dropout_mask(np.random.default_rng(0), (200, 50), 0.5)
        self.assertEqual(set(np.unique(mask)), {0.0, 2.0})
        self.assertAlmostEqual(mask.mean(), 1.0, delta=0.05)

    def test_check_finite(self):
        with self.assertRaises(NumericError):
            check_finite("x", np.array([1.0, np.nan]))


class GradCheckTests(unittest.TestCase):
    def _scalar(self, value: float) -> ParamStore:
        store = ParamStore()
        store.set("w", np.array([[value]]))
        return store

    def test_quadratic(self):
        def loss(p, backward):
            w = p["w"][0, 0]
            if backward:
                p.accumulate("w", np.array([[2 * w]]))
            return w * w

        report = grad_check(loss, self._scalar(3.0))
        self.assertLessEqual(report.max_relative_error, 1e-8)

    def test_constant_loss(self):
        report = grad_check(lambda p, backward: 4.0, self._scalar(1.0))
        self.assertEqual(report.max_relative_error, 0.0)

    def test_linear_loss(self):
        def loss(p, backward):
            if backward:
                p.accumulate("w", np.array([[2.0]]))
            return 2 * p["w"][0, 0]

        self.assertTrue(grad_check(loss, self._scalar(-5.0)).passed())

    def test_wrong_gradient_is_reported(self):
        def loss(p, backward):
            if backward:
                p.accumulate("w", np.array([[1.0]]))
            return p["w"][0, 0] ** 2

        report = grad_check(loss, self._scalar(3.0))
        self.assertFalse(report.passed())
        self.assertEqual(report.worst_parameter, "w")

    def test_non_deterministic_loss_is_rejected(self):
        calls = []

        def loss(p, backward):
            calls.append(1)
            return float(len(calls))

        with self.assertRaises(UsageError):
            grad_check(loss, self._scalar(0.0))

    def test_relative_error_floor(self):
        self.assertEqual(relative_error(0.0, 0.0), 0.0)
        self.assertAlmostEqual(relative_error(1.0, 0.5), 0.5)


if __name__ == "__main__":
    unittest.main()
