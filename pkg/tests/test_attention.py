import helpers

import math
import unittest

import numpy as np

from app.attention import (
    DecoderState,
    LasModel,
    attend,
    beam_search,
    greedy_decode,
    las_loss,
    listen,
    make_memory,
    spell_step,
)
from app.errors import UsageError
from app.models import ADDITIVE, DOT, FeatureMatrix, LasConfig, NoiseConfig
from app.numerics import ParamStore, grad_check

_LABELS = 4


def _config(**overrides) -> LasConfig:
    values = dict(listener_layers=1, listener_units=2, pyramid_step=2, speller_layers=2,
                  speller_units=3, embed_dim=2, attention_dim=3, scoring=ADDITIVE,
                  dropout_rate=0.0, input_dim=3)
    values.update(overrides)
    return LasConfig(**values)


def _model(seed: int = 0, labels: int = _LABELS, **overrides) -> LasModel:
    return LasModel.create(_config(**overrides), labels, ParamStore(seed))


def _features(seed: int, frames: int = 8, dim: int = 3) -> FeatureMatrix:
    return FeatureMatrix(np.random.default_rng(seed).normal(size=(frames, dim)), f"utt{seed}")


def _zero(store: ParamStore) -> None:
    for _, tensor in store.items():
        tensor[...] = 0.0


class LasParamsTests(unittest.TestCase):
    def test_special_ids_follow_the_alphabet(self):
        params = _model().params
        self.assertEqual(params.eos_id, _LABELS)
        self.assertEqual(params.sos_id, _LABELS + 1)
        self.assertEqual(params.num_outputs, _LABELS + 1)
        self.assertEqual(params["speller.embed"].shape, (_LABELS + 2, 2))
        self.assertEqual(params["speller.W_out"].shape, (3 + 4, _LABELS + 1))

    def test_dot_scoring_has_no_key_projection(self):
        store = _model(scoring=DOT).store
        self.assertIn("attend.W_q", store)
        self.assertNotIn("attend.W_h", store)
        self.assertNotIn("attend.v", store)


class ListenTests(unittest.TestCase):
    def test_pyramid_reduces_frames(self):
        model = _model(listener_layers=3, listener_units=2)
        h, _ = listen(model.cfg, model.params, _features(0, frames=96))
        self.assertEqual(h.shape, (12, 4))

    def test_eight_frames_give_one_encoder_frame(self):
        model = _model(listener_layers=3)
        h, _ = listen(model.cfg, model.params, _features(0, frames=8))
        self.assertEqual(h.shape[0], 1)


class AttendTests(unittest.TestCase):
    def test_weights_form_a_distribution(self):
        rng = np.random.default_rng(3)
        for scoring in (ADDITIVE, DOT):
            params = _model(seed=1, scoring=scoring).params
            for _ in range(20):
                h_enc = rng.normal(size=(int(rng.integers(1, 7)), 4))
                weights, context, _ = attend(params, rng.normal(size=3), make_memory(params, h_enc))
                self.assertAlmostEqual(float(weights.sum()), 1.0, delta=1e-12)
                self.assertTrue(np.all(weights >= 0))
                # convex combination stays inside the per-coordinate range
                self.assertTrue(np.all(context <= h_enc.max(axis=0) + 1e-12))
                self.assertTrue(np.all(context >= h_enc.min(axis=0) - 1e-12))

    def test_context_is_a_convex_combination_under_extreme_scores(self):
        rng = np.random.default_rng(9)
        for scoring in (ADDITIVE, DOT):
            params = _model(seed=2, scoring=scoring).params
            for scale in (1.0, 50.0, 1e3):
                h_enc = rng.normal(size=(6, 4))
                weights, context, _ = attend(params, scale * rng.normal(size=3),
                                             make_memory(params, h_enc))
                self.assertTrue(np.all(np.isfinite(weights)))
                self.assertTrue(np.all(weights >= 0))
                self.assertAlmostEqual(float(weights.sum()), 1.0, delta=1e-12)
                np.testing.assert_allclose(context, weights @ h_enc, atol=1e-12)

    def test_equal_scores_average_the_frames(self):
        params = _model(scoring=DOT).params
        params["attend.W_q"][...] = 0.0
        h_enc = np.random.default_rng(0).normal(size=(5, 4))
        weights, context, _ = attend(params, np.ones(3), make_memory(params, h_enc))
        np.testing.assert_allclose(weights, np.full(5, 0.2))
        np.testing.assert_allclose(context, h_enc.mean(axis=0))

    def test_dominant_frame_is_selected(self):
        params = _model(scoring=DOT).params
        params["attend.W_q"][...] = 0.0
        params["attend.W_q"][0, 0] = 1.0
        h_enc = np.zeros((4, 4))
        h_enc[2, 0] = 1.0
        weights, context, _ = attend(params, np.array([200.0, 0.0, 0.0]), make_memory(params, h_enc))
        self.assertAlmostEqual(float(weights[2]), 1.0, places=12)
        np.testing.assert_allclose(context, h_enc[2], atol=1e-12)

    def test_empty_encoder_output_rejected(self):
        params = _model().params
        with self.assertRaises(UsageError):
            make_memory(params, np.zeros((0, 4)))

    def test_wrong_query_shape_rejected(self):
        params = _model().params
        memory = make_memory(params, np.ones((2, 4)))
        with self.assertRaises(UsageError):
            attend(params, np.ones(5), memory)


class SpellStepTests(unittest.TestCase):
    def test_distribution_normalised_and_deterministic(self):
        params = _model(seed=4).params
        state = DecoderState.initial(params)
        context = np.random.default_rng(4).normal(size=4)
        first, nxt, _ = spell_step(params, state, context)
        second, _, _ = spell_step(params, state, context)
        self.assertEqual(first.shape, (_LABELS + 1,))
        self.assertAlmostEqual(float(np.exp(first).sum()), 1.0, delta=1e-12)
        np.testing.assert_array_equal(first, second)
        self.assertEqual(nxt.prev_id, params.sos_id)

    def test_zero_parameters_give_uniform_output(self):
        model = _model()
        _zero(model.store)
        log_dist, _, _ = spell_step(model.params, DecoderState.initial(model.params), np.ones(4))
        np.testing.assert_allclose(log_dist, np.full(_LABELS + 1, -math.log(_LABELS + 1)))

    def test_dropout_needs_rng(self):
        params = _model(dropout_rate=0.5).params
        with self.assertRaises(UsageError):
            spell_step(params, DecoderState.initial(params), np.zeros(4), train_mode=True)


class LasLossTests(unittest.TestCase):
    def test_zero_model_costs_log_of_output_count(self):
        model = _model()
        _zero(model.store)
        loss, _ = las_loss(model.cfg, model.params, _features(0), [1, 2, 0])
        self.assertAlmostEqual(loss, math.log(_LABELS + 1), places=12)

    def test_empty_target_rejected(self):
        model = _model()
        with self.assertRaises(UsageError):
            las_loss(model.cfg, model.params, _features(0), [])

    def test_out_of_range_target_rejected(self):
        model = _model()
        with self.assertRaises(UsageError):
            las_loss(model.cfg, model.params, _features(0), [_LABELS])

    def test_eval_mode_ignores_noise_and_dropout(self):
        model = _model(seed=2, dropout_rate=0.5)
        feats = _features(2)
        plain, _ = las_loss(model.cfg, model.params, feats, [0, 1])
        noisy, _ = las_loss(model.cfg, model.params, feats, [0, 1], train_mode=False,
                            rng=np.random.default_rng(9), noise=NoiseConfig(sigma=1.0))
        self.assertEqual(plain, noisy)

    def test_train_mode_noise_changes_loss(self):
        model = _model(seed=2)
        feats = _features(2)
        plain, _ = las_loss(model.cfg, model.params, feats, [0, 1])
        noisy, _ = las_loss(model.cfg, model.params, feats, [0, 1], train_mode=True,
                            rng=np.random.default_rng(9), noise=NoiseConfig(sigma=1.0))
        self.assertNotEqual(plain, noisy)

    def test_gradients_additive(self):
        model = _model(seed=5, scoring=ADDITIVE)
        feats = _features(5, frames=5)

        def loss(params, backward):
            return model.loss(feats, (2, 0, 1), backward=backward)

        report = grad_check(loss, model.store, sample=60, rng=np.random.default_rng(0))
        self.assertLessEqual(report.max_relative_error, 1e-4)

    def test_gradients_dot(self):
        model = _model(seed=6, scoring=DOT)
        feats = _features(6, frames=5)

        def loss(params, backward):
            return model.loss(feats, (3, 3, 1), backward=backward)

        report = grad_check(loss, model.store, sample=60, rng=np.random.default_rng(1))
        self.assertLessEqual(report.max_relative_error, 1e-4)


def _chain_model() -> LasModel:
    """A model whose speller deterministically emits label 0, label 1, then eos."""
    hidden = _LABELS + 2
    model = _model(labels=_LABELS, speller_layers=1, speller_units=hidden, embed_dim=hidden)
    store = model.store
    _zero(store)
    store["speller.embed"][...] = np.eye(hidden)
    w_x, b = store["speller.l0.W_x"], store["speller.l0.b"]
    for j in range(hidden):
        w_x[j, 3 * hidden + j] = 10.0
    b[0, :hidden] = 10.0
    b[0, hidden:2 * hidden] = -10.0
    b[0, 2 * hidden:3 * hidden] = 10.0
    w_out = store["speller.W_out"]
    params = model.params
    w_out[params.sos_id, 0] = 60.0
    w_out[0, 1] = 60.0
    w_out[1, params.eos_id] = 60.0
    return model


class BeamSearchTests(unittest.TestCase):
    def test_width_one_matches_greedy(self):
        for seed in range(50):
            model = _model(seed=seed, speller_layers=1)
            feats = _features(100 + seed)
            greedy = greedy_decode(model.cfg, model.params, feats)
            beam = beam_search(model.cfg, model.params, feats, beam_width=1)[0]
            self.assertEqual(beam.ids, greedy.ids)
            self.assertEqual(beam.truncated, greedy.truncated)
            self.assertAlmostEqual(beam.log_score, greedy.log_score, places=9)

    def test_top_score_non_decreasing_over_widths(self):
        for seed in range(5):
            model = _model(seed=seed)
            feats = _features(200 + seed)
            previous = None
            for width in (1, 2, 4, 8, 16):
                best = beam_search(model.cfg, model.params, feats, beam_width=width, widening=True)[0]
                if previous is not None and not previous.truncated:
                    self.assertFalse(best.truncated)
                    self.assertGreaterEqual(best.log_score, previous.log_score - 1e-12)
                previous = best

    def test_results_sorted_and_free_of_eos(self):
        model = _model(seed=3)
        hyps = beam_search(model.cfg, model.params, _features(3), beam_width=4)
        scores = [h.log_score for h in hyps]
        self.assertEqual(scores, sorted(scores, reverse=True))
        for hyp in hyps:
            self.assertNotIn(model.params.eos_id, hyp.ids)
            self.assertNotIn(model.params.sos_id, hyp.ids)

    def test_deterministic_chain(self):
        model = _chain_model()
        best = model.decode(_features(0), beam_width=4)
        self.assertEqual(best.ids, (0, 1))
        self.assertFalse(best.truncated)
        self.assertAlmostEqual(best.log_score, 0.0, places=6)
        self.assertEqual(model.greedy(_features(0)).ids, (0, 1))

    def test_no_eos_within_limit_is_truncated(self):
        model = _model(max_decode_len=3)
        _zero(model.store)
        model.store["speller.b_out"][0, model.params.eos_id] = -50.0
        best = beam_search(model.cfg, model.params, _features(0), beam_width=2)[0]
        self.assertTrue(best.truncated)
        self.assertEqual(len(best.ids), 3)

    def test_zero_width_rejected(self):
        model = _model()
        with self.assertRaises(UsageError):
            beam_search(model.cfg, model.params, _features(0), beam_width=0)


if __name__ == "__main__":
    unittest.main()
