"""Policy wrapper and autonomous-loop tests: history padding, streaming
equivalence, safe-stop behavior, and the no-input fixed point."""

from dataclasses import replace

import numpy as np
import pytest

from bilab.config import WorkbenchConfig
from bilab.control import bilateral_torque_refs
from bilab.nn.checkpoint import save_checkpoint
from bilab.nn.lstm import LstmConfig, LstmModel
from bilab.nn.normalize import NormStats
from bilab.nn.tensor import Tensor
from bilab.nn.transformer import TransformerConfig, TransformerModel
from bilab.runtime.autonomous import (
    SafeStop,
    autonomous_step,
    follower_state_vector,
    run_autonomous_episode,
    start_pose,
)
from bilab.runtime.policy import (
    ConstantPolicy,
    EchoPolicy,
    HistoryBuffer,
    LstmPolicy,
    TransformerPolicy,
    policy_from_checkpoint,
)


def random_norm(seed=0, dim=15):
    rng = np.random.default_rng(seed)
    return NormStats(rng.normal(size=dim), rng.uniform(0.5, 2.0, dim),
                     rng.normal(size=dim), rng.uniform(0.5, 2.0, dim))


class TestHistoryBuffer:

    def test_front_pad_repeats_oldest(self):
        buf = HistoryBuffer(4)
        a, b = np.arange(3.0), np.arange(3.0) + 10
        buf.push(a)
        buf.push(b)
        out = buf.as_array()
        np.testing.assert_array_equal(out, np.stack([a, a, a, b]))

    def test_oldest_evicted_newest_last(self):
        buf = HistoryBuffer(3)
        for k in range(5):
            buf.push(np.full(2, float(k)))
        out = buf.as_array()
        np.testing.assert_array_equal(out[:, 0], [2.0, 3.0, 4.0])
        assert len(buf) == 3

    def test_push_copies_its_argument(self):
        buf = HistoryBuffer(2)
        row = np.zeros(3)
        buf.push(row)
        row[:] = 99.0
        assert buf.as_array()[-1, 0] == 0.0

    def test_empty_and_reset(self):
        buf = HistoryBuffer(2)
        with pytest.raises(ValueError, match="empty"):
            buf.as_array()
        buf.push(np.zeros(2))
        buf.reset()
        assert len(buf) == 0
        with pytest.raises(ValueError):
            buf.as_array()

    def test_rejects_bad_window(self):
        with pytest.raises(ValueError):
            HistoryBuffer(0)


class TestSimplePolicies:

    def test_constant_returns_fresh_copies(self):
        value = np.arange(15.0)
        pol = ConstantPolicy(value)
        out = pol.predict(np.zeros(15))
        np.testing.assert_array_equal(out, value)
        out[:] = -1.0
        np.testing.assert_array_equal(pol.predict(np.zeros(15)), value)

    def test_constant_defaults_to_zero(self):
        np.testing.assert_array_equal(ConstantPolicy().predict(np.ones(15)),
                                      np.zeros(15))

    def test_echo_returns_copy_of_input(self):
        state = np.arange(15.0)
        out = EchoPolicy().predict(state)
        np.testing.assert_array_equal(out, state)
        out[0] = 99.0
        assert state[0] == 0.0


class TestModelPolicies:

    def test_transformer_policy_matches_manual_window(self):
        tcfg = TransformerConfig(n_layers=1, d_ff=16, dropout_p=0.0, window=4)
        model = TransformerModel(tcfg, seed=3)
        norm = random_norm(1)
        pol = TransformerPolicy(model, norm)
        rng = np.random.default_rng(2)
        states = rng.normal(size=(3, 15))
        for s in states[:2]:
            pol.predict(s)
        got = pol.predict(states[2])

        rows = [norm.normalize_input(s) for s in states]
        x = np.stack([rows[0]] + rows)[None]  # front-padded to the window
        y = model(Tensor(x), training=False)
        want = norm.denormalize_target(y.data[0, -1])
        np.testing.assert_array_equal(got, want)

    def test_lstm_policy_streams_bit_identically(self):
        model = LstmModel(LstmConfig(hidden=16, layers=2), seed=4)
        norm = random_norm(5)
        pol = LstmPolicy(model, norm)
        rng = np.random.default_rng(6)
        states = rng.normal(size=(7, 15))
        streamed = np.stack([pol.predict(s) for s in states])

        x = norm.normalize_input(states)[None]
        y, _ = model(Tensor(x), training=False)
        whole = norm.denormalize_target(y.data[0])
        np.testing.assert_array_equal(streamed, whole)

    def test_lstm_reset_forgets_history(self):
        model = LstmModel(LstmConfig(hidden=16, layers=1), seed=4)
        pol = LstmPolicy(model, NormStats.identity())
        s = np.linspace(-1, 1, 15)
        first = pol.predict(s)
        assert not np.array_equal(pol.predict(s), first)  # state carried
        pol.reset()
        np.testing.assert_array_equal(pol.predict(s), first)

    def test_policy_from_checkpoint_dispatch(self, tmp_path):
        norm = random_norm(7)
        tf = TransformerModel(TransformerConfig(n_layers=1, d_ff=16, window=4), seed=1)
        save_checkpoint(tmp_path / "tf.ckpt", tf, norm, meta={"tag": 1})
        lstm = LstmModel(LstmConfig(hidden=16, layers=1), seed=2)
        save_checkpoint(tmp_path / "lstm.ckpt", lstm, norm, meta={"tag": 2})

        pol, meta = policy_from_checkpoint(tmp_path / "tf.ckpt")
        assert isinstance(pol, TransformerPolicy) and meta["tag"] == 1
        state = np.linspace(-1, 1, 15)
        np.testing.assert_array_equal(pol.predict(state),
                                      TransformerPolicy(tf, norm).predict(state))

        pol, meta = policy_from_checkpoint(tmp_path / "lstm.ckpt")
        assert isinstance(pol, LstmPolicy) and meta["tag"] == 2
        np.testing.assert_array_equal(pol.predict(state),
                                      LstmPolicy(lstm, norm).predict(state))


class TestAutonomousStep:

    def test_state_vector_interleaves(self):
        v = follower_state_vector(np.arange(5), np.arange(5) + 10, np.arange(5) + 20)
        np.testing.assert_array_equal(v[0::3], np.arange(5))
        np.testing.assert_array_equal(v[1::3], np.arange(5) + 10)
        np.testing.assert_array_equal(v[2::3], np.arange(5) + 20)

    def test_wiring_matches_direct_law(self, cfg, rng):
        pred = rng.normal(size=15)
        theta = rng.normal(size=5)
        omega = rng.normal(size=5)
        res = rng.normal(size=5)
        dis = rng.normal(size=5)
        tau, out_pred, elapsed = autonomous_step(
            ConstantPolicy(pred), theta, omega, res, dis, cfg.gains)
        _, want = bilateral_torque_refs(cfg.gains, pred[0::3] - theta,
                                        pred[1::3] - omega, pred[2::3],
                                        res, np.zeros(5), dis)
        np.testing.assert_array_equal(tau, want)
        np.testing.assert_array_equal(out_pred, pred)
        assert elapsed > 0

    def test_echo_at_rest_commands_zero_torque(self, cfg):
        theta = np.array([0.1, -0.2, 0.3, 0.0, 0.0])
        tau, _, _ = autonomous_step(EchoPolicy(), theta, np.zeros(5),
                                    np.zeros(5), np.zeros(5), cfg.gains)
        np.testing.assert_array_equal(tau, np.zeros(5))

    def test_non_finite_prediction_raises_safe_stop(self, cfg):
        bad = np.zeros(15)
        bad[7] = np.nan
        with pytest.raises(SafeStop, match="non-finite prediction"):
            autonomous_step(ConstantPolicy(bad), np.zeros(5), np.zeros(5),
                            np.zeros(5), np.zeros(5), cfg.gains)

    def test_policy_float_error_becomes_safe_stop(self, cfg):
        class Exploding:
            def predict(self, state):
                raise FloatingPointError("overflow in matmul")

        with pytest.raises(SafeStop, match="overflow"):
            autonomous_step(Exploding(), np.zeros(5), np.zeros(5),
                            np.zeros(5), np.zeros(5), cfg.gains)


def gravity_free(cfg):
    cfg.arm = replace(cfg.arm, gravity_coeff=(0.0,) * 5)
    cfg.gains = replace(cfg.gains, gravity_n=(0.0,) * 5)
    return cfg.validate()


class TestRunAutonomous:

    def test_echo_is_exact_fixed_point_without_gravity(self, cfg):
        """With no disturbance to fight, echoing the follower's own state
        commands zero torque forever and the arm does not move at all."""
        result = run_autonomous_episode(gravity_free(cfg), EchoPolicy(),
                                        "tennis", seed=3, timeout_s=1.0)
        ep = result.episode
        assert result.fault is None
        assert len(ep) == 100
        pose = start_pose(cfg)
        assert np.abs(ep.follower_theta - pose).max() == 0.0
        assert np.abs(ep.follower_omega).max() == 0.0

    def test_gravity_sag_is_bounded_early(self, cfg):
        result = run_autonomous_episode(cfg, EchoPolicy(), "tennis",
                                        seed=3, timeout_s=1.0)
        drift = np.abs(result.episode.follower_theta - start_pose(cfg)).max()
        assert drift < 0.2

    def test_episode_records_predictions_and_meta(self, cfg):
        pol = EchoPolicy()
        result = run_autonomous_episode(gravity_free(cfg), pol, "soccer",
                                        seed=11, timeout_s=0.3)
        ep = result.episode
        assert ep.meta["source"] == "autonomous"
        assert ep.meta["policy"] == "echo"
        assert ep.meta["object"] == "soccer"
        assert ep.meta["seed"] == 11
        assert ep.meta["steps"] == len(ep) == 30
        assert len(ep.meta["spawn_xy"]) == 2
        assert ep.meta["fault"] is None
        assert "stage" in ep.meta["outcome"]
        # The leader columns hold what the policy predicted: here the
        # follower's own state, which never moves.
        np.testing.assert_array_equal(ep.leader_theta, ep.follower_theta)
        np.testing.assert_array_equal(ep.leader_omega, ep.follower_omega)

    def test_safe_stop_records_fault_and_truncates(self, cfg):
        class TimeBombPolicy:
            kind = "bomb"
            calls = 0

            def reset(self):
                pass

            def predict(self, state):
                TimeBombPolicy.calls += 1
                if TimeBombPolicy.calls > 7:
                    return np.full(15, np.nan)
                return np.asarray(state, dtype=float).copy()

        result = run_autonomous_episode(gravity_free(cfg), TimeBombPolicy(),
                                        "tennis", seed=1, timeout_s=1.0)
        assert result.fault == "non-finite prediction"
        assert len(result.episode) == 7
        assert result.latencies_s.shape == (7,)
        assert result.episode.meta["fault"] == "non-finite prediction"
        assert not result.place_succeeded

    def test_seed_controls_spawn_jitter(self, cfg):
        runs = {}
        for seed in (5, 5, 6):
            r = run_autonomous_episode(gravity_free(cfg), ConstantPolicy(),
                                       "tennis", seed=seed, timeout_s=0.05)
            runs.setdefault(seed, []).append(r.episode.meta["spawn_xy"])
        assert runs[5][0] == runs[5][1]
        assert runs[5][0] != runs[6][0]

    def test_latency_stats_shape(self, cfg):
        result = run_autonomous_episode(gravity_free(cfg), EchoPolicy(),
                                        "tennis", seed=1, timeout_s=0.2)
        stats = result.latency_stats_ms()
        assert stats["n"] == 20
        assert 0 < stats["p50"] <= stats["p99"] <= stats["max"]
        assert stats["mean"] > 0
