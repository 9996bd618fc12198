"""Checkpoint container: byte determinism, round trips, corruption handling."""

import json
import struct

import numpy as np
import pytest

from bilab.nn import (LstmConfig, LstmModel, TransformerConfig,
                      TransformerModel)
from bilab.nn.checkpoint import (MAGIC, CheckpointError, load_checkpoint,
                                 read_header, save_checkpoint)
from bilab.nn.normalize import NormStats


@pytest.fixture
def norm():
    rng = np.random.default_rng(0)
    return NormStats.fit(rng.normal(1.0, 2.0, size=(50, 15)),
                         rng.normal(-1.0, 0.5, size=(50, 15)))


def small_tf(seed=0):
    return TransformerModel(TransformerConfig(n_layers=1, d_ff=16, window=8),
                            seed=seed)


class TestRoundTrip:
    def test_params_value_exact(self, tmp_path, norm):
        model = small_tf()
        path = save_checkpoint(tmp_path / "m.ckpt", model, norm,
                               meta={"epoch": 3})
        loaded, norm2, meta = load_checkpoint(path)
        assert meta["epoch"] == 3
        p_in, p_out = model.parameters(), loaded.parameters()
        assert sorted(p_in) == sorted(p_out)
        for name in p_in:
            np.testing.assert_array_equal(p_in[name].data, p_out[name].data)
        np.testing.assert_array_equal(norm.input_mean, norm2.input_mean)
        np.testing.assert_array_equal(norm.target_std, norm2.target_std)

    def test_loaded_model_same_outputs(self, tmp_path, norm):
        model = small_tf(seed=5)
        x = np.random.default_rng(1).normal(size=(1, 8, 15))
        y = model(x).data
        save_checkpoint(tmp_path / "m.ckpt", model, norm)
        loaded, _, _ = load_checkpoint(tmp_path / "m.ckpt")
        np.testing.assert_array_equal(loaded(x).data, y)

    def test_lstm_round_trip(self, tmp_path, norm):
        model = LstmModel(LstmConfig(hidden=16, layers=2), seed=0)
        save_checkpoint(tmp_path / "l.ckpt", model, norm)
        loaded, _, _ = load_checkpoint(tmp_path / "l.ckpt")
        assert loaded.kind == "lstm"
        x = np.random.default_rng(2).normal(size=(1, 4, 15))
        np.testing.assert_array_equal(loaded(x)[0].data, model(x)[0].data)


class TestDeterminism:
    def test_resave_byte_identical(self, tmp_path, norm):
        model = small_tf()
        a = save_checkpoint(tmp_path / "a.ckpt", model, norm, meta={"k": 1})
        b = save_checkpoint(tmp_path / "b.ckpt", model, norm, meta={"k": 1})
        assert a.read_bytes() == b.read_bytes()

    def test_load_save_cycle_byte_identical(self, tmp_path, norm):
        model = small_tf(seed=9)
        a = save_checkpoint(tmp_path / "a.ckpt", model, norm, meta={"e": 2})
        loaded, norm2, meta = load_checkpoint(a)
        b = save_checkpoint(tmp_path / "b.ckpt", loaded, norm2, meta=meta)
        assert a.read_bytes() == b.read_bytes()


class TestCorruption:
    def test_bad_magic(self, tmp_path):
        p = tmp_path / "x.ckpt"
        p.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(CheckpointError, match="magic"):
            load_checkpoint(p)

    def test_bad_version(self, tmp_path, norm):
        p = save_checkpoint(tmp_path / "m.ckpt", small_tf(), norm)
        raw = bytearray(p.read_bytes())
        raw[4:8] = struct.pack("<I", 99)
        p.write_bytes(bytes(raw))
        with pytest.raises(CheckpointError, match="version"):
            load_checkpoint(p)

    def test_shape_mismatch_names_tensor(self, tmp_path, norm):
        p = save_checkpoint(tmp_path / "m.ckpt", small_tf(), norm)
        raw = p.read_bytes()
        (hlen,) = struct.unpack("<Q", raw[8:16])
        header = json.loads(raw[16:16 + hlen].decode())
        header["tensors"][0]["shape"] = [1, 1]
        new_header = json.dumps(header, sort_keys=True,
                                separators=(",", ":")).encode()
        p.write_bytes(raw[:8] + struct.pack("<Q", len(new_header)) +
                      new_header + raw[16 + hlen:])
        with pytest.raises(CheckpointError):
            load_checkpoint(p)

    def test_header_readable_without_payload(self, tmp_path, norm):
        p = save_checkpoint(tmp_path / "m.ckpt", small_tf(), norm,
                            meta={"note": "hi"})
        header = read_header(p)
        assert header["meta"]["note"] == "hi"
        assert header["config"]["kind"] == "transformer"
        names = [t["name"] for t in header["tensors"]]
        assert names == sorted(names)

    def test_magic_constant(self, tmp_path, norm):
        p = save_checkpoint(tmp_path / "m.ckpt", small_tf(), norm)
        assert p.read_bytes()[:4] == MAGIC == b"BLCP"


class TestNormStats:
    def test_round_trip_identity(self):
        rng = np.random.default_rng(3)
        stats = NormStats.fit(rng.normal(2, 3, (100, 15)),
                              rng.normal(-1, 0.2, (100, 15)))
        x = rng.normal(size=(40, 15))
        np.testing.assert_allclose(
            stats.denormalize_target(stats.normalize_target(x)), x, atol=1e-12)

    def test_normalized_train_data_is_standard(self):
        rng = np.random.default_rng(4)
        xs = rng.normal(5, 7, (500, 15))
        ys = rng.normal(0, 1, (500, 15))
        stats = NormStats.fit(xs, ys)
        z = stats.normalize_input(xs)
        np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-10)
        np.testing.assert_allclose(z.std(axis=0), 1.0, atol=1e-10)

    def test_constant_channel_gets_floor_not_zero(self):
        xs = np.ones((10, 15))
        ys = np.ones((10, 15))
        stats = NormStats.fit(xs, ys)
        assert np.all(stats.input_std > 0)
        z = stats.normalize_input(xs)
        assert np.all(np.isfinite(z))

    def test_dict_round_trip(self):
        stats = NormStats.fit(np.random.default_rng(5).normal(size=(20, 15)),
                              np.random.default_rng(6).normal(size=(20, 15)))
        back = NormStats.from_dict(stats.to_dict())
        np.testing.assert_array_equal(stats.input_mean, back.input_mean)
        np.testing.assert_array_equal(stats.target_std, back.target_std)
