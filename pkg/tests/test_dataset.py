"""Windowed-dataset tests: window counting, episode-level splitting,
normalization provenance, and strict rejection of malformed recordings."""

import numpy as np
import pytest

from bilab.episodes import Episode, load_episode, save_episode
from bilab.nn.normalize import NormStats
from bilab.training.dataset import (
    DatasetReport,
    build_dataset,
    load_many,
    split_episode_ids,
    window_starts,
)


def make_episode(n_rows, seed, offset=0.0):
    """Synthetic episode with strictly increasing time and random joints."""
    rng = np.random.default_rng(seed)
    t = 0.01 * np.arange(n_rows)
    blocks = [rng.normal(offset, 1.0, size=(n_rows, 5)) for _ in range(6)]
    return Episode(t=t, leader_theta=blocks[0], leader_omega=blocks[1],
                   leader_tau=blocks[2], follower_theta=blocks[3],
                   follower_omega=blocks[4], follower_tau=blocks[5],
                   meta={"seed": seed})


def write_corpus(tmp_path, lengths, offsets=None, window=10):
    paths = []
    episodes = []
    for i, n in enumerate(lengths):
        off = 0.0 if offsets is None else offsets[i]
        ep = make_episode(n, seed=100 + i, offset=off)
        episodes.append(ep)
        paths.append(save_episode(ep, tmp_path / f"ep_{i:03d}.csv"))
    return paths, episodes


class TestWindowCounts:

    def test_counts_match_hand_arithmetic(self):
        # One target row trails each input window, so an episode of n rows
        # yields n - W windows at stride 1: 889 - 100 = 789 and
        # 1314 - 100 = 1214, totalling 2003.
        assert len(window_starts(889, 100, 1)) == 789
        assert len(window_starts(1314, 100, 1)) == 1214
        assert len(window_starts(889, 100, 1)) + len(window_starts(1314, 100, 1)) == 2003

    def test_minimum_length_yields_one_window(self):
        assert list(window_starts(101, 100, 1)) == [0]
        assert list(window_starts(100, 100, 1)) == []
        assert list(window_starts(11, 10, 1)) == [0]

    def test_stride_subsamples_starts(self):
        starts = list(window_starts(1000, 100, 7))
        assert starts == list(range(0, 900, 7))

    def test_every_start_leaves_room_for_shifted_target(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            n = int(rng.integers(1, 400))
            w = int(rng.integers(1, 60))
            s = int(rng.integers(1, 9))
            starts = list(window_starts(n, w, s))
            for s0 in starts:
                assert s0 + w <= n - 1  # target needs row s0 + w
            if starts:
                # The next stride step would run past the last usable start.
                assert starts[-1] + s > n - w - 1


class TestAccounting:

    def test_corpus_scalar_count(self):
        # 54356 steps * 5 joints * 3 channels * 2 arms = 1630680 scalars.
        report = DatasetReport(episodes=50, skipped=0, steps=54356)
        assert report.data_points == 1_630_680

    def test_data_points_scale_linearly_with_steps(self):
        for steps in (0, 1, 17, 1000):
            assert DatasetReport(episodes=1, skipped=0, steps=steps).data_points == 30 * steps

    def test_summary_mentions_all_counts(self):
        s = DatasetReport(episodes=7, skipped=2, steps=40).summary()
        assert "7 episodes" in s and "2 skipped" in s
        assert "40 steps" in s and "1200" in s


class TestSplit:

    def test_deterministic_given_seed(self):
        assert split_episode_ids(20, 0.8, seed=3) == split_episode_ids(20, 0.8, seed=3)

    def test_partition_is_disjoint_and_complete(self):
        train, val = split_episode_ids(13, 0.7, seed=5)
        assert sorted(train + val) == list(range(13))
        assert not set(train) & set(val)
        assert train == sorted(train) and val == sorted(val)

    def test_fraction_sets_train_count(self):
        train, val = split_episode_ids(10, 0.8, seed=0)
        assert len(train) == 8 and len(val) == 2

    def test_at_least_one_training_episode(self):
        train, val = split_episode_ids(4, 0.0, seed=0)
        assert len(train) == 1 and len(val) == 3
        train, val = split_episode_ids(1, 0.8, seed=0)
        assert train == [0] and val == []


class TestBuildDataset:

    def test_window_bookkeeping(self, tmp_path):
        paths, _ = write_corpus(tmp_path, lengths=[15, 20, 12])
        ds = build_dataset(paths, window=10, stride=1, train_fraction=0.8, seed=0)
        per_episode = {0: 5, 1: 10, 2: 2}  # n - W each
        counted = {ep: 0 for ep in per_episode}
        for ep, _ in ds.train_windows + ds.val_windows:
            counted[ep] += 1
        assert counted == per_episode
        assert ds.n_train + ds.n_val == 17
        assert sorted(ds.train_episode_ids + ds.val_episode_ids) == [0, 1, 2]

    def test_windows_stay_inside_episodes(self, tmp_path):
        paths, episodes = write_corpus(tmp_path, lengths=[14, 25, 18])
        ds = build_dataset(paths, window=10, stride=3, train_fraction=0.5, seed=1)
        for ep, start in ds.train_windows + ds.val_windows:
            assert start >= 0
            assert start + ds.window + 1 <= len(episodes[ep])

    def test_sample_alignment_and_shift(self, tmp_path):
        """x is follower rows s..s+W-1, y is leader rows shifted one step."""
        paths, episodes = write_corpus(tmp_path, lengths=[16, 18])
        ds = build_dataset(paths, window=10, stride=1, train_fraction=0.5, seed=0)
        for idx in range(ds.n_train):
            ep, s = ds.train_windows[idx]
            x, y = ds.sample("train", idx)
            raw_x = episodes[ep].follower_rows()[s:s + 10]
            raw_y = episodes[ep].leader_rows()[s + 1:s + 11]
            np.testing.assert_array_equal(x, ds.norm.normalize_input(raw_x))
            np.testing.assert_array_equal(y, ds.norm.normalize_target(raw_y))

    def test_norm_stats_come_from_training_split_only(self, tmp_path):
        # Give each episode a wildly different offset so a leaked validation
        # episode would visibly shift the mean.
        paths, episodes = write_corpus(tmp_path, lengths=[20, 20, 20, 20],
                                       offsets=[0.0, 5.0, -5.0, 40.0])
        ds = build_dataset(paths, window=10, stride=1, train_fraction=0.5, seed=2)
        assert ds.val_episode_ids  # split actually held something out
        want = NormStats.fit(
            np.concatenate([episodes[i].follower_rows() for i in ds.train_episode_ids]),
            np.concatenate([episodes[i].leader_rows() for i in ds.train_episode_ids]),
        )
        np.testing.assert_array_equal(ds.norm.input_mean, want.input_mean)
        np.testing.assert_array_equal(ds.norm.input_std, want.input_std)
        np.testing.assert_array_equal(ds.norm.target_mean, want.target_mean)
        np.testing.assert_array_equal(ds.norm.target_std, want.target_std)

    def test_batch_stacks_samples(self, tmp_path):
        paths, _ = write_corpus(tmp_path, lengths=[16, 16])
        ds = build_dataset(paths, window=10, stride=1, train_fraction=0.5, seed=0)
        order = np.array([2, 0, 1])
        xs, ys = ds.batch("train", order)
        assert xs.shape == (3, 10, 15) and ys.shape == (3, 10, 15)
        for row, idx in enumerate(order):
            x, y = ds.sample("train", int(idx))
            np.testing.assert_array_equal(xs[row], x)
            np.testing.assert_array_equal(ys[row], y)

    def test_short_episode_skipped_with_warning(self, tmp_path):
        paths, _ = write_corpus(tmp_path, lengths=[15, 8, 20])
        with pytest.warns(UserWarning, match="episode skipped"):
            ds = build_dataset(paths, window=10, stride=1, seed=0)
        assert ds.report.skipped == 1
        assert ds.report.episodes == 2
        assert ds.report.steps == 35

    def test_all_episodes_too_short_raises(self, tmp_path):
        paths, _ = write_corpus(tmp_path, lengths=[5, 6])
        with pytest.warns(UserWarning):
            with pytest.raises(ValueError, match="too short"):
                build_dataset(paths, window=10)

    def test_rejects_bad_arguments(self, tmp_path):
        paths, _ = write_corpus(tmp_path, lengths=[15])
        with pytest.raises(ValueError, match="no episode files"):
            build_dataset([])
        with pytest.raises(ValueError, match="window"):
            build_dataset(paths, window=0)
        with pytest.raises(ValueError, match="stride"):
            build_dataset(paths, window=10, stride=0)


class TestEpisodeFiles:

    def test_refuses_empty_episode(self, tmp_path):
        empty = Episode(t=np.empty(0), leader_theta=np.empty((0, 5)),
                        leader_omega=np.empty((0, 5)), leader_tau=np.empty((0, 5)),
                        follower_theta=np.empty((0, 5)), follower_omega=np.empty((0, 5)),
                        follower_tau=np.empty((0, 5)))
        with pytest.raises(ValueError, match="no steps"):
            save_episode(empty, tmp_path / "empty.csv")

    def test_bad_float_names_file_and_line(self, tmp_path):
        path = save_episode(make_episode(6, seed=1), tmp_path / "ep.csv")
        lines = path.read_text().splitlines()
        fields = lines[4].split(",")
        fields[7] = "oops"
        lines[4] = ",".join(fields)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError, match="line 5"):
            load_episode(path)

    def test_wrong_field_count_names_line(self, tmp_path):
        path = save_episode(make_episode(6, seed=2), tmp_path / "ep.csv")
        lines = path.read_text().splitlines()
        lines[3] = lines[3] + ",0.0"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError, match="line 4.*33 fields"):
            load_episode(path)

    def test_non_monotone_time_rejected(self, tmp_path):
        ep = make_episode(8, seed=3)
        ep.t[4] = ep.t[3]  # duplicate timestamp on data row 5 -> file line 6
        path = save_episode(ep, tmp_path / "ep.csv")
        with pytest.raises(ValueError, match="line 6.*strictly increase"):
            load_episode(path)

    def test_load_many_sorted_csv_only(self, tmp_path):
        write_corpus(tmp_path, lengths=[12, 12, 12])
        (tmp_path / "notes.txt").write_text("not an episode\n")
        found = load_many(tmp_path)
        assert [p.name for p in found] == ["ep_000.csv", "ep_001.csv", "ep_002.csv"]
