import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilab.episodes import (
    EPISODE_HEADER,
    Episode,
    episode_header,
    list_episodes,
    load_episode,
    meta_path,
    save_episode,
)


def make_episode(n=7, seed=0, meta=None):
    r = np.random.default_rng(seed)
    return Episode(
        t=np.arange(n) * 0.01,
        leader_theta=r.standard_normal((n, 5)),
        leader_omega=r.standard_normal((n, 5)),
        leader_tau=r.standard_normal((n, 5)),
        follower_theta=r.standard_normal((n, 5)),
        follower_omega=r.standard_normal((n, 5)),
        follower_tau=r.standard_normal((n, 5)),
        meta=meta or {"object": "tennis", "seed": seed},
    )


def test_header_layout_is_frozen():
    want = ["step", "t"]
    for robot in ("l", "f"):
        for j in (1, 2, 3, 4, 5):
            want += [f"{robot}_th{j}", f"{robot}_om{j}", f"{robot}_tau{j}"]
    assert episode_header() == want
    assert EPISODE_HEADER == want
    assert len(EPISODE_HEADER) == 32


def test_header_first_bytes(tmp_path):
    p = save_episode(make_episode(1), tmp_path / "e.csv")
    first = p.read_bytes().split(b"\r\n")[0].split(b"\n")[0]
    assert first == ",".join(EPISODE_HEADER).encode()


def test_round_trip_bit_exact(tmp_path):
    ep = make_episode(23, seed=3)
    save_episode(ep, tmp_path / "ep.csv")
    back = load_episode(tmp_path / "ep.csv")
    assert np.array_equal(back.t, ep.t)
    for name in ("leader_theta", "leader_omega", "leader_tau",
                 "follower_theta", "follower_omega", "follower_tau"):
        assert np.array_equal(getattr(back, name), getattr(ep, name)), name
    assert back.meta == ep.meta


def test_meta_sidecar_location(tmp_path):
    p = save_episode(make_episode(2), tmp_path / "demo_000_tennis.csv")
    assert meta_path(p).name == "demo_000_tennis.meta.json"
    meta = json.loads(meta_path(p).read_text())
    assert meta["object"] == "tennis"


def test_wrong_header_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        load_episode(p)


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        Episode(t=np.zeros(3), leader_theta=np.zeros((2, 5)),
                leader_omega=np.zeros((3, 5)), leader_tau=np.zeros((3, 5)),
                follower_theta=np.zeros((3, 5)), follower_omega=np.zeros((3, 5)),
                follower_tau=np.zeros((3, 5)))


def test_list_episodes_sorted(tmp_path):
    for name in ("b.csv", "a.csv", "c.csv"):
        save_episode(make_episode(1), tmp_path / name)
    names = [p.name for p in list_episodes(tmp_path)]
    assert names == ["a.csv", "b.csv", "c.csv"]


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(st.lists(finite, min_size=30, max_size=30))
def test_any_finite_values_round_trip(tmp_path_factory, values):
    tmp = tmp_path_factory.mktemp("ep")
    ep = make_episode(1)
    block = np.array(values, dtype=float)
    ep.leader_theta[0] = block[:5]
    ep.leader_omega[0] = block[5:10]
    ep.leader_tau[0] = block[10:15]
    ep.follower_theta[0] = block[15:20]
    ep.follower_omega[0] = block[20:25]
    ep.follower_tau[0] = block[25:30]
    save_episode(ep, tmp / "x.csv")
    back = load_episode(tmp / "x.csv")
    assert np.array_equal(back.leader_rows(), ep.leader_rows())
    assert np.array_equal(back.follower_rows(), ep.follower_rows())


def test_interleaved_rows_order():
    ep = make_episode(4, seed=9)
    rows = ep.leader_rows()
    assert np.array_equal(rows[:, 0], ep.leader_theta[:, 0])
    assert np.array_equal(rows[:, 1], ep.leader_omega[:, 0])
    assert np.array_equal(rows[:, 2], ep.leader_tau[:, 0])
    assert np.array_equal(rows[:, 14], ep.leader_tau[:, 4])
