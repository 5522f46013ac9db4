import numpy as np
import pytest

from linksteer.phy import (
    DepthOutOfRangeError,
    EmptyInputError,
    Surrogate,
    awgn_channel,
    persist_snapshot,
)
from linksteer.store import ParamStore

# Calibrated operating points (reference SNR, AWGN)
ACCURACY_ANCHORS = {2: 0.3497, 7: 0.6899, 8: 0.7646, 10: 0.8591, 12: 0.9380}
LATENCY_ANCHORS = {2: 43.3145, 6: 93.2484, 7: 105.3757, 8: 117.7153, 12: 167.1618}


@pytest.fixture(scope="module")
def surr():
    return Surrogate.from_file()


def test_accuracy_anchor_exactness(surr):
    for depth, acc in ACCURACY_ANCHORS.items():
        assert surr.accuracy_at(depth, 20.0, "AWGN") == acc


def test_latency_anchor_exactness(surr):
    for depth, lat in LATENCY_ANCHORS.items():
        assert surr.latency_at(depth) == lat


def test_accuracy_midpoint_between_anchors(surr):
    assert surr.accuracy_at(9, 20.0, "AWGN") == pytest.approx((0.7646 + 0.8591) / 2, abs=1e-12)


def test_filled_anchor_values(surr):
    # accuracy@6 and latency@10 are calibration-time linear fills
    assert surr.accuracy_at(6, 20.0, "AWGN") == pytest.approx(
        0.3497 + (0.6899 - 0.3497) * 4 / 5, abs=1e-12
    )
    assert surr.latency_at(10) == pytest.approx(117.7153 + (167.1618 - 117.7153) / 2, abs=1e-12)


def test_depth_bounds_enforced(surr):
    with pytest.raises(DepthOutOfRangeError):
        surr.accuracy_at(0, 20.0, "AWGN")
    with pytest.raises(DepthOutOfRangeError):
        surr.latency_at(13)


def test_accuracy_monotone_in_depth_and_bounded(surr):
    for snr in (0.0, 10.0, 20.0, 30.0):
        for channel in ("AWGN", "Rayleigh"):
            values = [surr.accuracy_at(d, snr, channel) for d in range(1, 13)]
            assert all(0.0 <= v <= 1.0 for v in values)
            assert all(b >= a for a, b in zip(values, values[1:]))


def test_accuracy_monotone_in_snr(surr):
    snrs = [-10.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 40.0]
    for depth in (1, 7, 12):
        values = [surr.accuracy_at(depth, s, "AWGN") for s in snrs]
        assert all(b >= a for a, b in zip(values, values[1:]))


def test_snr_factor_capped_at_reference(surr):
    assert surr.accuracy_at(7, 80.0, "AWGN") == surr.accuracy_at(7, 20.0, "AWGN")


def test_rayleigh_penalty(surr):
    awgn = surr.accuracy_at(7, 20.0, "AWGN")
    assert surr.accuracy_at(7, 20.0, "Rayleigh") == pytest.approx(0.9 * awgn)


def test_latency_strictly_increasing(surr):
    values = [surr.latency_at(d) for d in range(1, 13)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert all(v > 0 for v in values)


def test_quality_latency_tradeoff(surr):
    # deeper encodings: never worse accuracy, always more latency
    for d1 in range(1, 12):
        for d2 in range(d1 + 1, 13):
            assert surr.accuracy_at(d2, 20.0, "AWGN") >= surr.accuracy_at(d1, 20.0, "AWGN")
            assert surr.latency_at(d2) > surr.latency_at(d1)


def test_snapshot_of_seeded_link(surr, seed_config):
    store = ParamStore.seed(seed_config)
    row = store.table("links").rows[0]
    snap = surr.snapshot(row, timestamp=0.0)
    assert snap.accuracy == 0.6899
    assert snap.latency_ms == 105.3757
    assert snap.depth == 7 and snap.channel == "AWGN"


def test_persist_snapshot_inserts_then_updates(surr, seed_config):
    store = ParamStore.seed(seed_config)
    row = dict(store.table("links").rows[0])
    first = persist_snapshot(surr.snapshot(row, 0.0), store)
    assert first == ""  # engine-level insert on first contact
    row["encoding_depth"] = 8
    sql = persist_snapshot(surr.snapshot(row, 1.0), store)
    assert sql.startswith("UPDATE metrics SET accuracy = 0.7646")
    got = store.execute_text("SELECT accuracy, latency_ms, depth FROM metrics WHERE link_id = 1;")
    assert got.rows == [(0.7646, 117.7153, 8)]


def test_awgn_empirical_snr():
    rng = np.random.default_rng(7)
    x = rng.normal(0.0, 1.0, 100_000)
    y = awgn_channel(x, 20.0, seed=42)
    noise = y - x
    measured = 10.0 * np.log10(np.mean(x**2) / np.mean(noise**2))
    assert abs(measured - 20.0) <= 0.2


def test_awgn_deterministic_for_fixed_seed():
    x = np.ones(1000)
    a = awgn_channel(x, 10.0, seed=3)
    b = awgn_channel(x, 10.0, seed=3)
    c = awgn_channel(x, 10.0, seed=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_awgn_vanishes_at_extreme_snr():
    x = np.linspace(-1, 1, 512)
    y = awgn_channel(x, 300.0, seed=0)
    assert np.max(np.abs(y - x)) < 1e-12


def test_awgn_empty_input():
    with pytest.raises(EmptyInputError):
        awgn_channel([], 20.0, seed=0)


def test_custom_anchor_file(tmp_path):
    import json as _json

    custom = tmp_path / "anchors.json"
    custom.write_text(
        _json.dumps(
            {
                "reference_snr_db": 20.0,
                "anchors": [
                    {"depth": 1, "accuracy": 0.2, "latency_ms": 10.0},
                    {"depth": 6, "accuracy": None, "latency_ms": 60.0},
                    {"depth": 12, "accuracy": 0.9, "latency_ms": 120.0},
                ],
            }
        )
    )
    surr = Surrogate.from_file(str(custom))
    assert surr.accuracy_at(1, 20.0, "AWGN") == 0.2
    assert surr.accuracy_at(12, 20.0, "AWGN") == 0.9
    # null accuracy at depth 6 filled on the 1..12 line
    assert surr.accuracy_at(6, 20.0, "AWGN") == pytest.approx(0.2 + 0.7 * 5 / 11, abs=1e-12)
    assert surr.latency_at(6) == 60.0
