import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linksteer.store import (
    ConstraintViolationError,
    DuplicateKeyError,
    InvalidConfigError,
    ParamStore,
    TypeMismatchError,
    UnknownColumnError,
    UnknownTableError,
    parse_sql,
)


def test_seed_default_reads_back(seed_config):
    store = ParamStore.seed(seed_config)
    result = store.execute_text(
        "SELECT encoding_depth FROM links WHERE tx_id = 1 AND rx_id = 2;"
    )
    assert result.rows == [(7,)]


def test_seed_records_audit_row(seed_config):
    store = ParamStore.seed(seed_config)
    result = store.execute_text("SELECT event FROM audit;")
    assert ("seed",) in result.rows


def test_read_your_write(seed_config):
    store = ParamStore.seed(seed_config)
    result = store.execute_text("UPDATE links SET encoding_depth = 8 WHERE link_id = 1;")
    assert result.affected == 1
    rows = store.execute_text("SELECT encoding_depth FROM links WHERE link_id = 1;").rows
    assert rows == [(8,)]


def test_check_constraint_blocks_and_preserves_state(seed_config):
    store = ParamStore.seed(seed_config)
    before = store.dump()
    with pytest.raises(ConstraintViolationError):
        store.execute_text("UPDATE links SET encoding_depth = 99 WHERE link_id = 1;")
    assert store.dump() == before


def test_duplicate_tx_rx_rejected(seed_config):
    seed_config["rows"]["links"].append(
        dict(seed_config["rows"]["links"][0], link_id=2)
    )
    with pytest.raises(DuplicateKeyError):
        ParamStore.seed(seed_config)


def test_empty_rows_config_gives_empty_tables(seed_config):
    seed_config["rows"] = {}
    store = ParamStore.seed(seed_config)
    assert store.execute_text("SELECT link_id FROM links;").rows == []


def test_missing_tables_key_is_invalid():
    with pytest.raises(InvalidConfigError):
        ParamStore.seed({})


def test_relative_update(seed_config):
    store = ParamStore.seed(seed_config)
    store.execute_text("UPDATE links SET encoding_depth = encoding_depth + 1 WHERE link_id = 1;")
    assert store.execute_text("SELECT encoding_depth FROM links;").rows == [(8,)]
    store.execute_text("UPDATE links SET encoding_depth = encoding_depth - 3 WHERE link_id = 1;")
    assert store.execute_text("SELECT encoding_depth FROM links;").rows == [(5,)]


def test_atomicity_multi_row(seed_config):
    # Second row would violate the depth check; the first must not change.
    seed_config["rows"]["links"].append(
        dict(seed_config["rows"]["links"][0], link_id=2, tx_id=3, rx_id=4, encoding_depth=12)
    )
    store = ParamStore.seed(seed_config)
    before = store.dump()
    with pytest.raises(ConstraintViolationError):
        store.execute_text("UPDATE links SET encoding_depth = encoding_depth + 1;")
    assert store.dump() == before


def test_update_cannot_target_primary_key(seed_config):
    store = ParamStore.seed(seed_config)
    with pytest.raises(ConstraintViolationError):
        store.execute_text("UPDATE links SET link_id = 9 WHERE link_id = 1;")


def test_unknown_table_and_column(seed_config):
    store = ParamStore.seed(seed_config)
    with pytest.raises(UnknownTableError):
        store.execute_text("SELECT a FROM nope;")
    with pytest.raises(UnknownColumnError):
        store.execute_text("SELECT nope FROM links;")
    with pytest.raises(UnknownColumnError):
        store.execute_text("UPDATE links SET nope = 1;")


def test_type_mismatches(seed_config):
    store = ParamStore.seed(seed_config)
    with pytest.raises(TypeMismatchError):
        store.execute_text("UPDATE links SET encoding_depth = 7.5 WHERE link_id = 1;")
    with pytest.raises(TypeMismatchError):
        store.execute_text("UPDATE links SET channel = 3 WHERE link_id = 1;")
    with pytest.raises(TypeMismatchError):
        store.execute_text("SELECT link_id FROM links WHERE channel = 3;")
    # REAL accepts an int literal (promoted)
    store.execute_text("UPDATE links SET snr_db = 15 WHERE link_id = 1;")
    assert store.execute_text("SELECT snr_db FROM links;").rows == [(15.0,)]


def test_select_respects_requested_column_order(seed_config):
    store = ParamStore.seed(seed_config)
    result = store.execute_text("SELECT rx_id, tx_id FROM links;")
    assert result.rows == [(2, 1)]
    assert result.columns == ("rx_id", "tx_id")


def test_text_comparisons(seed_config):
    store = ParamStore.seed(seed_config)
    assert store.execute_text("SELECT link_id FROM links WHERE channel = 'AWGN';").rows == [(1,)]
    assert store.execute_text("SELECT link_id FROM links WHERE channel <> 'AWGN';").rows == []


def test_persistence_log_replay_bit_exact(seed_config, tmp_path):
    log = str(tmp_path / "store.log")
    store = ParamStore.open(seed_config, log_path=log)
    store.execute_text("UPDATE links SET encoding_depth = 9 WHERE link_id = 1;")
    store.execute_text("UPDATE links SET snr_db = 17.25, channel = 'Rayleigh' WHERE link_id = 1;")
    reopened = ParamStore.open(seed_config, log_path=log)
    assert reopened.dump() == store.dump()
    with open(log, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    assert len(lines) == 2
    for line in lines:
        parse_sql(line)  # every log line is one canonical statement


def test_replayed_statements_not_relogged(seed_config, tmp_path):
    log = str(tmp_path / "store.log")
    store = ParamStore.open(seed_config, log_path=log)
    store.execute_text("UPDATE links SET encoding_depth = 9 WHERE link_id = 1;")
    ParamStore.open(seed_config, log_path=log)
    with open(log, encoding="utf-8") as fh:
        assert len(fh.read().splitlines()) == 1


# --- randomized read-your-writes ---

depth_updates = st.lists(st.integers(min_value=1, max_value=12), min_size=1, max_size=20)


def _fresh_seed():
    import json
    from importlib import resources

    return json.loads(
        resources.files("linksteer.data").joinpath("seed_default.json").read_text()
    )


@settings(max_examples=80, deadline=None)
@given(depth_updates)
def test_read_your_writes_randomized(depths):
    store = ParamStore.seed(_fresh_seed())
    for d in depths:
        store.execute_text(f"UPDATE links SET encoding_depth = {d} WHERE tx_id = 1 AND rx_id = 2;")
        got = store.execute_text(
            "SELECT encoding_depth FROM links WHERE tx_id = 1 AND rx_id = 2;"
        ).rows
        assert got == [(d,)]
