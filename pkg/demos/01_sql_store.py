"""The SQL-subset engine: parse, execute, constraints, persistence replay."""
import json
import tempfile
from importlib import resources

from linksteer.store import ParamStore, parse_sql, to_sql
from linksteer.store.engine import ConstraintViolationError

seed = json.loads(resources.files("linksteer.data").joinpath("seed_default.json").read_text())

# Every statement is an AST with a canonical printed form.
stmt = parse_sql("select Encoding_Depth from LINKS where tx_id = 1 AND rx_id = 2;")
print("canonical:", to_sql(stmt))
print("roundtrip ok:", parse_sql(to_sql(stmt)) == stmt)

log = tempfile.NamedTemporaryFile(suffix=".log", delete=False)
store = ParamStore.open(seed, log_path=log.name)
print("\nseeded depth:", store.execute(stmt).rows)

store.execute_text("UPDATE links SET encoding_depth = encoding_depth + 1 WHERE link_id = 1;")
print("after relative +1:", store.execute(stmt).rows)

# Check constraints keep the depth inside [1, 12]; failed updates change nothing.
before = store.dump()
try:
    store.execute_text("UPDATE links SET encoding_depth = 99 WHERE link_id = 1;")
except ConstraintViolationError as exc:
    print("\nrejected:", exc)
print("store unchanged:", store.dump() == before)

# The persistence log replays bit-exactly on reopen.
reopened = ParamStore.open(seed, log_path=log.name)
print("\nlog replay bit-exact:", reopened.dump() == store.dump())
with open(log.name) as fh:
    print("log contents:", fh.read().strip())
