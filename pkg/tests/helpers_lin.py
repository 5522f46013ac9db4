"""Linearizability checking for recorded request histories.

An operation is (invoke_t, return_t, kind, observed) where ``observed`` is
the (before_depth, after_depth) the request reported (None for no-ops).  A
history is linearizable when some permutation of the state-changing
operations (a) respects the real-time partial order -- an op that returned
before another was invoked must come first -- and (b) replays each op's
observed transition exactly, starting from the seed state.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Optional


@dataclass(frozen=True)
class RecordedOp:
    invoke_t: float
    return_t: float
    direction: int  # +1 / -1 layer step
    status: str
    before_depth: Optional[int]
    after_depth: Optional[int]


def _step(depth: int, direction: int, bounds=(1, 12)) -> int:
    return max(bounds[0], min(bounds[1], depth + direction))


def find_serial_witness(
    ops: list[RecordedOp], seed_depth: int, final_depth: int
) -> Optional[tuple[int, ...]]:
    """Search for a serial order of the Applied/Saturated ops that explains
    every observed transition and the final state; returns the witness as a
    tuple of indices into ``ops`` or None.  Exponential, so small histories
    only."""
    effectful = [i for i, op in enumerate(ops) if op.status in ("Applied", "Saturated")]
    for perm in permutations(effectful):
        # real-time order: if op a returned before op b was invoked, a first
        ok = True
        for pos_a, a in enumerate(perm):
            for b in perm[pos_a + 1 :]:
                if ops[b].return_t < ops[a].invoke_t:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        depth = seed_depth
        for i in perm:
            op = ops[i]
            if op.before_depth != depth:
                break
            new_depth = _step(depth, op.direction)
            expected = depth if op.status == "Saturated" else new_depth
            if op.after_depth != expected or (op.status == "Applied") != (new_depth != depth):
                break
            depth = expected
        else:
            if depth == final_depth:
                return perm
    return None
