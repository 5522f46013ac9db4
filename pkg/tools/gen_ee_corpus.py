"""Generate the shipped energy-efficiency regression corpus.

25 seeded-random instances: 15 two-user and 10 three-user.  Three-user
budgets stay small so the 1e-3 brute-force grid in the acceptance suite
enumerates in seconds; gains/noise keep g/(N0*B) moderate so the grid
optimum sits well inside 1% of the solver's value.

Run from the repo root:  python tools/gen_ee_corpus.py
"""
from __future__ import annotations

import json
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "linksteer" / "data" / "ee_corpus.json"


def main() -> None:
    rng = np.random.default_rng(20250810)
    instances = []
    for i in range(25):
        n = 2 if i < 15 else 3
        p_max = float(rng.uniform(0.5, 2.0)) if n == 2 else float(rng.uniform(0.3, 0.5))
        users = [
            {
                "bandwidth_hz": round(float(rng.uniform(0.5, 2.0)), 6),
                "channel_gain": round(float(rng.uniform(0.2, 2.0)), 6),
                "noise_psd": round(float(rng.uniform(0.5, 1.5)), 6),
            }
            for _ in range(n)
        ]
        instances.append({"name": f"ee-{i:02d}", "users": users, "p_max_w": round(p_max, 6)})
    OUT.write_text(json.dumps({"instances": instances}, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(instances)} instances)")


if __name__ == "__main__":
    main()
