"""Smoke test for the tmprl extension module.

Build with `cargo build --release -p tmprl-py` and copy
target/release/libtmprl.so next to this script as tmprl.so.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import tmprl  # noqa: E402


def main():
    s = tmprl.Setup()
    assert s.num_atoms == 52 and s.num_actions == 36, (s.num_atoms, s.num_actions)
    assert tmprl.Setup.scenarios() == ["start_1", "start_2", "start_3"]
    assert "approach(d_top)" in s.action_labels()

    plans = {name: (length, time) for name, _, length, time in s.competitive_plans()}
    assert plans["plan_2"][0] < plans["plan_3"][0] < plans["plan_1"][0]
    assert plans["plan_1"][1] < plans["plan_3"][1] < plans["plan_2"][1]

    labels, calls = s.inner_plan()
    assert labels[0] == "approach(d_a)" and calls == 19, (labels, calls)

    assert s.path_length((6.5, 26.5), (6.5, 26.5)) == 0.0
    assert s.path_length((6.5, 26.5), (8.5, 18.5)) >= (2**2 + 8**2) ** 0.5
    assert s.path_length((0.5, 0.5), (6.5, 26.5)) is None  # wall cell

    rows = s.run(modes="tmp,tmp-rl", runs=2, episodes=3, seed=1)
    assert len(rows) == 2 * 2 * 3
    for r in rows:
        assert abs(sum(r["action_rewards"]) - r["reward"]) < 1e-9
    assert all(r["category"] == "plan_2" for r in rows if r["mode"] == "tmp")
    assert rows == s.run(modes="tmp,tmp-rl", runs=2, episodes=3, seed=1)

    try:
        s.run(modes="nope")
    except ValueError:
        pass
    else:
        raise AssertionError("bad mode accepted")

    print("tmprl smoke test passed")


if __name__ == "__main__":
    main()
