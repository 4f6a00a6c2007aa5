import itertools

import numpy as np
import pytest

from perspectra import sweep as sweep_mod
from perspectra.abelian import groups_up_to
from perspectra.errors import CapExceeded
from perspectra.summands import summand_classes
from perspectra.sweep import order_log, sweep, sweep_group

from conftest import Lit


def pair_count(G):
    return sum(len(v) * (len(v) - 1) // 2 for v in summand_classes(G).values())


@pytest.mark.parametrize("text", ["Z2+Z2", "Z2+Z4", "Z4+Z4", "Z2+Z2+Z2", "Z8+Z2",
                                  "Z3+Z9", "Z2+Z2+Z3+Z3", "Z4+Z2+Z3", "Z5+Z5", "Z12"])
def test_sweep_group_small(text):
    G = Lit(text).G
    res = sweep_group(G)
    assert res.ok and res.failures == 0 and res.fallbacks == 0
    assert res.pairs == pair_count(G)
    assert res.bruteforce in ("perspective", "skipped")
    assert sum(res.cases.values()) >= 0
    assert res.to_json()["group"] == G.literal()


def test_sweep_runs_brute_force_oracle_below_threshold():
    G = Lit("Z2+Z4").G
    assert sweep_group(G, bruteforce_pairs=10**6).bruteforce == "perspective"
    assert sweep_group(G, bruteforce_pairs=-1).bruteforce == "skipped"


def test_sweep_yields_every_group_in_order():
    results = list(sweep(16))
    assert len(results) == 25 == len(groups_up_to(16))
    assert [r.group for r in results] == [G.literal() for G in groups_up_to(16)]
    assert all(r.ok for r in results)
    assert len(list(sweep(1))) == 1


def test_sweep_parallel_matches_serial():
    serial = [r.to_json() for r in sweep(24)]
    parallel = [r.to_json() for r in sweep(24, workers=2)]
    assert serial == parallel


def test_sweep_cap(monkeypatch):
    monkeypatch.setenv("PERSPECTRA_CAPS", "sweep=8")
    with pytest.raises(CapExceeded):
        list(sweep(16))


def test_fallback_runs_on_reported_failure(monkeypatch):
    """A failing pair from the kernel is solved by brute force and recorded."""
    def failing(members, *rest):
        fails = np.zeros((sweep_mod.MAX_ANOMALIES, 2), dtype=np.int64)
        fails[0] = members[0], members[1]
        return 1, 1, fails
    monkeypatch.setattr(sweep_mod, "_sweep_class", failing)
    G = Lit("Z3+Z3").G
    res = sweep_group(G)
    assert res.failures >= 1 and res.fallbacks == res.failures
    assert res.anomalies[0]["fallback"] is not None
    assert not res.ok
    res = sweep_group(G, fallback=False)
    assert res.fallbacks == 0 and "fallback" not in res.anomalies[0]


def brute_order(rows, lev, p):
    """Size of the span of ``rows`` in the product of Z/p^lev, by closure."""
    mods = [p ** e for e in lev]
    seen = {tuple(0 for _ in lev)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for r in rows:
                y = tuple((a + b) % m for a, b, m in zip(x, r, mods))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


@pytest.mark.parametrize("p,lev", [(2, [3, 2, 1]), (3, [2, 2]), (2, [2, 2, 2]), (5, [2, 1])])
def test_order_log_matches_closure(p, lev):
    rng = np.random.default_rng(p + sum(lev))
    n = max(lev)
    levels = np.array(lev, dtype=np.int64)
    for _ in range(60):
        k = int(rng.integers(0, 4))
        rows = np.array([[int(rng.integers(0, p ** e)) for e in lev] for _ in range(k)],
                        dtype=np.int64).reshape(k, len(lev))
        expected = brute_order(rows.tolist(), lev, p)
        assert p ** int(order_log(rows, levels, p, n)) == expected
