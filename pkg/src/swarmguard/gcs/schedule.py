from __future__ import annotations

from itertools import combinations

TOPOLOGIES = ("anchor", "all-pairs")


def ranging_schedule(n: int, mode: str = "anchor") -> list[tuple[int, int]]:
    """Ordered UAV pairs ranged (and checked) every epoch.

    ``anchor`` pairs UAV 1 with every other member; ``all-pairs`` yields
    every canonical pair ``(a, b)`` with ``a < b``.
    """
    if n < 2:
        raise ValueError(f"a swarm needs at least 2 UAVs to form pairs, got {n}")
    if mode == "anchor":
        return [(1, i) for i in range(2, n + 1)]
    if mode == "all-pairs":
        return list(combinations(range(1, n + 1), 2))
    raise ValueError(f"unknown topology {mode!r}; expected one of {TOPOLOGIES}")
