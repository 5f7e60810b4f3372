"""Pure-Python graph kernels; the reference the compiled ones must match."""

from __future__ import annotations

from array import array
from collections import deque


def all_pairs_hops(n: int, src, dst) -> array:
    """Shortest hop counts for every ordered pair of nodes.

    Returns a flat ``n*n`` array where entry ``i*n + j`` is the number of
    edges on a shortest path from ``i`` to ``j``, ``0`` on the diagonal and
    ``-1`` when ``j`` is unreachable from ``i``.
    """
    adj: list[list[int]] = [[] for _ in range(n)]
    for s, d in zip(src, dst):
        adj[s].append(d)
    out = array("i", [-1]) * (n * n)
    for start in range(n):
        base = start * n
        out[base + start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            du = out[base + u] + 1
            for v in adj[u]:
                if out[base + v] < 0:
                    out[base + v] = du
                    queue.append(v)
    return out


def nearest_seed(hops, n: int, seeds) -> array:
    """For each node, the closest reachable seed (ties broken by index).

    ``seeds`` is a length-``n`` sequence of 0/1 flags.  Result entries are
    node indices, or ``-1`` when no seed is reachable.
    """
    seed_idx = [j for j in range(n) if seeds[j]]
    out = array("i", [-1]) * n
    for i in range(n):
        base = i * n
        best = -1
        best_d = -1
        for j in seed_idx:
            d = hops[base + j]
            if d >= 0 and (best < 0 or d < best_d):
                best, best_d = j, d
        out[i] = best
    return out
