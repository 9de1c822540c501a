"""Brute-force references the tests compare the library against.

Nothing here uses the lasso canonical form, trace formulas or product
automata; everything works on long symbol expansions or explicit enumeration.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import product

from drsys import corpus
from drsys.graph import BoundaryPoint, DirectedGraph, enumerate_points

# 50 symbols decide equality of lassos whose description lengths sum to <= 12
EXPAND = 50


def expansion(x: BoundaryPoint, n: int = EXPAND) -> tuple:
    """First n symbols, plus the terminal sink for short finite points."""
    syms = x.expand(n)
    return syms if len(syms) == n or not x.is_finite else syms + ("@" + x.sink,)


def naive_shift(x: BoundaryPoint, k: int, n: int = EXPAND) -> tuple | None:
    """Expansion of shift^k(x) computed by dropping symbols."""
    syms = x.expand(n + k)
    if x.is_finite:
        if len(x.prefix) < k:
            return None
        rest = syms[k:]
        return rest[:n] if len(rest) >= n else rest + ("@" + x.sink,)
    return syms[k : k + n]


def brute_closed_walk_count(g: DirectedGraph, p: int) -> int:
    """Closed edge words of length p, found by trying every word over the edge alphabet."""
    count = 0
    for word in product(g.edge_ids, repeat=p):
        ok = all(g.dst(word[i]) == g.src(word[(i + 1) % p]) for i in range(p))
        count += ok
    return count


def brute_apply_prefix(T, x: BoundaryPoint, n: int) -> tuple:
    """First n output symbols of T on x by stepping the machine symbol by symbol."""
    q = T.initial
    out: list[str] = []
    syms = x.expand(n + T.max_lag + 5)
    for s in syms:
        if q in T.halt:
            break
        o, q = T.trans[(q, s)]
        out.extend(o)
        if len(out) >= n:
            return tuple(out[:n])
    if q in T.halt:
        rest = T.halt[q].expand(n)
    elif x.is_finite and len(syms) == len(x.prefix):
        rest = T.sink_out[(q, x.sink)].expand(n)
    else:
        rest = ()
    return tuple((out + list(rest))[:n])


@lru_cache(maxsize=None)
def points_of(name: str, max_length: int) -> tuple[BoundaryPoint, ...]:
    return tuple(enumerate_points(corpus.graph(name), max_length))


def random_points(name: str, count: int, max_length: int = 6, seed: int = 0) -> list[BoundaryPoint]:
    rng = random.Random(seed)
    pts = points_of(name, max_length)
    return [rng.choice(pts) for _ in range(count)]


def random_walk_lasso(g: DirectedGraph, rng: random.Random, max_len: int = 6):
    """A raw (prefix, cycle) pair by random walking until a vertex repeats or a sink is hit."""
    v = rng.choice(g.vertices)
    edges: list[str] = []
    seen = {v: 0}
    for _ in range(max_len * 3):
        outs = g.out_edges(v)
        if not outs:
            return tuple(edges), None, v
        e = rng.choice(outs)
        edges.append(e)
        v = g.dst(e)
        if v in seen and rng.random() < 0.5:
            i = seen[v]
            cyc = edges[i:]
            # optionally unroll the cycle once more to produce non-canonical input
            if rng.random() < 0.3:
                cyc = cyc * 2
            return tuple(edges[:i]), tuple(cyc), v
        seen.setdefault(v, len(edges))
    # fall back to the first repeat we saw
    for i, e in enumerate(edges):
        start = g.src(e)
        for j in range(i, len(edges)):
            if g.dst(edges[j]) == start:
                return tuple(edges[:i]), tuple(edges[i : j + 1]), start
    return None
