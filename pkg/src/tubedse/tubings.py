"""Binary tubings of decorated rooted trees and the tubing expansion of
``phi``.

A binary tubing of ``t`` is built recursively: pick a non-root vertex ``v``,
take a binary tubing of the subtree ``t_v`` (lower tube) and one of the rest
(upper tube).  Each split adds one to the rank of the piece's root at the
place ``e0`` of the root edge leading towards ``v``; ``e0`` is prepended to
the root-type sequence, which is kept outermost first.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .cocycle import L, MellinSeries
from .poly import ONE, ZERO, Poly
from .trees import DecoratedTree, principal_subtree_splits


class IndexedTree:
    """Vertices of a tree numbered in preorder (root is 0)."""

    def __init__(self, t: DecoratedTree):
        self.tree = t
        self.labels: list = []
        self.parent: list = []
        self.place: list = []  # decoration of the edge to the parent
        self.kids: list = []

        def walk(node, parent, place):
            me = len(self.labels)
            self.labels.append(node.label)
            self.parent.append(parent)
            self.place.append(place)
            self.kids.append([])
            for e, c in node.children:
                self.kids[me].append(walk(c, me, e))
            return me

        walk(t, None, None)

    def __len__(self) -> int:
        return len(self.labels)

    def below(self, v: int, piece: frozenset) -> frozenset:
        out = []
        stack = [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(k for k in self.kids[u] if k in piece)
        return frozenset(out)

    def first_place(self, top: int, v: int) -> str:
        """Place of the edge at ``top`` on the path from ``top`` down to ``v``."""
        while self.parent[v] != top:
            v = self.parent[v]
        return self.place[v]


@dataclass(frozen=True)
class Tubing:
    root: int
    vertices: frozenset
    split: int | None = None
    lower: "Tubing | None" = None
    upper: "Tubing | None" = None
    root_types: tuple = ()  # places, outermost first
    rank: Mapping = None  # vertex -> Counter over places

    @property
    def b(self) -> int:
        return len(self.root_types) + 1

    def tubes(self) -> list:
        """All ``2|t| - 1`` tubes as sorted vertex lists, outermost first."""
        out = [sorted(self.vertices)]
        if self.split is not None:
            out.extend(self.lower.tubes())
            out.extend(self.upper.tubes())
        return out

    def nested(self):
        """Nested-list rendering: ``[vertices, lower, upper]``."""
        if self.split is None:
            return sorted(self.vertices)
        return [sorted(self.vertices), self.lower.nested(), self.upper.nested()]

    def rank_vector(self, v: int, places: tuple) -> tuple:
        c = self.rank.get(v, {})
        return tuple(c.get(e, 0) for e in places)

    def beta(self, k: int, places: tuple) -> tuple:
        """``beta^k``: root-tube type counts excluding the outermost ``k-1``."""
        if not 1 <= k <= self.b:
            raise ValueError(f"beta index {k} outside 1..{self.b}")
        c = Counter(self.root_types[k - 1:])
        return tuple(c.get(e, 0) for e in places)


def _tubings_of(it: IndexedTree, top: int, piece: frozenset, memo: dict) -> list:
    key = (top, piece)
    if key in memo:
        return memo[key]
    if len(piece) == 1:
        out = [Tubing(top, piece, rank={top: Counter()})]
        memo[key] = out
        return out
    out = []
    for v in sorted(piece):
        if v == top:
            continue
        low_set = it.below(v, piece)
        up_set = piece - low_set
        e0 = it.first_place(top, v)
        for lo in _tubings_of(it, v, low_set, memo):
            for up in _tubings_of(it, top, up_set, memo):
                rank = dict(lo.rank)
                rank.update(up.rank)
                rc = Counter(up.rank[top])
                rc[e0] += 1
                rank[top] = rc
                out.append(Tubing(top, piece, v, lo, up, (e0,) + up.root_types, rank))
    memo[key] = out
    return out


def enumerate_tubings(t: DecoratedTree) -> list:
    """Every binary tubing of ``t``; vertex ids are preorder indices."""
    it = IndexedTree(t)
    return _tubings_of(it, 0, frozenset(range(len(it))), {})


def count_tubings(t: DecoratedTree) -> int:
    """Number of binary tubings via the split recursion on canonical codes."""
    memo: dict = {}

    def rec(s: DecoratedTree) -> int:
        if s.code in memo:
            return memo[s.code]
        n = 1 if s.size == 1 else sum(rec(a) * rec(b) for a, b, _ in principal_subtree_splits(s))
        memo[s.code] = n
        return n

    return rec(t)


def mel(tau: Tubing, it: IndexedTree, mellins: Mapping[str, MellinSeries]) -> Poly:
    """Product of ``a_{d(v), rk(v)}`` over non-root vertices."""
    out = ONE
    for v in tau.vertices:
        if v == tau.root:
            continue
        m = mellins[it.labels[v]]
        out = out * m.value(tau.rank_vector(v, m.prim.places))
    return out


def _root_sum(tau_types: tuple, m: MellinSeries) -> Poly:
    places = m.prim.places
    out = ZERO
    b = len(tau_types) + 1
    for k in range(1, b + 1):
        c = Counter(tau_types[k - 1:])
        beta = tuple(c.get(e, 0) for e in places)
        a = m.value(beta)
        if a:
            out = out + a * Poly.monomial({L: k}, Fraction(1, math.factorial(k)))
    return out


def phi_tubing_naive(t: DecoratedTree, mellins: Mapping[str, MellinSeries]) -> Poly:
    """Tubing expansion summed tubing by tubing."""
    it = IndexedTree(t)
    m = mellins[t.label]
    total = ZERO
    for tau in enumerate_tubings(t):
        total = total + mel(tau, it, mellins) * _root_sum(tau.root_types, m)
    return total


class TubingEvaluator:
    """Memoized tubing expansion.

    For each subtree code keeps ``root-type sequence -> sum of mel`` over its
    tubings (root excluded); the split recursion only needs these aggregates.
    """

    def __init__(self, mellins: Mapping[str, MellinSeries]):
        self.mellins = dict(mellins)
        self._agg: dict = {}
        self._sigma: dict = {}
        self._phi: dict = {}

    def aggregate(self, t: DecoratedTree) -> dict:
        hit = self._agg.get(t.code)
        if hit is not None:
            return hit
        if not t.children:
            out = {(): ONE}
        else:
            splits = Counter()
            for low, up, e0 in principal_subtree_splits(t):
                splits[(low, up, e0)] += 1
            acc: dict = {}
            for (low, up, e0), mult in splits.items():
                s = self.sigma(low) * mult
                if not s:
                    continue
                for seq, val in self.aggregate(up).items():
                    key = (e0,) + seq
                    v = s * val
                    acc[key] = acc[key] + v if key in acc else v
            out = {k: v for k, v in acc.items() if v}
        self._agg[t.code] = out
        return out

    def sigma(self, t: DecoratedTree) -> Poly:
        """Sum over tubings of ``t`` of ``mel`` including the root factor
        ``a_{d(t), rk(root)}``."""
        hit = self._sigma.get(t.code)
        if hit is not None:
            return hit
        m = self.mellins[t.label]
        places = m.prim.places
        out = ZERO
        for seq, val in self.aggregate(t).items():
            c = Counter(seq)
            out = out + m.value(tuple(c.get(e, 0) for e in places)) * val
        self._sigma[t.code] = out
        return out

    def __call__(self, t: DecoratedTree) -> Poly:
        hit = self._phi.get(t.code)
        if hit is not None:
            return hit
        m = self.mellins[t.label]
        out = ZERO
        for seq, val in self.aggregate(t).items():
            out = out + val * _root_sum(seq, m)
        self._phi[t.code] = out
        return out


def phi_tubing(t: DecoratedTree, mellins: Mapping[str, MellinSeries]) -> Poly:
    return TubingEvaluator(mellins)(t)


def tubing_report(t: DecoratedTree, mellins: Mapping[str, MellinSeries] | None = None, emit_tubes: bool = False) -> dict:
    """JSON-ready listing of all tubings with their statistics."""
    it = IndexedTree(t)
    rows = []
    for tau in enumerate_tubings(t):
        row = {
            "b": tau.b,
            "rootTypeSeq": list(tau.root_types),
            "rankVec": {str(v): dict(sorted((e, n) for e, n in tau.rank.get(v, {}).items() if n)) for v in sorted(tau.vertices)},
        }
        if mellins is not None:
            row["mel"] = mel(tau, it, mellins).to_text()
        if emit_tubes:
            row["tubes"] = tau.nested()
        rows.append(row)
    return {
        "tree": t.to_text(),
        "vertices": [{"id": v, "decoration": it.labels[v], "parent": it.parent[v], "place": it.place[v]} for v in range(len(it))],
        "count": len(rows),
        "tubings": rows,
    }
