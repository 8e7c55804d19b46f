"""Decorated rooted trees: vertices carry a primitive label, edges carry the
insertion place (of the parent's primitive) they hang from.

Trees are immutable and stored in canonical form: children sorted by
``(place, canonical code)``, so structural equality is isomorphism.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

from .poly import as_fraction

_NAME = re.compile(r"^[A-Za-z0-9_]+$")


def check_name(name: str, what: str = "name") -> str:
    if not isinstance(name, str) or not _NAME.match(name):
        raise ValueError(f"invalid {what} {name!r}: use letters, digits and underscores")
    return name


@dataclass(frozen=True)
class PrimitiveInfo:
    """A primitive ``p``: weight, equation it feeds, ordered insertion places
    and per-place exponent vectors (``mu[place][equation]``)."""

    label: str
    weight: int
    equation: str
    places: tuple
    mu: Mapping = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        check_name(self.label, "primitive label")
        check_name(self.equation, "equation id")
        if not isinstance(self.weight, int) or self.weight < 1:
            raise ValueError(f"primitive {self.label}: weight must be a positive integer")
        if not self.places:
            raise ValueError(f"primitive {self.label}: needs at least one insertion place")
        if len(set(self.places)) != len(self.places):
            raise ValueError(f"primitive {self.label}: duplicate place names")
        for e in self.places:
            check_name(e, "place name")
        mu = {}
        for e in self.places:
            vec = self.mu.get(e, {})
            mu[e] = {j: as_fraction(v) for j, v in vec.items()}
        object.__setattr__(self, "places", tuple(self.places))
        object.__setattr__(self, "mu", mu)

    def mu_at(self, place: str, equation: str) -> Fraction:
        return self.mu[place].get(equation, Fraction(0))

    def overall_mu(self) -> dict:
        """``mu_p = sum_e mu_e`` as an equation-indexed vector."""
        out: dict = {}
        for vec in self.mu.values():
            for j, v in vec.items():
                out[j] = out.get(j, Fraction(0)) + v
        return {j: v for j, v in out.items() if v}


def single_primitive(label="p", weight=1, mu=1, places=("e",), equation="G") -> PrimitiveInfo:
    """Shorthand for single-equation primitives; ``mu`` is a scalar or a
    per-place sequence of scalars."""
    if not isinstance(mu, (list, tuple)):
        mu = [mu] * len(places)
    return PrimitiveInfo(
        label, weight, equation, tuple(places),
        {e: {equation: as_fraction(m)} for e, m in zip(places, mu)},
    )


@dataclass(frozen=True, eq=False)
class DecoratedTree:
    label: str
    children: tuple = ()  # tuple of (place, DecoratedTree), canonical order

    def __post_init__(self):
        kids = tuple(sorted(self.children, key=lambda pc: (pc[0], pc[1].code)))
        object.__setattr__(self, "children", kids)

    @cached_property
    def code(self) -> str:
        inner = ",".join(f"{e}:{c.code}" for e, c in self.children)
        return f"{self.label}[{inner}]"

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for _, c in self.children)

    def __eq__(self, other) -> bool:
        return isinstance(other, DecoratedTree) and self.code == other.code

    def __hash__(self) -> int:
        return hash(self.code)

    def __lt__(self, other: "DecoratedTree") -> bool:
        return self.code < other.code

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"DecoratedTree({self.to_text()!r})"

    def weight(self, prims: Mapping[str, PrimitiveInfo]) -> int:
        return prims[self.label].weight + sum(c.weight(prims) for _, c in self.children)

    def vertices(self):
        """Preorder iteration over subtrees (one per vertex)."""
        yield self
        for _, c in self.children:
            yield from c.vertices()

    def to_text(self) -> str:
        if not self.children:
            return self.label
        inner = ", ".join(f"{e}: {c.to_text()}" for e, c in self.children)
        return f"{self.label}({inner})"

    def to_json(self) -> dict:
        return {
            "decoration": self.label,
            "children": [{"place": e, "tree": c.to_json()} for e, c in self.children],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "DecoratedTree":
        return cls(
            check_name(data["decoration"], "decoration"),
            tuple((check_name(ch["place"], "place"), cls.from_json(ch["tree"]))
                  for ch in data.get("children", [])),
        )

    @classmethod
    def parse(cls, text: str) -> "DecoratedTree":
        return parse_tree(text)

    def check_legal(self, prims: Mapping[str, PrimitiveInfo]) -> None:
        if self.label not in prims:
            raise ValueError(f"unknown primitive {self.label!r}")
        allowed = prims[self.label].places
        for e, c in self.children:
            if e not in allowed:
                raise ValueError(f"place {e!r} not an insertion place of {self.label!r}")
            c.check_legal(prims)


Forest = tuple  # sorted tuple of DecoratedTree


def forest(trees: Iterable[DecoratedTree]) -> Forest:
    return tuple(sorted(trees, key=lambda t: t.code))


def forest_code(f: Forest) -> str:
    return " ".join(t.code for t in f)


def forest_size(f: Forest) -> int:
    return sum(t.size for t in f)


def graft(label: str, parts: Mapping[str, Forest] | Sequence) -> DecoratedTree:
    """New root ``label`` with every component of ``parts[e]`` hung at place ``e``."""
    items = parts.items() if isinstance(parts, Mapping) else parts
    return DecoratedTree(label, tuple((e, t) for e, f in items for t in f))


def ladder(n: int, label: str = "p", place: str = "e") -> DecoratedTree:
    t = DecoratedTree(label)
    for _ in range(n - 1):
        t = DecoratedTree(label, ((place, t),))
    return t


# -- text format -------------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z0-9_]+|[(),:])")


def parse_tree(text: str) -> DecoratedTree:
    """Parse ``p(e1: child, e2: child, ...)``; a bare label is a leaf."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"unexpected character at {pos} in tree {text!r}")
        tokens.append(m.group(1))
        pos = m.end()
    tree, i = _parse_node(tokens, 0, text)
    if i != len(tokens):
        raise ValueError(f"trailing input in tree {text!r}")
    return tree


def _parse_node(tokens, i, text):
    if i >= len(tokens) or not _NAME.match(tokens[i]):
        raise ValueError(f"expected a decoration in tree {text!r}")
    label = tokens[i]
    i += 1
    kids = []
    if i < len(tokens) and tokens[i] == "(":
        i += 1
        if i < len(tokens) and tokens[i] == ")":
            return DecoratedTree(label), i + 1
        while True:
            if i + 1 >= len(tokens) or tokens[i + 1] != ":":
                raise ValueError(f"expected 'place:' in tree {text!r}")
            place = check_name(tokens[i], "place")
            child, i = _parse_node(tokens, i + 2, text)
            kids.append((place, child))
            if i < len(tokens) and tokens[i] == ",":
                i += 1
                continue
            if i < len(tokens) and tokens[i] == ")":
                i += 1
                break
            raise ValueError(f"unbalanced parentheses in tree {text!r}")
    return DecoratedTree(label, tuple(kids)), i


# -- counting ----------------------------------------------------------------

def aut_order(t: DecoratedTree) -> int:
    """Order of the decoration-preserving automorphism group."""
    out = 1
    for _, group in itertools.groupby(t.children):
        group = list(group)
        out *= math.factorial(len(group)) * aut_order(group[0][1]) ** len(group)
    return out


def forest_aut_order(f: Forest) -> int:
    out = 1
    for _, group in itertools.groupby(f, key=lambda s: s.code):
        group = list(group)
        out *= math.factorial(len(group)) * aut_order(group[0]) ** len(group)
    return out


def tree_factorial(t: DecoratedTree) -> int:
    return math.prod(v.size for v in t.vertices())


def _knuth_extensions(t: DecoratedTree) -> int:
    return math.factorial(t.size) // tree_factorial(t)


def _brute_extensions(t: DecoratedTree) -> int:
    # topological orders of the vertices: a parent precedes its children
    kids = []
    def index(node):
        me = len(kids)
        kids.append([])
        for _, c in node.children:
            kids[me].append(index(c))
        return me
    index(t)

    def count(frontier: frozenset) -> int:
        if not frontier:
            return 1
        return sum(count((frontier - {v}) | frozenset(kids[v])) for v in frontier)

    return count(frozenset([0]))


def linear_extension_count(t: DecoratedTree) -> int:
    if t.size <= 9:
        return _brute_extensions(t)
    return _knuth_extensions(t)


def out_degree_vectors(t: DecoratedTree, prims: Mapping[str, PrimitiveInfo]) -> dict:
    """``od(root, e)`` for the root: ``{place: {equation: count}}``."""
    out: dict = {e: {} for e in prims[t.label].places}
    for e, c in t.children:
        j = prims[c.label].equation
        out[e][j] = out[e].get(j, 0) + 1
    return out


def falling_weight(t: DecoratedTree, prims: Mapping[str, PrimitiveInfo]) -> Fraction:
    """``prod_v prod_e mu_e ^ (od(v, e) falling)`` over all vertices."""
    from .poly import falling_factorial

    out = Fraction(1)
    for v in t.vertices():
        p = prims[v.label]
        for e, counts in out_degree_vectors(v, prims).items():
            for j, k in counts.items():
                out *= falling_factorial(p.mu_at(e, j), k)
                if not out:
                    return out
    return out


# -- enumeration -------------------------------------------------------------

def enumerate_trees(
    prims: Sequence[PrimitiveInfo],
    max_weight: int,
    root_index: str | None = None,
    edge_filter: Callable[[PrimitiveInfo, str, PrimitiveInfo], bool] | None = None,
) -> list:
    """All decorated trees of weight ``<= max_weight`` up to isomorphism,
    ordered by weight then canonical code.

    ``edge_filter(parent, place, child)`` may veto edges (used to skip trees
    whose coefficient is forced to zero).
    """
    if max_weight < 1:
        raise ValueError("max_weight must be at least 1")
    prims = list(prims)
    by_weight: dict = {w: [] for w in range(1, max_weight + 1)}
    for w in range(1, max_weight + 1):
        found = []
        for p in prims:
            rem = w - p.weight
            if rem < 0:
                continue
            pool = []
            for e in p.places:
                for w2 in range(1, rem + 1):
                    for c in by_weight[w2]:
                        if edge_filter is None or edge_filter(p, e, _prim_of(prims, c.label)):
                            pool.append((w2, e, c))
            for combo in _multisets_with_sum(pool, rem):
                found.append(DecoratedTree(p.label, tuple((e, c) for _, e, c in combo)))
        by_weight[w] = sorted(found, key=lambda t: t.code)
    out = [t for w in range(1, max_weight + 1) for t in by_weight[w]]
    if root_index is not None:
        labels = {p.label for p in prims if p.equation == root_index}
        out = [t for t in out if t.label in labels]
    return out


def _prim_of(prims, label):
    for p in prims:
        if p.label == label:
            return p
    raise KeyError(label)


def _multisets_with_sum(pool, total):
    """Multisets (nondecreasing index sequences) of pool items with weights
    summing exactly to ``total``."""
    n = len(pool)

    def rec(start, rem):
        if rem == 0:
            yield ()
            return
        for i in range(start, n):
            w = pool[i][0]
            if w <= rem:
                for rest in rec(i, rem - w):
                    yield (pool[i],) + rest

    yield from rec(0, total)


# -- splits ------------------------------------------------------------------

@functools.lru_cache(maxsize=1 << 16)
def tree_downset_splits(t: DecoratedTree) -> tuple:
    """``(lower forest, upper tree or None)`` over all downsets of ``t``."""
    out = [((t,), None)]
    if not t.children:
        out.append(((), t))
        return tuple(out)
    per_child = [(e, tree_downset_splits(c)) for e, c in t.children]
    for combo in itertools.product(*[s for _, s in per_child]):
        lower = []
        kids = []
        for (e, _), (low, up) in zip(per_child, combo):
            lower.extend(low)
            if up is not None:
                kids.append((e, up))
        out.append((forest(lower), DecoratedTree(t.label, tuple(kids))))
    return tuple(out)


def downset_splits(f: Forest) -> list:
    """``(D, F minus D)`` for every downset ``D`` of the forest, one entry per
    downset (isomorphic splits are repeated, not merged)."""
    per_tree = [tree_downset_splits(t) for t in f]
    out = []
    for combo in itertools.product(*per_tree):
        lower = []
        upper = []
        for low, up in combo:
            lower.extend(low)
            if up is not None:
                upper.append(up)
        out.append((forest(lower), forest(upper)))
    return out


def principal_subtree_splits(t: DecoratedTree) -> list:
    """``(t_v, t minus t_v, e0)`` for each non-root vertex ``v``, where ``e0``
    is the place of the root edge leading towards ``v``."""
    out = []
    kids = list(t.children)
    for idx, (e, c) in enumerate(kids):
        others = kids[:idx] + kids[idx + 1:]
        out.append((c, DecoratedTree(t.label, tuple(others)), e))
        for sub, rest, _ in principal_subtree_splits(c):
            out.append((sub, DecoratedTree(t.label, tuple(others) + ((e, rest),)), e))
    return out


def trees_up_to_size(prims: Sequence[PrimitiveInfo], n: int) -> list:
    """All decorated trees with at most ``n`` vertices (weights ignored)."""
    if n < 1:
        return []
    unit = [PrimitiveInfo(p.label, 1, p.equation, p.places, p.mu) for p in prims]
    return enumerate_trees(unit, n)


def forests_up_to_size(prims: Sequence[PrimitiveInfo], n: int) -> list:
    """All forests (including the empty one) with at most ``n`` vertices."""
    trees = trees_up_to_size(prims, n)
    out = []

    def rec(start: int, room: int, acc: list):
        out.append(tuple(acc))
        for k in range(start, len(trees)):
            t = trees[k]
            if t.size <= room:
                acc.append(t)
                rec(k, room - t.size, acc)
                acc.pop()

    rec(0, n, [])
    return sorted({forest(f) for f in out}, key=lambda f: (forest_size(f), forest_code(f)))
