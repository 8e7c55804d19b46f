"""Linear combinations of decorated forests, the downset coproduct, grafting
operators and executable 1-cocycle checks.

Coproduct convention: ``Delta(F) = sum_D D (x) (F minus D)`` over downsets
``D``, so the left leg holds the cut-off branches and the right leg the trunk.
With this convention the grafting operator satisfies

    Delta B(f) = B(f) (x) 1 + (id (x) B) delta(f)

where ``delta`` is the left coaction on tensor powers.  The variant with
``1 (x) B`` in place of ``B (x) 1`` does not hold (see ``check_cocycle``).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping, Sequence

from .poly import ONE, ZERO, Poly, Series
from .trees import (
    DecoratedTree,
    Forest,
    PrimitiveInfo,
    downset_splits,
    forest,
    forest_code,
    graft,
)

EMPTY: Forest = ()


def _merge(f: Forest, g: Forest) -> Forest:
    if not f:
        return g
    if not g:
        return f
    return forest(f + g)


class ForestLC:
    """Finite linear combination of forests with Poly coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Forest, Poly] | None = None):
        clean = {}
        if terms:
            for f, c in terms.items():
                c = Poly.coerce(c)
                if c:
                    clean[f] = c
        self.terms: dict = clean

    @classmethod
    def _raw(cls, terms: dict) -> "ForestLC":
        out = cls.__new__(cls)
        out.terms = terms
        return out

    @classmethod
    def of(cls, *trees: DecoratedTree, coeff=1) -> "ForestLC":
        return cls({forest(trees): Poly.coerce(coeff)})

    @classmethod
    def scalar(cls, c) -> "ForestLC":
        return cls({EMPTY: Poly.coerce(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other) -> "ForestLC":
        if not isinstance(other, ForestLC):
            other = ForestLC.scalar(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for f, c in other.terms.items():
            v = out.get(f)
            if v is None:
                out[f] = c
            else:
                v = v + c
                if v:
                    out[f] = v
                else:
                    del out[f]
        return ForestLC._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "ForestLC":
        return ForestLC._raw({f: -c for f, c in self.terms.items()})

    def __sub__(self, other) -> "ForestLC":
        return self + (-other if isinstance(other, ForestLC) else ForestLC.scalar(-Poly.coerce(other)))

    def __mul__(self, other) -> "ForestLC":
        if isinstance(other, (int, Fraction, Poly)):
            if not other:
                return ZERO_LC
            return ForestLC._raw({f: c * other for f, c in self.terms.items()})
        if not isinstance(other, ForestLC):
            return NotImplemented
        out: dict = {}
        for f, c in self.terms.items():
            for g, d in other.terms.items():
                h = _merge(f, g)
                v = out.get(h)
                out[h] = c * d if v is None else v + c * d
        return ForestLC._raw({f: c for f, c in out.items() if c})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Poly)):
            other = ForestLC.scalar(other)
        if not isinstance(other, ForestLC):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def counit(self) -> Poly:
        """Coefficient of the empty forest."""
        return self.terms.get(EMPTY, ZERO)

    def map_coeffs(self, fn) -> "ForestLC":
        return ForestLC({f: fn(c) for f, c in self.terms.items()})

    def evaluate(self, fn) -> Poly:
        """Apply a multiplicative map given on trees, extended linearly."""
        total = ZERO
        for f, c in self.terms.items():
            v = ONE
            for t in f:
                v = v * fn(t)
            total = total + c * v
        return total

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda fc: (sum(t.size for t in fc[0]), forest_code(fc[0])))

    def to_json(self) -> list:
        return [
            {"forest": [t.to_text() for t in f], "coeff": c.to_text()}
            for f, c in self.sorted_terms()
        ]

    def __repr__(self) -> str:
        parts = [f"({c.to_text()})*[{forest_code(f)}]" for f, c in self.sorted_terms()]
        return "ForestLC(" + " + ".join(parts) + ")"


ZERO_LC = ForestLC._raw({})
ONE_LC = ForestLC._raw({EMPTY: ONE})


class TensorLC:
    """Linear combination of tensors of forests; keys are tuples of legs
    (``(left, right)`` or ``(left, right_1, ..., right_r)``)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, Poly] | None = None):
        clean = {}
        if terms:
            for k, c in terms.items():
                c = Poly.coerce(c)
                if c:
                    clean[k] = c
        self.terms: dict = clean

    def __add__(self, other: "TensorLC") -> "TensorLC":
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return TensorLC(out)

    def __neg__(self) -> "TensorLC":
        return TensorLC({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "TensorLC") -> "TensorLC":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorLC):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def map_legs(self, fn) -> "TensorLC":
        """Apply a linear map on keys ``key -> {key': coeff}``."""
        out = TensorLC()
        for k, c in self.terms.items():
            out = out + TensorLC({k2: c * c2 for k2, c2 in fn(k).items()})
        return out

    def to_json(self) -> list:
        rows = []
        for k, c in sorted(self.terms.items(), key=lambda kc: tuple(forest_code(f) for f in kc[0])):
            right = [t.to_text() for t in k[1]] if len(k) == 2 else [[t.to_text() for t in f] for f in k[1:]]
            rows.append({"left": [t.to_text() for t in k[0]], "right": right, "coeff": c.to_text()})
        return rows


def tensor(*factors: ForestLC) -> TensorLC:
    out: dict = {}
    for combo in itertools.product(*[f.terms.items() for f in factors]):
        key = tuple(fc[0] for fc in combo)
        c = ONE
        for fc in combo:
            c = c * fc[1]
        out[key] = out.get(key, ZERO) + c
    return TensorLC(out)


def coproduct_forest(f: Forest) -> dict:
    out: dict = {}
    for low, up in downset_splits(f):
        key = (low, up)
        out[key] = out.get(key, 0) + 1
    return out


def coproduct(x: ForestLC) -> TensorLC:
    out: dict = {}
    for f, c in x.terms.items():
        for key, mult in coproduct_forest(f).items():
            v = c * mult
            out[key] = out[key] + v if key in out else v
    return TensorLC(out)


def b_plus(p: PrimitiveInfo | str, args: Sequence[ForestLC] | Mapping[str, ForestLC], places: Sequence[str] | None = None) -> ForestLC:
    """Multilinear grafting: components of the ``e``-th argument hang from a
    new ``p``-root through edges decorated ``e``."""
    label = p.label if isinstance(p, PrimitiveInfo) else p
    if isinstance(args, Mapping):
        places = list(args)
        args = [args[e] for e in places]
    elif places is None:
        places = list(p.places)
    if len(args) != len(places):
        raise ValueError("b_plus: one argument per insertion place")
    out: dict = {}
    for combo in itertools.product(*[a.terms.items() for a in args]):
        t = graft(label, [(e, fc[0]) for e, fc in zip(places, combo)])
        c = ONE
        for fc in combo:
            c = c * fc[1]
        key = (t,)
        out[key] = out[key] + c if key in out else c
    return ForestLC(out)


def coaction(args: Sequence[ForestLC]) -> TensorLC:
    """Left coaction on a tensor power: product of the cut-off parts on the
    left, the remaining trunks kept per factor on the right."""
    out: dict = {}
    for combo in itertools.product(*[a.terms.items() for a in args]):
        c = ONE
        for fc in combo:
            c = c * fc[1]
        per_leg = [downset_splits(fc[0]) for fc in combo]
        for splits in itertools.product(*per_leg):
            left = forest([t for low, _ in splits for t in low])
            key = (left,) + tuple(up for _, up in splits)
            out[key] = out[key] + c if key in out else c
    return TensorLC(out)


def _apply_b_plus_right(p, places, x: TensorLC) -> TensorLC:
    out = TensorLC()
    for k, c in x.terms.items():
        grafted = b_plus(p, [ForestLC({leg: ONE}) for leg in k[1:]], places)
        out = out + tensor(ForestLC({k[0]: c}), grafted)
    return out


def check_cocycle(p: PrimitiveInfo, args: Sequence[ForestLC], places: Sequence[str] | None = None) -> bool:
    """Whether ``Delta B(args) == B(args) (x) 1 + (id (x) B) delta(args)``."""
    places = list(places or p.places)
    lhs = coproduct(b_plus(p, args, places))
    rhs = tensor(b_plus(p, args, places), ONE_LC) + _apply_b_plus_right(p, places, coaction(args))
    return lhs == rhs


def check_cocycle_left_unit(p: PrimitiveInfo, args: Sequence[ForestLC], places=None) -> bool:
    """The ``1 (x) B`` variant of the identity (false in general)."""
    places = list(places or p.places)
    lhs = coproduct(b_plus(p, args, places))
    rhs = tensor(ONE_LC, b_plus(p, args, places)) + _apply_b_plus_right(p, places, coaction(args))
    return lhs == rhs


def counit_left(x: TensorLC) -> ForestLC:
    """``(eps (x) id)`` applied to a 2-tensor."""
    return ForestLC({k[1]: c for k, c in x.terms.items() if k[0] == EMPTY})


def counit_right(x: TensorLC) -> ForestLC:
    return ForestLC({k[0]: c for k, c in x.terms.items() if k[1] == EMPTY})


def coassociativity_sides(x: ForestLC) -> tuple:
    """``((Delta (x) id) Delta x, (id (x) Delta) Delta x)`` as 3-tensors."""
    d = coproduct(x)
    left: dict = {}
    right: dict = {}
    for (a, b), c in d.terms.items():
        for (a1, a2), m in coproduct_forest(a).items():
            key = (a1, a2, b)
            left[key] = left.get(key, ZERO) + c * m
        for (b1, b2), m in coproduct_forest(b).items():
            key = (a, b1, b2)
            right[key] = right.get(key, ZERO) + c * m
    return TensorLC(left), TensorLC(right)


def lc_series(order: int) -> dict:
    """Zero/one keyword arguments for :class:`Series` over ForestLC."""
    return {"zero": ZERO_LC, "one": ONE_LC}


def rio_coproduct_identity(t_series: Series, q_series: Series, n: int) -> bool:
    """Check ``Delta [x^n] T == sum_j [x^n](T Q^j) (x) [x^j] T``."""
    if n > t_series.order:
        raise ValueError("n exceeds the truncation order")
    t = t_series.truncate(n)
    q = q_series.truncate(n)
    lhs = coproduct(t[n])
    rhs = TensorLC()
    power = t  # T Q^j
    for j in range(n + 1):
        rhs = rhs + tensor(power[n], t[j])
        power = power * q
    return lhs == rhs
