"""Polynomial 1-cocycles given by Mellin series, and the recursive universal
map ``phi`` from decorated trees to polynomials in the scale variable ``L``.

Coefficient convention: ``A_p(L_1, ..., L_r) = sum_alpha A_alpha L^alpha``
with ``A_alpha = multinomial(alpha) * a_{p, alpha}``.  A :class:`MellinSeries`
stores the ``a_{p, alpha}``; for a single place the two agree.

Scale variables are named ``L`` (output) and ``L.<place>`` (one per
insertion place); any other symbol is treated as a constant.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Mapping, Sequence

from .poly import ONE, ZERO, Poly, as_fraction, falling_factorial, multinomial, parse_poly
from .trees import DecoratedTree, PrimitiveInfo

L = "L"

# value pool for seeded random binding of Mellin coefficients
RANDOM_VALUES = tuple(
    Fraction(v)
    for v in ("-9/7", "-3/2", "-1", "-2/3", "-1/2", "-1/5", "1/4", "1/3", "1/2", "2/3", "1", "5/4", "3/2", "2", "9/7")
)


class MellinTruncationError(ValueError):
    pass


def place_var(place: str) -> str:
    return f"L.{place}"


def is_scale_var(name: str) -> bool:
    return name == L or name.startswith("L.")


def mellin_symbol(label: str, alpha: Sequence[int], prefix: str = "a") -> str:
    return f"{prefix}[{label}][{','.join(str(a) for a in alpha)}]"


class MellinSeries:
    """Coefficients ``a_{p, alpha}`` of one primitive's Mellin series.

    ``default`` decides entries not listed in ``values``: ``"symbolic"``
    (fresh symbol ``a[p][alpha]``), ``"zero"`` or ``"random"`` (drawn from
    :data:`RANDOM_VALUES` with a generator seeded by ``seed``, label and
    ``alpha``).  Requests with ``|alpha| > truncation`` raise
    :class:`MellinTruncationError`.  A boring series depends on ``alpha``
    only through ``|alpha|``; its symbols are ``a[p][n]``.
    """

    def __init__(
        self,
        prim: PrimitiveInfo,
        values: Mapping[tuple, Poly] | None = None,
        default: str = "symbolic",
        truncation: int | None = None,
        boring: bool = False,
        seed: int = 0,
        symbol_prefix: str = "a",
    ):
        if default not in ("symbolic", "zero", "random"):
            raise ValueError(f"unknown Mellin default {default!r}")
        self.prim = prim
        self.default = default
        self.truncation = truncation
        self.boring = boring
        self.seed = seed
        self.symbol_prefix = symbol_prefix
        self.values: dict = {}
        r = len(prim.places)
        for alpha, v in (values or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != r or any(a < 0 for a in alpha):
                raise ValueError(f"primitive {prim.label}: bad exponent vector {alpha}")
            self.values[alpha] = Poly.coerce(v) if not isinstance(v, str) else _value_from_text(v)
        if boring:
            by_total: dict = {}
            for alpha, v in self.values.items():
                n = sum(alpha)
                if n in by_total and by_total[n] != v:
                    raise ValueError(f"primitive {prim.label}: boring series must depend on |alpha| only")
                by_total[n] = v
            self._boring_values = by_total
        self._image_cache: dict = {}
        self._diag_cache: dict = {}

    # -- construction helpers ---------------------------------------------
    @classmethod
    def symbolic(cls, prim: PrimitiveInfo, **kw) -> "MellinSeries":
        return cls(prim, default="symbolic", **kw)

    @classmethod
    def from_list(cls, prim: PrimitiveInfo, coeffs: Sequence, **kw) -> "MellinSeries":
        """Single-place series from ``[a_0, a_1, ...]``; later entries are 0."""
        if len(prim.places) != 1:
            raise ValueError("from_list needs a single-place primitive")
        kw.setdefault("default", "zero")
        kw.setdefault("truncation", None)
        return cls(prim, {(n,): c for n, c in enumerate(coeffs)}, **kw)

    @classmethod
    def from_raw(cls, prim: PrimitiveInfo, raw: Mapping[tuple, Poly], **kw) -> "MellinSeries":
        """From coefficients ``A_alpha`` of ``prod L_e^alpha_e`` (no multinomial)."""
        vals = {tuple(a): Poly.coerce(v) * Fraction(1, multinomial(a)) for a, v in raw.items()}
        kw.setdefault("default", "zero")
        return cls(prim, vals, **kw)

    @classmethod
    def constant_one(cls, prim: PrimitiveInfo) -> "MellinSeries":
        """``A = 1``: the integration cocycle."""
        zero = tuple(0 for _ in prim.places)
        return cls(prim, {zero: ONE}, default="zero")

    def bind_random(self, seed: int) -> "MellinSeries":
        """Same listed values; unlisted coefficients drawn from the seeded pool."""
        return MellinSeries(self.prim, dict(self.values), "random", self.truncation, self.boring, seed, self.symbol_prefix)

    # -- access ------------------------------------------------------------
    def value(self, alpha: Sequence[int]) -> Poly:
        """``a_{p, alpha}``."""
        alpha = tuple(alpha)
        if len(alpha) != len(self.prim.places):
            raise ValueError(f"primitive {self.prim.label}: exponent vector length {len(alpha)}")
        n = sum(alpha)
        if self.truncation is not None and n > self.truncation:
            raise MellinTruncationError(
                f"primitive {self.prim.label}: coefficient {alpha} beyond materialized degree {self.truncation}"
            )
        if self.boring:
            v = self._boring_values.get(n)
            key = (n,)
        else:
            v = self.values.get(alpha)
            key = alpha
        if v is not None:
            return v
        if self.default == "zero":
            return ZERO
        if self.default == "random":
            rng = random.Random(f"{self.seed}:{self.prim.label}:{key}")
            return Poly.const(rng.choice(RANDOM_VALUES))
        return Poly.var(mellin_symbol(self.prim.label, key, self.symbol_prefix))

    def full(self, alpha: Sequence[int]) -> Poly:
        """``A_alpha = multinomial(alpha) * a_alpha``."""
        return self.value(alpha) * multinomial(alpha)

    def alphas(self, degree: int):
        """All exponent vectors with ``|alpha| == degree``."""
        r = len(self.prim.places)
        for combo in itertools.combinations_with_replacement(range(r), degree):
            alpha = [0] * r
            for c in combo:
                alpha[c] += 1
            yield tuple(alpha)

    def materialize(self, degree: int) -> "MellinSeries":
        """Explicit copy with every coefficient up to ``degree`` listed."""
        vals = {a: self.value(a) for d in range(degree + 1) for a in self.alphas(d)}
        return MellinSeries(self.prim, vals, "zero", degree, False, self.seed, self.symbol_prefix)

    # -- serialisation ----------------------------------------------------
    def to_json(self, degree: int | None = None) -> dict:
        out = {"primitive": self.prim.label, "boring": self.boring, "default": self.default}
        if self.truncation is not None:
            out["truncation"] = self.truncation
        if self.default == "random":
            out["seed"] = self.seed
        out["coeffs"] = [
            {"alpha": list(a), "value": v.to_text()} for a, v in sorted(self.values.items())
        ]
        return out

    @classmethod
    def from_json(cls, prim: PrimitiveInfo, data: Mapping) -> "MellinSeries":
        if data.get("primitive", prim.label) != prim.label:
            raise ValueError(f"Mellin series for {data['primitive']!r} attached to {prim.label!r}")
        coeffs = data.get("coeffs")
        default = data.get("default", "zero" if coeffs else "symbolic")
        vals = {}
        for i, entry in enumerate(coeffs or []):
            alpha = tuple(int(a) for a in entry["alpha"])
            raw = entry["value"]
            if raw == "sym":
                key = (sum(alpha),) if data.get("boring") else alpha
                vals[alpha] = Poly.var(mellin_symbol(prim.label, key))
            else:
                vals[alpha] = _value_from_text(raw)
        return cls(
            prim,
            vals,
            default=default,
            truncation=data.get("truncation"),
            boring=bool(data.get("boring", False)),
            seed=int(data.get("seed", 0)),
        )

    # -- operator images ---------------------------------------------------
    def _monomial_image(self, alpha: tuple, integrate: bool) -> Poly:
        cache = self._image_cache if integrate else self._diag_cache
        hit = cache.get(alpha)
        if hit is not None:
            return hit
        total = ZERO
        n = sum(alpha)
        for beta in itertools.product(*[range(a + 1) for a in alpha]):
            ff = falling_factorial(alpha, beta)
            if not ff:
                continue
            a_beta = self.full(beta)
            if not a_beta:
                continue
            m = n - sum(beta)
            if integrate:
                total = total + a_beta * Poly.monomial({L: m + 1}, ff / (m + 1))
            else:
                total = total + a_beta * Poly.monomial({L: m}, ff)
        cache[alpha] = total
        return total


def _value_from_text(raw) -> Poly:
    if isinstance(raw, (int, Fraction)):
        return Poly.const(raw)
    try:
        return Poly.const(as_fraction(raw))
    except (ValueError, ZeroDivisionError):
        return parse_poly(raw)


def _split_scale(mellin: MellinSeries, f: Poly) -> dict:
    names = [place_var(e) for e in mellin.prim.places]
    allowed = set(names)
    for v in f.variables():
        if is_scale_var(v) and v not in allowed:
            raise ValueError(
                f"variable {v!r} is not a scale variable of primitive {mellin.prim.label!r}"
            )
    return f.collect(names)


def apply_cocycle(mellin: MellinSeries, f: Poly) -> Poly:
    """``int_0^L A(d/du_e) f(u_e) |_{u_e = u} du`` for ``f`` in ``L.<place>``."""
    total = ZERO
    for alpha, c in _split_scale(mellin, f).items():
        total = total + c * mellin._monomial_image(alpha, True)
    return total


def apply_operator_diagonal(mellin: MellinSeries, f: Poly) -> Poly:
    """``A(d/du_e) f`` restricted to the diagonal ``u_e = L`` (the
    ``L``-derivative of :func:`apply_cocycle`)."""
    total = ZERO
    for alpha, c in _split_scale(mellin, f).items():
        total = total + c * mellin._monomial_image(alpha, False)
    return total


def cocycle_identity_check(mellin: MellinSeries, f: Poly) -> bool:
    """Check ``Delta Lambda f = Lambda f (x) 1 + (id (x) Lambda) delta f``
    with ``Delta: L -> L' + L''`` and ``delta: L.e -> L' + L.e''``."""
    lam = apply_cocycle(mellin, f)
    lhs = lam.substitute({L: Poly.var("L'") + Poly.var("L''")})
    first = lam.rename({L: "L'"})
    places = mellin.prim.places
    shifted = f.substitute({place_var(e): Poly.var("L'") + Poly.var(place_var(e) + "''") for e in places})
    shifted = shifted.rename({place_var(e) + "''": place_var(e) for e in places})
    second = apply_cocycle(mellin, shifted).rename({L: "L''"})
    return lhs == first + second


class Phi:
    """The universal map ``phi``: trees to polynomials in ``L``, memoized on
    canonical codes (per instance)."""

    def __init__(self, mellins: Mapping[str, MellinSeries]):
        self.mellins = dict(mellins)
        self._cache: dict = {}

    def __call__(self, t: DecoratedTree) -> Poly:
        hit = self._cache.get(t.code)
        if hit is not None:
            return hit
        m = self.mellins[t.label]
        arg = ONE
        for e, c in t.children:
            arg = arg * self(c).rename({L: place_var(e)})
        out = apply_cocycle(m, arg)
        self._cache[t.code] = out
        return out

    def forest(self, f) -> Poly:
        out = ONE
        for t in f:
            out = out * self(t)
        return out


def phi_recursive(t: DecoratedTree, mellins: Mapping[str, MellinSeries]) -> Poly:
    return Phi(mellins)(t)
