"""Exact sparse multivariate polynomials over the rationals, and truncated
power series in ``x`` with coefficients in any commutative Q-algebra.

A monomial is a tuple of ``(symbol, exponent)`` pairs sorted by symbol name
with strictly positive exponents; a :class:`Poly` maps monomials to
:class:`fractions.Fraction` coefficients with zeros never stored.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

Monomial = tuple  # tuple[tuple[str, int], ...]
Scalar = Union[int, Fraction]

_SCALARS = (int, Fraction)


class CyclicSubstitutionError(ValueError):
    pass


class TruncationMismatchError(ValueError):
    pass


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        s1, e1 = m1[i]
        s2, e2 = m2[j]
        if s1 == s2:
            out.append((s1, e1 + e2))
            i += 1
            j += 1
        elif s1 < s2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _mono_from_dict(exps: Mapping[str, int]) -> Monomial:
    for s, e in exps.items():
        if not isinstance(e, int) or e < 0:
            raise ValueError(f"bad exponent {e!r} for {s!r}")
    return tuple(sorted((s, e) for s, e in exps.items() if e))


def as_fraction(value) -> Fraction:
    """Coerce int, Fraction or an ``"n/d"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


class Poly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms: dict = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        c = as_fraction(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "Poly":
        if exp == 0:
            return cls.const(1)
        return cls._raw({((name, exp),): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff: Scalar = 1) -> "Poly":
        c = as_fraction(coeff)
        return cls._raw({_mono_from_dict(exps): c} if c else {})

    @classmethod
    def coerce(cls, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, _SCALARS):
            return cls.const(other)
        raise TypeError(f"cannot coerce {type(other).__name__} to Poly")

    # -- queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            out.update(s for s, _ in m)
        return out

    def degree_in(self, name: str) -> int:
        """Highest exponent of ``name``; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(dict(m).get(name, 0) for m in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e for _, e in m) for m in self.terms)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items())

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "Poly":
        if isinstance(other, _SCALARS):
            other = Poly.const(other)
        elif not isinstance(other, Poly):
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        if isinstance(other, _SCALARS):
            other = Poly.const(other)
        elif not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return Poly.coerce(other) - self

    def scale(self, c: Scalar) -> "Poly":
        c = as_fraction(c)
        if not c:
            return ZERO
        if c == 1:
            return self
        return Poly._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, _SCALARS):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.terms or not other.terms:
            return ZERO
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1 and b.get(()) == 1:
            return self if a is self.terms else other
        out: dict = {}
        get = out.get
        for m2, c2 in b.items():
            for m1, c1 in a.items():
                m = _mono_mul(m1, m2)
                v = get(m)
                out[m] = c1 * c2 if v is None else v + c1 * c2
        return Poly._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("Poly powers must be nonnegative integers")
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, _SCALARS):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- calculus and structure --------------------------------------------
    def derivative(self, name: str) -> "Poly":
        out: dict = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(name)
            if not e:
                continue
            if e == 1:
                del d[name]
            else:
                d[name] = e - 1
            key = tuple(sorted(d.items()))
            out[key] = out.get(key, 0) + c * e
        return Poly(out)

    def coeff(self, name: str, k: int) -> "Poly":
        """Coefficient of ``name**k``, as a polynomial in the other symbols."""
        out = {}
        for m, c in self.terms.items():
            if dict(m).get(name, 0) == k:
                out[tuple(p for p in m if p[0] != name)] = c
        return Poly._raw(out)

    def collect(self, names: Iterable[str]) -> dict:
        """Split into ``{exponent tuple over names: coefficient Poly}``."""
        names = tuple(names)
        idx = {n: i for i, n in enumerate(names)}
        groups: dict = {}
        for m, c in self.terms.items():
            key = [0] * len(names)
            rest = []
            for s, e in m:
                i = idx.get(s)
                if i is None:
                    rest.append((s, e))
                else:
                    key[i] = e
            g = groups.setdefault(tuple(key), {})
            g[tuple(rest)] = c
        return {k: Poly._raw(v) for k, v in groups.items()}

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        if not mapping:
            return self
        out: dict = {}
        for m, c in self.terms.items():
            d: dict = {}
            for s, e in m:
                s2 = mapping.get(s, s)
                d[s2] = d.get(s2, 0) + e
            key = tuple(sorted(d.items()))
            out[key] = out.get(key, 0) + c
        return Poly(out)

    def substitute(self, assignments: Mapping[str, "Poly | Scalar"]) -> "Poly":
        return substitute(self, assignments)

    def evaluate(self, values: Mapping[str, Scalar]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for s, e in m:
                if s not in values:
                    raise KeyError(f"no value for symbol {s!r}")
                v *= as_fraction(values[s]) ** e
            total += v
        return total

    def divide_exact(self, divisor: "Poly") -> "Poly | None":
        """Quotient by a single-term divisor if every term divides, else None."""
        if len(divisor.terms) != 1:
            raise ValueError("exact division only by a single term")
        ((dm, dc),) = divisor.terms.items()
        dd = dict(dm)
        out = {}
        for m, c in self.terms.items():
            d = dict(m)
            for s, e in dd.items():
                if d.get(s, 0) < e:
                    return None
                d[s] -= e
            out[tuple(sorted((s, e) for s, e in d.items() if e))] = c / dc
        return Poly._raw(out)

    # -- serialisation -----------------------------------------------------
    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [] if (c == 1 and m) else [_frac_text(c)]
            if c == -1 and m:
                factors = ["-1"]
            for s, e in m:
                factors.append(s if e == 1 else f"{s}^{e}")
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def to_json(self) -> list:
        return [
            {"coeff": _frac_text(c), "monomial": {s: e for s, e in m}}
            for m, c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, data: Sequence[Mapping]) -> "Poly":
        out: dict = {}
        for term in data:
            m = _mono_from_dict(term.get("monomial", {}))
            out[m] = out.get(m, 0) + as_fraction(term["coeff"])
        return cls(out)

    @classmethod
    def parse(cls, text: str) -> "Poly":
        return parse_poly(text)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Poly({self.to_text()!r})"


def _frac_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


ZERO = Poly._raw({})
ONE = Poly._raw({(): Fraction(1)})

_NUMBER = re.compile(r"^[+-]?\d+(/\d+)?$")
_SYMBOL = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\[\],']*$")


def parse_poly(text: str) -> Poly:
    """Parse the canonical text form (``coeff * sym^e * ...`` joined by ``+``).

    Also accepts ``-`` between terms and bare symbols or numbers.
    """
    src = text.strip()
    if not src:
        raise ValueError("empty polynomial text")
    # split on top-level + / - separators that are surrounded by spaces
    tokens = re.split(r"\s+([+-])\s+", src)
    terms = [(1, tokens[0])]
    for i in range(1, len(tokens), 2):
        terms.append((1 if tokens[i] == "+" else -1, tokens[i + 1]))
    total = ZERO
    for sign, body in terms:
        coeff = Fraction(sign)
        exps: dict = {}
        for factor in body.split("*"):
            f = factor.strip()
            if not f:
                raise ValueError(f"empty factor in {text!r}")
            if _NUMBER.match(f):
                coeff *= Fraction(f)
                continue
            neg = f.startswith("-")
            if neg:
                coeff = -coeff
                f = f[1:]
            if "^" in f:
                name, e = f.rsplit("^", 1)
                exp = int(e)
            else:
                name, exp = f, 1
            if not _SYMBOL.match(name):
                raise ValueError(f"bad symbol {name!r} in {text!r}")
            exps[name] = exps.get(name, 0) + exp
        total = total + Poly.monomial(exps, coeff)
    return total


def substitute(p: Poly, assignments: Mapping[str, "Poly | Scalar"]) -> Poly:
    """Simultaneous substitution of symbols by polynomials, fully expanded.

    Raises :class:`CyclicSubstitutionError` if the assignment graph has a
    cycle (including a symbol mapped to a polynomial containing itself).
    """
    if not assignments:
        return p
    assign = {k: Poly.coerce(v) for k, v in assignments.items()}
    _check_acyclic(assign)
    cache: dict = {}

    def power(name: str, e: int) -> Poly:
        key = (name, e)
        if key not in cache:
            cache[key] = assign[name] ** e
        return cache[key]

    total: dict = {}
    result = ZERO
    for m, c in p.terms.items():
        kept = []
        factor = None
        for s, e in m:
            if s in assign:
                term = power(s, e)
                factor = term if factor is None else factor * term
            else:
                kept.append((s, e))
        if factor is None:
            total[tuple(kept)] = total.get(tuple(kept), 0) + c
        else:
            result = result + factor * Poly._raw({tuple(kept): c})
    return result + Poly(total)


def _check_acyclic(assign: Mapping[str, Poly]) -> None:
    deps = {k: v.variables() & set(assign) for k, v in assign.items()}
    state: dict = {}

    def visit(k: str) -> None:
        st = state.get(k)
        if st == 1:
            raise CyclicSubstitutionError(f"cyclic substitution through {k!r}")
        if st == 2:
            return
        state[k] = 1
        for d in deps[k]:
            visit(d)
        state[k] = 2

    for k in assign:
        visit(k)


def falling_factorial(mu: Sequence[Scalar] | Scalar, k: Sequence[int] | int) -> Fraction:
    """Componentwise falling factorial ``prod_i prod_{j<k_i} (mu_i - j)``."""
    if isinstance(k, int):
        mu, k = [mu], [k]
    if len(mu) != len(k):
        raise ValueError("falling_factorial: length mismatch")
    out = Fraction(1)
    for m, kk in zip(mu, k):
        m = as_fraction(m)
        if kk < 0:
            raise ValueError("falling_factorial: negative order")
        for j in range(kk):
            out *= m - j
            if not out:
                return out
    return out


def binomial(mu: Scalar, k: int) -> Fraction:
    """Generalised binomial coefficient ``mu^(k falling) / k!``."""
    out = Fraction(1)
    mu = as_fraction(mu)
    for j in range(k):
        out = out * (mu - j) / (j + 1)
    return out


def multinomial(alpha: Sequence[int]) -> int:
    total, out = 0, 1
    for a in alpha:
        for j in range(1, a + 1):
            total += 1
            out = out * total // j
    return out


class Series:
    """Power series in ``x`` truncated at order ``N`` (degrees ``0..N``).

    Coefficients may be any commutative ring elements supporting ``+``,
    ``*``, multiplication by Fraction and ``is_zero()``; ``zero`` and ``one``
    supply the ring's identities.
    """

    __slots__ = ("coeffs", "order", "zero", "one")

    def __init__(self, coeffs: Sequence, order: int, zero=ZERO, one=ONE):
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        cs = list(coeffs[: order + 1])
        cs.extend([zero] * (order + 1 - len(cs)))
        self.coeffs = tuple(cs)
        self.order = order
        self.zero = zero
        self.one = one

    def like(self, coeffs: Sequence, order: int | None = None) -> "Series":
        return Series(coeffs, self.order if order is None else order, self.zero, self.one)

    @classmethod
    def constant(cls, c, order: int, zero=ZERO, one=ONE) -> "Series":
        return cls([c], order, zero, one)

    def __getitem__(self, n: int):
        if 0 <= n <= self.order:
            return self.coeffs[n]
        if n < 0:
            return self.zero
        raise IndexError(f"coefficient x^{n} beyond truncation {self.order}")

    def __len__(self) -> int:
        return self.order + 1

    def _check(self, other: "Series") -> None:
        if self.order != other.order:
            raise TruncationMismatchError(
                f"series truncations differ: {self.order} vs {other.order}"
            )

    def __add__(self, other: "Series") -> "Series":
        self._check(other)
        return self.like([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "Series") -> "Series":
        self._check(other)
        return self.like([a + b * -1 for a, b in zip(self.coeffs, other.coeffs)])

    def __mul__(self, other) -> "Series":
        if not isinstance(other, Series):
            return self.like([c * other for c in self.coeffs])
        return series_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.order == other.order and all(
            _ring_eq(a, b) for a, b in zip(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise TruncationMismatchError("cannot extend a truncated series")
        return self.like(self.coeffs[: order + 1], order)

    def shift(self, k: int = 1) -> "Series":
        """Multiply by ``x**k`` keeping the truncation."""
        return self.like([self.zero] * k + list(self.coeffs))

    def map(self, fn: Callable) -> "Series":
        return self.like([fn(c) for c in self.coeffs])

    def derivative_x(self) -> "Series":
        """d/dx; the result is truncated one order lower."""
        if self.order == 0:
            return self.like([], 0)
        return self.like([self.coeffs[n + 1] * (n + 1) for n in range(self.order)], self.order - 1)

    def is_zero(self) -> bool:
        return all(_ring_is_zero(c) for c in self.coeffs)

    def __repr__(self) -> str:
        return f"Series(order={self.order}, coeffs={list(self.coeffs)!r})"


def _ring_is_zero(c) -> bool:
    return c.is_zero() if hasattr(c, "is_zero") else c == 0


def _ring_eq(a, b) -> bool:
    return _ring_is_zero(a + b * -1)


def series_mul(f: Series, g: Series) -> Series:
    """Cauchy product truncated at the common order."""
    f._check(g)
    n = f.order
    out = []
    for k in range(n + 1):
        acc = f.zero
        for i in range(k + 1):
            a = f.coeffs[i]
            if _ring_is_zero(a):
                continue
            b = g.coeffs[k - i]
            if _ring_is_zero(b):
                continue
            acc = acc + a * b
        out.append(acc)
    return f.like(out)


def series_pow_int(f: Series, m: int) -> Series:
    """Integer power by repeated multiplication; negative needs unit constant."""
    if m < 0:
        return series_pow_int(series_pow_rational(f, Fraction(-1)), -m)
    result = f.like([f.one])
    for _ in range(m):
        result = series_mul(result, f)
    return result


def series_pow_rational(f: Series, mu: Scalar) -> Series:
    """``f**mu`` for a series with constant term 1.

    Equal to ``sum_k binomial(mu, k) (f - 1)**k``; computed with the
    recurrence ``n g_n = sum_{k=1}^n ((mu + 1) k - n) f_k g_{n-k}`` obtained
    from ``f g' = mu f' g``.
    """
    mu = as_fraction(mu)
    if not _ring_eq(f.coeffs[0], f.one):
        raise ValueError("rational power needs constant term 1")
    if mu == 0:
        return f.like([f.one])
    if mu == 1:
        return f
    g = [f.one]
    for n in range(1, f.order + 1):
        acc = f.zero
        for k in range(1, n + 1):
            fk = f.coeffs[k]
            if _ring_is_zero(fk):
                continue
            w = ((mu + 1) * k - n) / n
            if w:
                acc = acc + (fk * g[n - k]) * w
        g.append(acc)
    return f.like(g)


def series_pow_binomial(f: Series, mu: Scalar) -> Series:
    """Reference evaluation of ``f**mu`` straight from the binomial series."""
    mu = as_fraction(mu)
    if not _ring_eq(f.coeffs[0], f.one):
        raise ValueError("rational power needs constant term 1")
    h = f.like([f.zero] + list(f.coeffs[1:]))
    total = f.like([f.one])
    power = f.like([f.one])
    for k in range(1, f.order + 1):
        power = series_mul(power, h)
        total = total + power * binomial(mu, k)
    return total
