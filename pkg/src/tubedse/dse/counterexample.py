"""A two-place equation whose solution is not a linear substitution of the
single-place equation with the same total exponent.

``G^`` has one primitive of weight 1 with places ``e1, e2`` (exponent -1
each) and Mellin coefficients ``b[i,j]`` of ``rho_1^i rho_2^j``; ``G`` has a
single place with exponent -2 and coefficients ``a[n]``.  Matching the two
order by order fixes ``a[0], a[1], a[2]`` and then fails at ``x^4``, where
solving for ``a[3]`` would need division by ``b[0,0]``.
"""

from __future__ import annotations

from fractions import Fraction

from ..cocycle import L, MellinSeries
from ..poly import Poly
from ..trees import single_primitive
from .solvers import solve_analytic_oracle, solve_analytic_tubing
from .spec import ChargeStructure, DSESpec

PLACES = ("e1", "e2")


def b(i: int, j: int) -> Poly:
    return Poly.var(f"b[{i},{j}]")


def a(n: int) -> Poly:
    return Poly.var(f"a[{n}]")


def two_place_spec(order: int) -> DSESpec:
    p = single_primitive("p", 1, [-1, -1], PLACES, "G")
    deg = max(order - 1, 0)
    raw = {(i, n - i): b(i, n - i) for n in range(deg + 1) for i in range(n + 1)}
    mellin = MellinSeries.from_raw(p, raw, truncation=deg)
    charge = ChargeStructure({"G": Fraction(-3)}, {("p", "e1"): (Fraction(2), 1), ("p", "e2"): (Fraction(-1), 0)})
    return DSESpec(["G"], [p], {"p": mellin}, order, charge)


def one_place_spec(order: int) -> DSESpec:
    p = single_primitive("p", 1, -2, ("e",), "G")
    deg = max(order - 1, 0)
    mellin = MellinSeries(p, {(n,): a(n) for n in range(deg + 1)}, default="zero", truncation=deg)
    return DSESpec(["G"], [p], {"p": mellin}, order, ChargeStructure({"G": Fraction(-3)}))


def reference_two_place() -> list:
    """Transcribed ``[x^n] G^`` for n <= 4."""
    x = Poly.var(L)
    s1 = b(0, 1) + b(1, 0)
    c3 = (b(0, 1) ** 2 + 4 * b(0, 0) * b(0, 2) + 2 * b(0, 1) * b(1, 0) + b(1, 0) ** 2
          + b(0, 0) * b(1, 1) + 4 * b(0, 0) * b(2, 0))
    c4_2 = (Fraction(15, 2) * b(0, 1) ** 2 + 20 * b(0, 0) * b(0, 2) + 15 * b(0, 1) * b(1, 0)
            + Fraction(15, 2) * b(1, 0) ** 2 + 5 * b(0, 0) * b(1, 1) + 20 * b(0, 0) * b(2, 0))
    c4_1 = (b(0, 1) ** 3 + 15 * b(0, 0) * b(0, 1) * b(0, 2) + 28 * b(0, 0) ** 2 * b(0, 3)
            + 3 * b(0, 1) ** 2 * b(1, 0) + 15 * b(0, 0) * b(0, 2) * b(1, 0)
            + 3 * b(0, 1) * b(1, 0) ** 2 + b(1, 0) ** 3 + 3 * b(0, 0) * b(0, 1) * b(1, 1)
            + 3 * b(0, 0) * b(1, 0) * b(1, 1) + 4 * b(0, 0) ** 2 * b(1, 2)
            + 15 * b(0, 0) * b(0, 1) * b(2, 0) + 15 * b(0, 0) * b(1, 0) * b(2, 0)
            + 4 * b(0, 0) ** 2 * b(2, 1) + 28 * b(0, 0) ** 2 * b(3, 0))
    b00 = b(0, 0)
    return [
        Poly.const(1),
        x * b00,
        -(x ** 2 * b00 ** 2 + x * b00 * s1),
        Fraction(5, 3) * x ** 3 * b00 ** 3 + Fraction(7, 2) * x ** 2 * b00 ** 2 * s1 + x * b00 * c3,
        -(Fraction(10, 3) * x ** 4 * b00 ** 4 + 11 * x ** 3 * b00 ** 3 * s1 + x ** 2 * b00 ** 2 * c4_2 + x * b00 * c4_1),
    ]


def reference_one_place() -> list:
    """Transcribed ``[x^n] G`` for n <= 4."""
    x = Poly.var(L)
    return [
        Poly.const(1),
        x * a(0),
        -(x ** 2 * a(0) ** 2 + 2 * x * a(0) * a(1)),
        Fraction(5, 3) * x ** 3 * a(0) ** 3 + 7 * x ** 2 * a(0) ** 2 * a(1)
        + x * a(0) * (4 * a(1) ** 2 + 10 * a(0) * a(2)),
        -(Fraction(10, 3) * x ** 4 * a(0) ** 4 + 22 * x ** 3 * a(0) ** 3 * a(1)
          + x ** 2 * a(0) ** 2 * (30 * a(1) ** 2 + 50 * a(0) * a(2))
          + x * a(0) * (8 * a(1) ** 3 + 72 * a(0) * a(1) * a(2) + 80 * a(0) ** 2 * a(3))),
    ]


def reference_substitutions() -> dict:
    return {
        "a[0]": b(0, 0),
        "a[1]": (b(1, 0) + b(0, 1)) * Fraction(1, 2),
        "a[2]": (4 * b(0, 2) + b(1, 1) + 4 * b(2, 0)) * Fraction(1, 10),
    }


def reference_residual() -> Poly:
    """Transcribed ``[x^4](G - G^)`` after the three substitutions."""
    inner = (3 * b(0, 1) * b(0, 2) + 140 * b(0, 0) * b(0, 3) + 3 * b(0, 2) * b(1, 0)
             - 3 * b(0, 1) * b(1, 1) - 3 * b(1, 0) * b(1, 1) + 20 * b(0, 0) * b(1, 2)
             + 3 * b(0, 1) * b(2, 0) + 3 * b(1, 0) * b(2, 0) + 20 * b(0, 0) * b(2, 1)
             + 140 * b(0, 0) * b(3, 0) - 400 * b(0, 0) * a(3))
    return inner * Poly.var(L) * b(0, 0) ** 2 * Fraction(1, 5)


def _solve_linear(d: Poly, name: str):
    """Solve ``d == 0`` for ``name`` when ``d`` is linear in it with a
    single-term coefficient dividing the rest exactly and the quotient free
    of ``L``; otherwise None."""
    if d.degree_in(name) != 1:
        return None
    c = d.coeff(name, 1)
    if len(c.terms) != 1:
        return None
    q = d.coeff(name, 0).divide_exact(c)
    if q is None or L in q.variables():
        return None
    return -q


def counterexample_report(order: int = 4, method: str = "oracle") -> dict:
    if order < 4:
        raise ValueError("the counterexample needs order >= 4")
    solve = solve_analytic_oracle if method == "oracle" else solve_analytic_tubing
    g_hat = solve(two_place_spec(order))["G"]
    g = solve(one_place_spec(order))["G"]
    ref_hat = reference_two_place()
    ref_g = reference_one_place()
    subs: dict = {}
    residual = None
    obstruction = None
    for n in range(1, order + 1):
        d = g[n].substitute(subs) - g_hat[n]
        name = f"a[{n - 1}]"
        sol = _solve_linear(d, name)
        if sol is None or not d.substitute({name: sol}).is_zero():
            residual = d
            obstruction = n
            break
        subs[name] = sol
    ref_subs = reference_substitutions()
    checks = {
        "G_hat_series": all(g_hat[n] == ref_hat[n] for n in range(5)),
        "G_series": all(g[n] == ref_g[n] for n in range(5)),
        "substitutions": all(subs.get(k) == v for k, v in ref_subs.items()),
        "obstruction_at_x4": obstruction == 4,
        "residual": residual is not None and residual == reference_residual(),
    }
    return {
        "order": order,
        "method": method,
        "G_hat": [c.to_text() for c in g_hat.coeffs],
        "G": [c.to_text() for c in g.coeffs],
        "substitutions": {k: v.to_text() for k, v in sorted(subs.items())},
        "obstruction_order": obstruction,
        "residual": residual.to_text() if residual is not None else None,
        "checks": checks,
        "pass": all(checks.values()),
    }
