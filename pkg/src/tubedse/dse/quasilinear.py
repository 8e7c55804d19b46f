"""Reduction of quasi-linear multi-place equations (exponents summing to 1 at
every primitive) to single-place linear ones: ``A~(L) = A(mu_e L : e)``."""

from __future__ import annotations

from fractions import Fraction

from ..cocycle import MellinSeries
from ..poly import ZERO
from ..trees import single_primitive
from .spec import ChargeStructure, DSESpec, SpecError


def is_quasilinear(spec: DSESpec) -> bool:
    if len(spec.equations) != 1:
        return False
    i = spec.equations[0]
    return all(sum(p.mu_at(e, i) for e in p.places) == 1 for p in spec.primitives)


def reduced_mellin(m: MellinSeries, degree: int, equation: str, place: str = "e") -> MellinSeries:
    """Coefficients ``A~_n = sum_{|alpha|=n} A_alpha prod_e mu_e^alpha_e`` up to ``degree``."""
    p = m.prim
    mus = [p.mu_at(e, equation) for e in p.places]
    vals = {}
    for n in range(degree + 1):
        acc = ZERO
        for alpha in m.alphas(n):
            c = Fraction(1)
            for mu, a in zip(mus, alpha):
                c *= mu ** a
            if c:
                acc = acc + m.full(alpha) * c
        vals[(n,)] = acc
    prim = single_primitive(p.label, p.weight, 1, (place,), equation)
    return MellinSeries(prim, vals, default="zero", truncation=degree)


def quasilinear_reduce(spec: DSESpec) -> DSESpec:
    """Single-place spec with exponent 1 and rescaled Mellin series.

    Only single-equation specs are handled.
    """
    if len(spec.equations) != 1:
        raise SpecError("quasi-linear reduction handles single-equation specs only", "/equations")
    i = spec.equations[0]
    for k, p in enumerate(spec.primitives):
        total = sum(p.mu_at(e, i) for e in p.places)
        if total != 1:
            raise SpecError(
                f"primitive {p.label!r}: exponents sum to {total}, quasi-linear reduction needs 1",
                f"/primitives/{k}/places",
            )
    degree = max(spec.order - 1, 0)
    mellin = {p.label: reduced_mellin(spec.mellin[p.label], degree, i) for p in spec.primitives}
    prims = [mellin[p.label].prim for p in spec.primitives]
    charge = ChargeStructure({i: Fraction(0)}, {(p.label, "e"): (Fraction(1), p.weight) for p in prims})
    return DSESpec([i], prims, mellin, spec.order, charge)
