"""Combinatorial and analytic solvers: fixed-point iteration, closed-form
tree sums and tubing sums."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from ..cocycle import L, Phi, apply_cocycle, place_var
from ..hopf import ONE_LC, ZERO_LC, ForestLC, b_plus
from ..poly import ONE, ZERO, Series, series_mul, series_pow_rational
from ..trees import aut_order, enumerate_trees, falling_weight
from ..tubings import TubingEvaluator
from .spec import DSESpec


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("TUBEDSE_THREADS", "1")))
    except ValueError:
        return 1


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _powers(series: dict, order: int, needed) -> dict:
    out = {}
    for j, mu in needed:
        if (j, mu) not in out:
            out[(j, mu)] = series_pow_rational(series[j].truncate(order), mu)
    return out


def _needed_powers(spec: DSESpec) -> set:
    return {(j, mu) for p in spec.primitives for e in p.places for j, mu in p.mu[e].items() if mu}


def _place_factor(p, e, pw: dict, order: int, zero, one, rename=None) -> Series:
    f = Series([one], order, zero, one)
    for j, mu in sorted(p.mu[e].items()):
        if not mu:
            continue
        g = pw[(j, mu)]
        if rename is not None:
            g = g.map(rename)
        f = series_mul(f, g)
    return f


# -- combinatorial ------------------------------------------------------------

def solve_combinatorial_fixpoint(spec: DSESpec) -> dict:
    """``T_i = 1 + sum_p x^{w_p} B_p(tensor_e prod_j T_j^{mu_e[j]})`` order by order."""
    N = spec.order
    coeffs = {i: [ONE_LC] for i in spec.equations}
    needed = _needed_powers(spec)
    for n in range(1, N + 1):
        known = {i: Series(coeffs[i], n - 1, ZERO_LC, ONE_LC) for i in spec.equations}
        pw = _powers(known, n - 1, needed)
        new = {i: ZERO_LC for i in spec.equations}
        for p in spec.primitives:
            m = n - p.weight
            if m < 0:
                continue
            factors = [_place_factor(p, e, pw, n - 1, ZERO_LC, ONE_LC) for e in p.places]
            total = ZERO_LC
            for comp in _compositions(m, len(factors)):
                args = [f[k] for f, k in zip(factors, comp)]
                if any(a.is_zero() for a in args):
                    continue
                total = total + b_plus(p, args)
            new[p.equation] = new[p.equation] + total
        for i in spec.equations:
            coeffs[i].append(new[i])
    return {i: Series(coeffs[i], N, ZERO_LC, ONE_LC) for i in spec.equations}


def spec_trees(spec: DSESpec, max_weight: int | None = None) -> list:
    N = spec.order if max_weight is None else max_weight
    if N < 1:
        return []
    return enumerate_trees(spec.primitives, N, edge_filter=spec.edge_allowed)


def tree_coefficient(t, prims) -> Fraction:
    """``prod_v prod_e mu_e^(od(v, e) falling) / |Aut(t)|``."""
    return falling_weight(t, prims) / aut_order(t)


def solve_combinatorial_closed(spec: DSESpec) -> dict:
    N = spec.order
    prims = spec.prims
    coeffs = {i: [ONE_LC] + [ZERO_LC] * N for i in spec.equations}
    for t in spec_trees(spec):
        c = tree_coefficient(t, prims)
        if not c:
            continue
        i = prims[t.label].equation
        w = t.weight(prims)
        coeffs[i][w] = coeffs[i][w] + ForestLC.of(t, coeff=c)
    return {i: Series(coeffs[i], N, ZERO_LC, ONE_LC) for i in spec.equations}


def phi_image(tree_series: dict, spec: DSESpec, phi=None) -> dict:
    """Apply ``phi`` coefficientwise to tree series."""
    phi = phi or Phi(spec.mellin)
    out = {}
    for i, s in tree_series.items():
        out[i] = Series([c.evaluate(phi) for c in s.coeffs], s.order)
    return out


# -- analytic ----------------------------------------------------------------

def solve_analytic_oracle(spec: DSESpec) -> dict:
    """``G_i = 1 + sum_p x^{w_p} Lambda_p(prod_e prod_j G_j(x, L_e)^{mu_e[j]})``."""
    N = spec.order
    coeffs = {i: [ONE] for i in spec.equations}
    needed = _needed_powers(spec)
    for n in range(1, N + 1):
        known = {i: Series(coeffs[i], n - 1) for i in spec.equations}
        pw = _powers(known, n - 1, needed)
        new = {i: ZERO for i in spec.equations}
        for p in spec.primitives:
            m = n - p.weight
            if m < 0:
                continue
            prod = Series([ONE], m)
            for e in p.places:
                name = place_var(e)
                ren = lambda c, name=name: c.rename({L: name})
                f = _place_factor(p, e, pw, n - 1, ZERO, ONE, ren).truncate(m)
                prod = series_mul(prod, f)
            new[p.equation] = new[p.equation] + apply_cocycle(spec.mellin[p.label], prod[m])
        for i in spec.equations:
            coeffs[i].append(new[i])
    return {i: Series(coeffs[i], N) for i in spec.equations}


def _tubing_chunk(args):
    mellin, trees = args
    ev = TubingEvaluator(mellin)
    return [ev(t) for t in trees]


def _phi_tubing_many(spec: DSESpec, trees: list) -> list:
    workers = min(worker_count(), max(1, len(trees)))
    if workers <= 1 or len(trees) < 8:
        return _tubing_chunk((spec.mellin, trees))
    # contiguous chunks keep the merge order fixed
    size = -(-len(trees) // workers)
    chunks = [trees[k:k + size] for k in range(0, len(trees), size)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_tubing_chunk, [(spec.mellin, c) for c in chunks]))
    return [v for part in parts for v in part]


def solve_analytic_tubing(spec: DSESpec) -> dict:
    """Sum over trees of the tree coefficient times the tubing expansion."""
    N = spec.order
    prims = spec.prims
    trees = []
    weights = []
    for t in spec_trees(spec):
        c = tree_coefficient(t, prims)
        if c:
            trees.append(t)
            weights.append(c)
    values = _phi_tubing_many(spec, trees)
    coeffs = {i: [ONE] + [ZERO] * N for i in spec.equations}
    for t, c, v in zip(trees, weights, values):
        i = prims[t.label].equation
        w = t.weight(prims)
        coeffs[i][w] = coeffs[i][w] + v * c
    return {i: Series(coeffs[i], N) for i in spec.equations}


def green_to_json(G: dict) -> dict:
    return {i: [c.to_text() for c in s.coeffs] for i, s in G.items()}


def trees_to_json(T: dict) -> dict:
    return {i: [c.to_json() for c in s.coeffs] for i, s in T.items()}
