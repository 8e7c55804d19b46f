"""Invariant charge, anomalous dimension, renormalization group equation and
the gamma equation, as exact residual computations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..cocycle import L
from ..hopf import ONE_LC, ZERO_LC, rio_coproduct_identity
from ..poly import ONE, ZERO, Poly, Series, series_mul, series_pow_rational
from .solvers import solve_combinatorial_fixpoint
from .spec import DSESpec


class ConfigurationError(ValueError):
    pass


def _require_charge(spec: DSESpec, what: str) -> None:
    if spec.charge is None:
        raise ConfigurationError(f"{what} needs a charge structure (exponent relation) in the spec")


def invariant_charge(spec: DSESpec, T: dict | None = None) -> Series:
    """``Q = x prod_i T_i^{s_i}`` as a ForestLC series."""
    _require_charge(spec, "invariant charge")
    T = T or solve_combinatorial_fixpoint(spec)
    N = spec.order
    prod = Series([ONE_LC], N, ZERO_LC, ONE_LC)
    for i in spec.equations:
        s = spec.charge.s.get(i, Fraction(0))
        if s:
            prod = series_mul(prod, series_pow_rational(T[i], s))
    return prod.shift(1)


def rio_coproduct_check(spec: DSESpec, n: int, T: dict | None = None) -> dict:
    """``{(i, k): bool}`` for the coproduct identity of ``[x^k] T_i``, k <= n."""
    _require_charge(spec, "the Riordan coproduct check")
    if n > spec.order:
        raise ConfigurationError("n exceeds the truncation order")
    T = T or solve_combinatorial_fixpoint(spec)
    Q = invariant_charge(spec, T)
    return {(i, k): rio_coproduct_identity(T[i], Q, k) for i in spec.equations for k in range(n + 1)}


@dataclass
class GammaBeta:
    gamma: dict  # equation -> Series of Poly
    beta: Series | None


def extract_gamma_beta(G: dict, spec: DSESpec) -> GammaBeta:
    gamma = {i: s.map(lambda c: c.coeff(L, 1)) for i, s in G.items()}
    beta = None
    if spec.charge is not None:
        N = next(iter(G.values())).order
        beta = Series([ZERO], N)
        for i, g in gamma.items():
            s = spec.charge.s.get(i, Fraction(0))
            if s:
                beta = beta + g.shift(1) * s
    return GammaBeta(gamma, beta)


def check_rge(G: dict, gb: GammaBeta, spec: DSESpec) -> dict:
    """``(d/dL - beta d/dx - gamma_i) G_i`` truncated one order lower."""
    _require_charge(spec, "the renormalization group check")
    out = {}
    for i, g in G.items():
        N = g.order
        if N == 0:
            out[i] = Series([ZERO], 0)
            continue
        dl = g.map(lambda c: c.derivative(L)).truncate(N - 1)
        dx = g.derivative_x()
        beta = gb.beta.truncate(N - 1)
        gam = gb.gamma[i].truncate(N - 1)
        out[i] = dl - series_mul(beta, dx) - series_mul(gam, g.truncate(N - 1))
    return out


def _beta_dx(beta: Series, h: Series) -> Series:
    """``beta * dh/dx`` at the truncation of ``h``; needs ``beta[0] == 0``."""
    if not beta[0].is_zero():
        raise ValueError("beta must vanish at x = 0")
    N = h.order
    out = []
    for n in range(N + 1):
        acc = ZERO
        for m in range(1, n + 1):
            b = beta[m]
            if b.is_zero():
                continue
            k = n - m + 1  # dh/dx at order n-m is (n-m+1) h[n-m+1]
            if k <= N:
                acc = acc + b * h[k] * k
        out.append(acc)
    return h.like(out)


def _single_place_groups(spec: DSESpec, i: str) -> dict:
    """Weight -> list of (Mellin series) for the single-place primitives of ``i``."""
    groups: dict = {}
    for p in spec.primitives_of(i):
        if len(p.places) != 1:
            raise ConfigurationError(
                f"primitive {p.label!r} has several insertion places; the gamma equation needs single-place primitives"
            )
        groups.setdefault(p.weight, []).append(spec.mellin[p.label])
    return groups


def _grouped_coeff(mellins: list, n: int) -> Poly:
    out = ZERO
    for m in mellins:
        out = out + m.value((n,))
    return out


def _reduce_if_needed(spec: DSESpec) -> DSESpec:
    if spec.is_single_place():
        return spec
    from .quasilinear import is_quasilinear, quasilinear_reduce

    if len(spec.equations) == 1 and is_quasilinear(spec):
        return quasilinear_reduce(spec)
    raise ConfigurationError(
        "gamma equation: multi-place primitives are supported only for quasi-linear single equations"
    )


def check_gamma_equation(spec: DSESpec, G: dict, form: str = "operator") -> dict:
    """Residual ``sum_k A_{i,k}(beta d/dx + gamma_i) x^k - gamma_i`` per equation
    (``form="operator"``), or ``sum_k x^k A_{i,k}(gamma_i) - gamma_i`` when
    ``beta == 0`` (``form="functional"``)."""
    _require_charge(spec, "the gamma equation")
    red = _reduce_if_needed(spec)
    gb = extract_gamma_beta(G, spec)
    N = next(iter(G.values())).order
    beta = gb.beta
    if form == "functional" and not beta.is_zero():
        raise ConfigurationError("the functional form of the gamma equation needs beta = 0")
    if form not in ("operator", "functional"):
        raise ValueError(f"unknown form {form!r}")
    out = {}
    for i in spec.equations:
        gamma = gb.gamma[i]
        total = Series([ZERO], N)
        for k, mellins in sorted(_single_place_groups(red, i).items()):
            if k > N:
                continue
            if form == "functional":
                # x^k A(gamma), powers of gamma start at x^n
                power = Series([ONE], N)
                acc = Series([ZERO], N)
                for n in range(0, N - k + 1):
                    a = _grouped_coeff(mellins, n)
                    if not a.is_zero():
                        acc = acc + power * a
                    power = series_mul(power, gamma)
                total = total + acc.shift(k)
            else:
                h = Series([ZERO] * k + [ONE], N)  # x^k
                for n in range(0, N - k + 1):
                    a = _grouped_coeff(mellins, n)
                    if not a.is_zero():
                        total = total + h * a
                    # D h with D = beta d/dx + gamma, applied right to left
                    h = _beta_dx(beta, h) + series_mul(gamma, h)
        out[i] = total - gamma
    return out


def all_zero(residuals: dict) -> bool:
    return all(s.is_zero() for s in residuals.values())
