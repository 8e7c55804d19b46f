import json
from fractions import Fraction as F

import pytest

import families
import oracles
from tubedse.cocycle import MellinSeries
from tubedse.dse import (
    ConfigurationError,
    SpecError,
    check_gamma_equation,
    check_rge,
    counterexample_report,
    extract_gamma_beta,
    invariant_charge,
    parse_spec,
    phi_image,
    quasilinear_reduce,
    rio_coproduct_check,
    simple_spec,
    solve_analytic_oracle,
    solve_analytic_tubing,
    solve_combinatorial_closed,
    solve_combinatorial_fixpoint,
)
from tubedse.dse.checks import all_zero
from tubedse.dse.counterexample import b, reference_residual, two_place_spec
from tubedse.hopf import ForestLC
from tubedse.poly import ONE, ZERO, Poly, Series, series_pow_rational
from tubedse.trees import DecoratedTree, ladder, single_primitive

L = Poly.var("L")


def a(n, label="p"):
    return Poly.var(f"a[{label}][{n}]")


def spec_mu(mu, order, **kw):
    return simple_spec([single_primitive("p", 1, mu)], order, **kw)


# -- three-way agreement -------------------------------------------------------

@pytest.mark.parametrize("name", sorted(families.ORACLE_FAMILIES))
def test_three_way_agreement(name):
    spec = families.ORACLE_FAMILIES[name](5)
    fix = solve_combinatorial_fixpoint(spec)
    closed = solve_combinatorial_closed(spec)
    tub = solve_analytic_tubing(spec)
    orc = solve_analytic_oracle(spec)
    img = phi_image(closed, spec)
    for i in spec.equations:
        assert fix[i] == closed[i]
        assert img[i] == tub[i] == orc[i]


def test_parallel_workers_give_identical_output(monkeypatch):
    spec = families.system(5)
    serial = solve_analytic_tubing(spec)
    monkeypatch.setenv("TUBEDSE_THREADS", "3")
    assert solve_analytic_tubing(spec) == serial


# -- combinatorial examples ----------------------------------------------------

def test_linear_gives_ladders():
    T = solve_combinatorial_fixpoint(spec_mu(1, 6))["G"]
    assert T == Series([ForestLC.of(ladder(n)) if n else ForestLC.scalar(1) for n in range(7)], 6, ForestLC(), ForestLC.scalar(1))


def test_minus_one_second_order():
    T = solve_combinatorial_fixpoint(spec_mu(-1, 3))["G"]
    assert T[2] == ForestLC.of(ladder(2), coeff=-1)


def _count(series):
    return [c.evaluate(lambda t: ONE).constant_term() for c in series.coeffs]


def test_mu_two_counts_binary_trees():
    T = solve_combinatorial_closed(spec_mu(2, 5))["G"]
    counts = _count(T)
    assert counts == [oracles.binary_trees(n) for n in range(6)]
    assert counts[:5] == [1, 1, 2, 5, 14]


def test_minus_one_counts_plane_trees():
    N = 6
    T = solve_combinatorial_closed(spec_mu(-1, N))["G"]
    for n in range(1, N + 1):
        plane = {}
        for pt in oracles.plane_trees(n):
            t = oracles.plane_to_unordered(pt)
            plane[t] = plane.get(t, 0) + 1
        expect = ForestLC({(t,): (-1) ** (n - 1) * c for t, c in plane.items()})
        assert T[n] == expect


@pytest.mark.parametrize("mu", [F(1, 2), 3, F(-2, 3)])
def test_generic_exponent_counts(mu):
    # tree -> 1 turns the equation into T = 1 + x T^mu
    T = solve_combinatorial_closed(spec_mu(mu, 5))["G"]
    u = Series([ONE], 5)
    for _ in range(6):
        u = Series([ONE], 5) + series_pow_rational(u, mu).shift(1)
    assert _count(T) == [c.constant_term() for c in u.coeffs]


# -- analytic examples -----------------------------------------------------------

def test_linear_constant_mellin_is_exponential():
    p = single_primitive()
    spec = simple_spec([p], 6, mellin={"p": MellinSeries.from_list(p, [a(0)])})
    G = solve_analytic_oracle(spec)["G"]
    x = ONE
    for n in range(7):
        assert G[n] == x
        x = x * a(0) * L * F(1, n + 1)
    assert solve_analytic_tubing(spec)["G"] == G


def test_minus_two_low_orders():
    G = solve_analytic_tubing(spec_mu(-2, 3))["G"]
    assert G[0] == 1
    assert G[1] == a(0) * L
    assert G[2] == -(a(0) ** 2 * L ** 2 + 2 * a(0) * a(1) * L)


def test_two_place_counterexample_low_orders():
    G = solve_analytic_oracle(two_place_spec(4))["G"]
    assert G[1] == L * b(0, 0)
    assert G[2] == -(L ** 2 * b(0, 0) ** 2 + L * b(0, 0) * (b(0, 1) + b(1, 0)))


# -- invariant charge and RGE ------------------------------------------------------

def test_invariant_charge_examples():
    Q = invariant_charge(spec_mu(1, 3, s={"G": 0}))
    assert Q[1] == ForestLC.scalar(1) and all(Q[n].is_zero() for n in (0, 2, 3))
    Q = invariant_charge(spec_mu(-1, 3, s={"G": -2}))
    assert Q[2] == ForestLC.of(DecoratedTree("p"), coeff=-2)


def test_charge_needed():
    with pytest.raises(ConfigurationError):
        invariant_charge(spec_mu(-1, 3))
    with pytest.raises(ConfigurationError):
        check_rge({}, None, spec_mu(-1, 3))


def test_gamma_beta_examples():
    p = single_primitive("p", 1, -1)
    spec = simple_spec([p], 4, s={"G": -2})
    x = ONE
    exp = []
    for n in range(5):
        exp.append(x)
        x = x * a(0) * L * F(1, n + 1)
    gb = extract_gamma_beta({"G": Series(exp, 4)}, spec)
    assert gb.gamma["G"] == Series([ZERO, a(0)], 4)
    assert gb.beta == Series([ZERO, ZERO, -2 * a(0)], 4)
    gb = extract_gamma_beta({"G": Series([ONE], 4)}, spec)
    assert gb.gamma["G"].is_zero()
    assert all_zero(check_rge({"G": Series([ONE], 4)}, gb, spec))


def test_counterexample_gamma():
    spec = two_place_spec(4)
    G = solve_analytic_oracle(spec)
    g = extract_gamma_beta(G, spec).gamma["G"]
    assert g[1] == b(0, 0) and g[2] == -b(0, 0) * (b(0, 1) + b(1, 0))


def test_linear_rge():
    p = single_primitive()
    spec = simple_spec([p], 6, s={"G": 0}, mellin={"p": MellinSeries.from_list(p, [a(0)])})
    G = solve_analytic_oracle(spec)
    assert all_zero(check_rge(G, extract_gamma_beta(G, spec), spec))


@pytest.mark.parametrize("name", sorted(families.RGE_FAMILIES))
def test_rge_rio_and_gamma(name):
    spec = families.RGE_FAMILIES[name](5)
    G = solve_analytic_tubing(spec)
    assert all_zero(check_rge(G, extract_gamma_beta(G, spec), spec))
    assert all(rio_coproduct_check(spec, 4).values())
    assert all_zero(check_gamma_equation(spec, G))


def test_rge_for_counterexample_spec():
    spec = two_place_spec(4)
    G = solve_analytic_oracle(spec)
    assert all_zero(check_rge(G, extract_gamma_beta(G, spec), spec))
    assert all(rio_coproduct_check(spec, 3).values())


def test_rge_detects_a_wrong_solution():
    spec = families.s_minus_two(4)
    G = solve_analytic_tubing(spec)
    bad = {"G": G["G"] + Series([ZERO, ZERO, L ** 2 * a(1)], 4)}
    assert not all_zero(check_rge(bad, extract_gamma_beta(bad, spec), spec))


def test_rio_examples():
    spec = spec_mu(-1, 4, s={"G": -2})
    res = rio_coproduct_check(spec, 1)
    assert res == {("G", 0): True, ("G", 1): True}
    with pytest.raises(ConfigurationError):
        rio_coproduct_check(spec, 5)


def test_gamma_equation_linear_both_forms():
    p = single_primitive()
    spec = simple_spec([p], 6, s={"G": 0})
    G = solve_analytic_oracle(spec)
    assert all_zero(check_gamma_equation(spec, G, "operator"))
    assert all_zero(check_gamma_equation(spec, G, "functional"))


def test_gamma_equation_vanishing_mellin():
    p = single_primitive()
    spec = simple_spec([p], 4, s={"G": 0}, mellin={"p": MellinSeries(p, default="zero")})
    G = solve_analytic_oracle(spec)
    assert G["G"] == Series([ONE], 4)
    assert all_zero(check_gamma_equation(spec, G))


def test_gamma_equation_errors():
    spec = families.s_minus_two(4)
    G = solve_analytic_oracle(spec)
    with pytest.raises(ConfigurationError):
        check_gamma_equation(spec, G, "functional")
    multi = two_place_spec(4)
    with pytest.raises(ConfigurationError):
        check_gamma_equation(multi, solve_analytic_oracle(multi))


# -- quasi-linear ------------------------------------------------------------------

def quasilinear_spec(order, mellin=None):
    p = single_primitive("p", 1, [2, -1], ("e1", "e2"))
    return simple_spec([p], order, s={"G": 0}, split={("p", "e1"): (2, 1), ("p", "e2"): (-1, 0)},
                       mellin=mellin)


def test_quasilinear_reduced_series():
    p = single_primitive("p", 1, [2, -1], ("e1", "e2"))
    m = MellinSeries.from_raw(p, {(0, 0): b(0, 0), (1, 0): b(1, 0), (0, 1): b(0, 1)})
    red = quasilinear_reduce(quasilinear_spec(3, {"p": m}))
    r = red.mellin["p"]
    assert r.value((0,)) == b(0, 0) and r.value((1,)) == 2 * b(1, 0) - b(0, 1) and r.value((2,)).is_zero()
    assert red.primitives[0].places == ("e",) and red.primitives[0].mu_at("e", "G") == 1


def test_quasilinear_single_place_unchanged():
    spec = simple_spec([single_primitive()], 5, s={"G": 0})
    red = quasilinear_reduce(spec)
    assert all(red.mellin["p"].value((n,)) == spec.mellin["p"].value((n,)) for n in range(5))


def test_quasilinear_solutions_agree():
    spec = quasilinear_spec(6)
    red = quasilinear_reduce(spec)
    assert solve_analytic_oracle(spec)["G"] == solve_analytic_oracle(red)["G"] == solve_analytic_tubing(red)["G"]
    G = solve_analytic_oracle(spec)
    assert all_zero(check_gamma_equation(spec, G, "functional"))


def test_quasilinear_hypothesis_enforced():
    with pytest.raises(SpecError):
        quasilinear_reduce(families.two_places(3))
    with pytest.raises(SpecError):
        quasilinear_reduce(families.system(3))


# -- spec parsing ------------------------------------------------------------------

SPEC = {
    "equations": ["G"],
    "order": 3,
    "primitives": [
        {"label": "p", "weight": 1, "places": [{"name": "e1", "mu": "2"}, {"name": "e2", "mu": -1}],
         "mellin": {"default": "symbolic", "coeffs": [{"alpha": [0, 0], "value": "1/2"}]}},
    ],
    "charge": {"s": {"G": 0}, "split": [{"place": "e1", "u": 2, "w": 1}, {"place": "e2", "u": -1, "w": 0}]},
}


def test_parse_and_round_trip():
    spec = parse_spec(SPEC)
    assert spec.mellin["p"].value((0, 0)) == F(1, 2)
    assert spec.mellin["p"].value((1, 0)) == Poly.var("a[p][1,0]")
    once = spec.dumps()
    assert parse_spec(once).dumps() == once
    assert parse_spec(json.dumps(SPEC)).dumps() == once


@pytest.mark.parametrize("patch,pointer", [
    (lambda d: d.pop("order"), "/"),
    (lambda d: d.update(order=-1), "/order"),
    (lambda d: d["primitives"][0]["places"][1].update(mu="x"), "/primitives/0/places/1/mu/G"),
    (lambda d: d["primitives"][0].update(equation="H"), "/primitives/0/equation"),
    (lambda d: d["charge"]["split"][0].update(u=1), "/charge/split"),
    (lambda d: d["primitives"][0]["places"][0].update(mu=3), "/primitives/0/places/0/mu"),
    (lambda d: d["primitives"][0]["mellin"].update(default="bogus"), "/primitives/0/mellin"),
])
def test_parse_errors_carry_pointers(patch, pointer):
    data = json.loads(json.dumps(SPEC))
    patch(data)
    with pytest.raises(SpecError) as info:
        parse_spec(data)
    assert info.value.pointer == pointer


def test_parse_invalid_json():
    with pytest.raises(SpecError) as info:
        parse_spec("{not json")
    assert info.value.pointer == "/"


def test_random_binding_deterministic():
    spec = families.two_places(4)
    g1 = solve_analytic_oracle(spec.bind_random(11))["G"]
    g2 = solve_analytic_oracle(spec.bind_random(11))["G"]
    assert g1 == g2
    assert all(v == "L" for c in g1.coeffs for v in c.variables())
    assert solve_analytic_tubing(spec.bind_random(11))["G"] == g1


# -- counterexample ----------------------------------------------------------------

@pytest.mark.parametrize("method", ["oracle", "tubing"])
def test_counterexample(method):
    rep = counterexample_report(4, method)
    assert rep["checks"] == {k: True for k in rep["checks"]}
    assert rep["obstruction_order"] == 4
    assert rep["residual"] == reference_residual().to_text()
    assert "-80 * L * a[3] * b[0,0]^3" in rep["residual"]


def test_counterexample_needs_order_four():
    with pytest.raises(ValueError):
        counterexample_report(3)
