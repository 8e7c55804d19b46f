import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from tubedse.cocycle import (
    MellinSeries,
    MellinTruncationError,
    Phi,
    apply_cocycle,
    apply_operator_diagonal,
    cocycle_identity_check,
    phi_recursive,
)
from tubedse.hopf import ForestLC, coproduct
from tubedse.poly import ONE, Poly
from tubedse.trees import linear_extension_count, parse_tree, single_primitive, trees_up_to_size

L = Poly.var("L")
L1, L2, Le = Poly.var("L.e1"), Poly.var("L.e2"), Poly.var("L.e")
P = single_primitive()
P2 = single_primitive("p", 1, [1, 1], ("e1", "e2"))


def a(n):
    return Poly.var(f"a[p][{n}]")


def test_constant_argument():
    assert apply_cocycle(MellinSeries.symbolic(P), ONE) == a(0) * L
    assert apply_cocycle(MellinSeries.symbolic(P2), ONE) == Poly.var("a[p][0,0]") * L


def test_integration_cocycle():
    m = MellinSeries.constant_one(P)
    for n in range(6):
        assert apply_cocycle(m, Le ** n) == L ** (n + 1) * F(1, n + 1)


def test_two_place_linear_example():
    b = {k: Poly.var(f"b[{k[0]},{k[1]}]") for k in [(0, 0), (1, 0), (0, 1)]}
    m = MellinSeries.from_raw(P2, b)
    assert apply_cocycle(m, L1) == b[0, 0] * L ** 2 * F(1, 2) + b[1, 0] * L


def test_single_place_monomial_formula():
    # Lambda(L_e^n) = sum_k n!/(n-k)! a_k L^(n-k+1)/(n-k+1)
    m = MellinSeries.symbolic(P)
    for n in range(5):
        expect = sum(
            (a(k) * math.perm(n, k) * L ** (n - k + 1) * F(1, n - k + 1) for k in range(n + 1)),
            Poly.const(0),
        )
        assert apply_cocycle(m, Le ** n) == expect


def test_foreign_variable_rejected():
    with pytest.raises(ValueError):
        apply_cocycle(MellinSeries.symbolic(P), L1)
    with pytest.raises(ValueError):
        apply_cocycle(MellinSeries.symbolic(P), L)


def test_truncation_enforced():
    m = MellinSeries.symbolic(P, truncation=2)
    apply_cocycle(m, Le ** 2)
    with pytest.raises(MellinTruncationError):
        apply_cocycle(m, Le ** 3)


def test_identity_examples():
    assert cocycle_identity_check(MellinSeries.symbolic(P), ONE)
    assert cocycle_identity_check(MellinSeries.symbolic(P, truncation=2), Le)
    assert cocycle_identity_check(MellinSeries.symbolic(P2, truncation=2), L1 * L2)


@pytest.mark.parametrize("prim", [P, P2, single_primitive("p", 1, [1, 1, 1], ("e1", "e2", "e3"))])
def test_identity_on_all_monomials(prim):
    m = MellinSeries.symbolic(prim)
    names = [f"L.{e}" for e in prim.places]
    for deg in range(6 if len(names) < 3 else 4):
        for alpha in m.alphas(deg):
            f = Poly.monomial(dict(zip(names, alpha)))
            assert cocycle_identity_check(m, f)


def test_identity_fails_for_a_non_cocycle():
    # multiplication by L is linear but not a 1-cocycle of this form
    m = MellinSeries.symbolic(P)
    lam = apply_cocycle(m, Le) * L
    lhs = lam.substitute({"L": Poly.var("L'") + Poly.var("L''")})
    assert lhs != lam.rename({"L": "L'"}) + lam.rename({"L": "L''"})


scale_polys = st.lists(
    st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-4, 4)), min_size=1, max_size=4
).map(lambda ts: sum((Poly.monomial({"L.e1": i, "L.e2": j}, c) for i, j, c in ts), Poly.const(0)))


@settings(max_examples=40, deadline=None)
@given(scale_polys)
def test_identity_on_random_polynomials(f):
    assert cocycle_identity_check(MellinSeries.symbolic(P2), f)


@settings(max_examples=40, deadline=None)
@given(scale_polys)
def test_derivative_law(f):
    m = MellinSeries.symbolic(P2)
    assert apply_cocycle(m, f).derivative("L") == apply_operator_diagonal(m, f)
    assert apply_cocycle(m, f).coeff("L", 0).is_zero()


@settings(max_examples=40, deadline=None)
@given(scale_polys)
def test_boring_series_equals_single_place(f):
    boring = MellinSeries(P2, boring=True)
    single = MellinSeries.symbolic(P)
    diag = f.substitute({"L.e1": Le, "L.e2": Le})
    assert apply_cocycle(boring, f) == apply_cocycle(single, diag)


@settings(max_examples=40, deadline=None)
@given(scale_polys)
def test_place_permutation_invariance(f):
    m = MellinSeries.symbolic(P2)
    swapped = MellinSeries(P2, {(i, j): m.value((j, i)) for i in range(8) for j in range(8)}, default="zero")
    g = f.rename({"L.e1": "L.tmp"}).rename({"L.e2": "L.e1"}).rename({"L.tmp": "L.e2"})
    assert apply_cocycle(m, f) == apply_cocycle(swapped, g)


def test_phi_examples():
    m = {"p": MellinSeries.symbolic(P)}
    assert phi_recursive(parse_tree("p"), m) == a(0) * L
    one = {"p": MellinSeries.constant_one(P)}
    for t in trees_up_to_size([P], 6):
        n = t.size
        expect = L ** n * F(linear_extension_count(t), math.factorial(n))
        assert phi_recursive(t, one) == expect


def test_phi_multiplicative_on_forests():
    m = {"p": MellinSeries.symbolic(P)}
    phi = Phi(m)
    t1, t2 = parse_tree("p(e: p)"), parse_tree("p(e: p, e: p)")
    assert phi.forest((t1, t2)) == phi(t1) * phi(t2)
    assert phi.forest(()) == ONE


def _split_phi(phi, d):
    total = Poly.const(0)
    for (low, up), c in d.terms.items():
        total = total + c * phi.forest(low).rename({"L": "L'"}) * phi.forest(up).rename({"L": "L''"})
    return total


@pytest.mark.parametrize("prims", [[P], [P2, single_primitive("q", 1, [1, 1], ("e1", "e2"))]])
def test_phi_is_a_bialgebra_morphism(prims):
    # phi(t)(L' + L'') = sum over downsets of phi(D)(L') phi(t minus D)(L'')
    phi = Phi({p.label: MellinSeries.symbolic(p) for p in prims})
    for t in trees_up_to_size(prims, 4 if len(prims) > 1 else 5):
        lhs = phi(t).substitute({"L": Poly.var("L'") + Poly.var("L''")})
        assert lhs == _split_phi(phi, coproduct(ForestLC.of(t)))


def test_random_binding_is_deterministic():
    m1 = MellinSeries.symbolic(P2).bind_random(7)
    m2 = MellinSeries.symbolic(P2).bind_random(7)
    m3 = MellinSeries.symbolic(P2).bind_random(8)
    keys = [(i, j) for i in range(4) for j in range(4)]
    assert [m1.value(k) for k in keys] == [m2.value(k) for k in keys]
    assert [m1.value(k) for k in keys] != [m3.value(k) for k in keys]
    assert all(not m1.value(k).variables() for k in keys)


def test_json_round_trip():
    m = MellinSeries.from_raw(P2, {(0, 0): 2, (1, 0): Poly.var("b[1,0]")}, truncation=3)
    back = MellinSeries.from_json(P2, m.to_json())
    assert all(back.value(al) == m.value(al) for d in range(4) for al in m.alphas(d))
    sym = MellinSeries.from_json(P, {"coeffs": [{"alpha": [1], "value": "sym"}, {"alpha": [0], "value": "1/2"}]})
    assert sym.value((1,)) == a(1) and sym.value((0,)) == F(1, 2) and sym.value((2,)).is_zero()


def test_boring_rejects_inconsistent_values():
    with pytest.raises(ValueError):
        MellinSeries(P2, {(1, 0): 1, (0, 1): 2}, boring=True)
