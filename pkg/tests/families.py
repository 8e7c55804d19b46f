"""Spec families shared by the solver tests and the acceptance run."""

from fractions import Fraction as F

from tubedse.dse import simple_spec
from tubedse.trees import PrimitiveInfo, single_primitive


def single_place(order=5):
    p = single_primitive("p", 1, F(-1, 2))
    q = single_primitive("q", 2, 3)
    return simple_spec([p, q], order)


def two_places(order=5):
    p = single_primitive("p", 1, [2, F(-1, 3)], ("e1", "e2"))
    return simple_spec([p], order)


def system(order=5):
    pa = PrimitiveInfo("pA", 1, "A", ("e",), {"e": {"A": 2, "B": -1}})
    pb = PrimitiveInfo("pB", 1, "B", ("e",), {"e": {"A": 1, "B": 0}})
    return simple_spec([pa, pb], order, s={"A": 1, "B": -1})


def system_two_places(order=5):
    pa = PrimitiveInfo("pA", 1, "A", ("e1", "e2"), {"e1": {"A": 1, "B": F(1, 2)}, "e2": {"A": -1}})
    pb = PrimitiveInfo("pB", 2, "B", ("e",), {"e": {"A": -1, "B": 2}})
    return simple_spec([pa, pb], order)


ORACLE_FAMILIES = {
    "single-place": single_place,
    "two-places": two_places,
    "system": system,
    "system-two-places": system_two_places,
}


def s_minus_two(order=4):
    return simple_spec([single_primitive("p", 1, -1)], order, s={"G": -2})


def s_minus_two_with_weight_two(order=4):
    p = single_primitive("p", 1, -1)
    q = single_primitive("q", 2, -3)
    return simple_spec([p, q], order, s={"G": -2})


RGE_FAMILIES = {
    "s=-2": s_minus_two,
    "s=-2 two weights": s_minus_two_with_weight_two,
    "system s=(1,-1)": system,
}
