"""Reference polynomial for a four-vertex tubing example, in its literal
form and with the third group corrected."""

import math
from fractions import Fraction as F

from tubedse.poly import ZERO, Poly
from tubedse.trees import parse_tree

# five tubings with b = 3, 3, 4, 4, 4
WORKED_TREE = parse_tree("p(e: p, e: p(e: p))")

L = Poly.var("L")


def a(n):
    return Poly.var(f"a[p][{n}]")


def group(b, top):
    """``a_top L + a_(top-1) L^2/2! + ... + a_(top-b+1) L^b/b!``."""
    return sum((a(top - k + 1) * L ** k * F(1, math.factorial(k)) for k in range(1, b + 1)), ZERO)


def literal_display():
    """The polynomial exactly as printed, third group included."""
    return a(0) ** 3 * group(4, 3) + 2 * a(0) ** 2 * a(1) * group(3, 2) + 2 * a(0) ** 3 * group(3, 2)


def worked_display():
    """The same display with the third group promoted to b = 4, as the
    grading in x requires."""
    return a(0) ** 3 * group(4, 3) + 2 * a(0) ** 2 * a(1) * group(3, 2) + 2 * a(0) ** 3 * group(4, 3)
