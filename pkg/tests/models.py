"""Small test models beyond the built-in G2 one."""

from singpaths.exactcore import parse_expr
from singpaths.geometry import Chart, Distribution, VectorField


def hilbert_cartan_cubic() -> Distribution:
    """(2,3,5) distribution of z' = (y'')^3; its singular paths are not straight lines."""
    c = Chart("HC", ("x", "y", "p", "q", "z"))

    def f(*e):
        return VectorField(c, [parse_expr(s, c.variables) for s in e])

    return Distribution(c, (f("1", "p", "q", "0", "q^3"), f("0", "0", "0", "1", "0")), base_point=(0, 0, 0, 1, 0),
                        name="HC")
