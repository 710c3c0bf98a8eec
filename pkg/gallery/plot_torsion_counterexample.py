"""
A (1,1)-tensor with nonzero torsion
===================================

N = diag(y, x) on the plane.  The index formula for the Nijenhuis torsion
and the bracket formula [NX,NY] - N[NX,Y] - N[X,NY] + N^2[X,Y] agree.
"""
from pnrec import Endomorphism11, Variable, VariableTable, VectorField, format_polynomial, nijenhuis_torsion
from pnrec.tensors import torsion_on_fields

t = VariableTable([Variable("x", "t"), Variable("y", "t")])
N = Endomorphism11(t, {("x", "x"): t.var("y"), ("y", "y"): t.var("x")})

T = nijenhuis_torsion(N, t.names)
for (upper, a, b), value in sorted(T.entries.items()):
    print(f"T^{upper}_{a}{b} =", format_polynomial(value))

dx = VectorField(t, {"x": t.one()})
dy = VectorField(t, {"y": t.one()})
print("T(d_x, d_y) from brackets:", torsion_on_fields(N, dx, dy))
