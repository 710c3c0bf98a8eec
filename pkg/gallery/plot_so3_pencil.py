"""
Lenard-Magri tower of a Lie-Poisson pencil
==========================================

The so(3) bracket together with the constant bracket {x,y} = 1 forms a
compatible pair.  Expanding the Casimir x^2+y^2+z^2-2 lambda z from the seed
z gives a tower that stops after one step.
"""
from pathlib import Path

from pnrec import PoissonPencil, casimir_expand, format_polynomial, load_model

model = load_model(Path(__file__).parent / "data" / "so3_const.json")
pencil = model.pencil
t = pencil.table

tower = casimir_expand(pencil, t.var("z"), 3)
for i, c in enumerate(tower.levels):
    print(f"c_{i - 1} =", format_polynomial(c))

# every pair of coefficients commutes in both structures
for B, name in ((pencil.P1, "P1"), (pencil.P2, "P2")):
    ok = all(B.bracket(a, b).is_zero() for a in tower.levels for b in tower.levels)
    print(name, "commuting:", ok)

# a degenerate pencil shares its Casimirs: resonance
flat = PoissonPencil(pencil.P1, pencil.P1)
print("resonance for P2 = P1:", casimir_expand(flat, t.var("z"), 2).resonance)
