"""Two facts about deletion sets.

1. Equivalence: k type-I deletions {m, ..., m+k-1} and m type-II deletions
   {k, ..., k+m-1} give proportional denominators at suitably shifted
   parameters, hence the same deformed potential.
2. Degeneracy: when a1 + a2 = a3 + a4 the type-I and type-II virtual states
   coincide, so deleting one of each leaves a vanishing determinant.

Run: python3 demos/04_equivalence_and_degeneracy.py
"""

import mpmath as mp

from miop import DeletionSet, make_params
from miop.errors import DegenerateSystemError
from miop import multi

p = make_params("W", ("2.3", "2.1", "2.6", "1.9"))
with p.context():
    print("W a = (2.3, 2.1, 2.6, 1.9)")
    for k, m in ((1, 1), (1, 2), (2, 1), (2, 2)):
        D1, D2 = multi.equivalence_sets(k, m)
        A, r, rv = multi.equivalence_check(p, k, m)
        print(f"  {D1} vs {D2}: constant {mp.nstr(A, 12)}, Xi residual {mp.nstr(r, 3)}, V_D residual {mp.nstr(rv, 3)}")

sym = make_params("W", (2, 2, 2, 2))
with sym.context():
    print("\nW a = (2, 2, 2, 2), D = {1I,1II}")
    try:
        multi.build_Xi(sym, DeletionSet.parse("1I,1II"))
    except DegenerateSystemError as exc:
        print("  ", exc)
    print("  virtual polynomials xi_1 of both types:")
    from miop.casoratian import xi_poly

    for t in ("I", "II"):
        print(f"    type {t}:", [mp.nstr(c, 8) for c in xi_poly(sym, t, 1).coeffs])
