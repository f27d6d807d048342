"""The undeformed Wilson system: polynomials, spectrum and the ground-state norm.

Run: python3 demos/01_classical_system.py
"""

import mpmath as mp

from miop.classical import apply_Htilde, classical_P, energy, make_params, norm_h
from miop.virtual import DeletionSet
from miop import verification as V

p = make_params("W", (1, 1, 1, 1))
with p.context():
    print("Wilson parameters a = (1, 1, 1, 1)")
    for n in range(4):
        P = classical_P(p, n)
        res = apply_Htilde(p, P).distance(P * energy(p, n))
        print(f"  P_{n}(eta) coefficients {[mp.nstr(c, 8) for c in P.coeffs]}  E_{n} = {energy(p, n)}  eigen residual {mp.nstr(res, 3)}")

    r = V.integrate_weighted(p, DeletionSet(), lambda x: 1)
    print(f"\nint_0^inf phi0(x)^2 dx = {mp.nstr(r.values[0], 40)}")
    print(f"pi/3                   = {mp.nstr(mp.pi / 3, 40)}")
    print(f"closed-form h_0        = {mp.nstr(norm_h(p, 0), 40)}")
    print(f"(panels {r.panels}, cutoff x = {r.x_max}, error estimate {mp.nstr(r.error, 3)})")

    G, rep = V.gram_matrix(p, DeletionSet(), 3)
    print("\nGram matrix of P_0..P_3 under phi0^2:")
    for row in G:
        print("  " + "  ".join(f"{mp.nstr(v, 12):>20}" for v in row))
    print("all Gram checks pass:", rep.passed)
