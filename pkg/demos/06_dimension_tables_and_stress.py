"""Two small endpieces.

First, the closed-form dimension bookkeeping of the free n-dimensional
rigid body: generic orbit dimension, the genera of the spectral curve
and its quotient by (z,h) -> (-z,-h), and the anti-invariant torus
dimension, which is exactly half the orbit dimension.

Second, a stress input: the quintic member of the coupled-oscillator
family whose movable branching is t^(1/3).  Its dominant balance lives
in a cubic extension of Q (the engine works over Q plus free symbols,
so it reports the defining cubic instead of propagating).
"""
from laxkit.laxflow import rigid_body_dims
from laxkit.painleve import detect_weights, indicial_solve
from laxkit.sysdsl import parse_system

print("free rigid body on so(n):")
print("  n   orbit   g(C)  g(C0)  prym   prym = orbit/2")
for n in range(3, 11):
    d = rigid_body_dims(n)
    print(f"  {n:2d}   {d['dim_orbit']:3d}    {d['genus_C']:3d}   "
          f"{d['genus_C0']:3d}    {d['dim_prym']:3d}    "
          f"{2 * d['dim_prym'] == d['dim_orbit']}")

print("\nquintic stress input (movable t^(1/3) branching):")
quintic = parse_system("""
system quintic
vars x y px py
eq x = px
eq y = py
eq px = -2*x*y^3 - 3/4*x^3*y
eq py = -5*y^4 - 3*x^2*y^2 - 3/16*x^4
""")
for wv in detect_weights(quintic):
    dropped = []
    bals = indicial_solve(quintic, wv, algebraic_out=dropped)
    print(f"  weights {wv} (branching index {wv.ell})")
    print(f"  rational balances: {len(bals)}")
    for var, cof in dropped:
        poly = " + ".join(f"({c})*{var}^{i}" for i, c in enumerate(cof) if c)
        print(f"  leading coefficient of {var} satisfies {poly} = 0")
print("  (a cube root of -2/9: outside Q, reported rather than propagated)")
