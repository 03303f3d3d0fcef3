"""Three local multiplicities along orbits and their growth.

At each point three integers control volume collapse under iteration: the
vanishing order of the Jacobian (additive along the orbit), the local
topological degree (multiplicative), and the contraction order (the lowest
Taylor degree, supermultiplicative).  The map [2zt+w^2 : z^2 : t^2] is the
classical example where they split apart: its totally invariant point has
maximal degree growth but no contraction at all.
"""

from greenp2 import ProjMap, ProjPoint, parse_poly
from greenp2.multiplicities import orbit_report

maps = {
    "power [z^2:w^2:t^2]": ProjMap.validate([parse_poly(s) for s in ("z^2", "w^2", "t^2")]),
    "skewed [2zt+w^2:z^2:t^2]": ProjMap.validate(
        [parse_poly(s) for s in ("2zt+w^2", "z^2", "t^2")]
    ),
}

points = {
    "corner [0:0:1]": ProjPoint([0, 0, 1]),
    "edge   [1:0:1]": ProjPoint([1, 0, 1]),
    "free   [1:1:1]": ProjPoint([1, 1, 1]),
}

for mname, f in maps.items():
    print(f"\n=== {mname} ===")
    for pname, p in points.items():
        rep = orbit_report(f, p, 4)
        ok = "all laws hold" if all(rep.inequality_verdicts.values()) else "VIOLATION"
        print(f"{pname}:")
        print(f"   jacobian orders  {rep.jacobian_orders}")
        print(f"   local degrees    {rep.local_degrees}")
        print(f"   contraction      {rep.contraction_orders}")
        print(
            f"   growth estimates: degree {rep.estimates['degree_growth']:.3f}, "
            f"contraction {rep.estimates['contraction_growth']:.3f}  ({ok})"
        )

print(
    "\nNote the skewed map at [0:0:1]: degrees run 4, 16, 64, 256 (maximal) while"
    "\nthe contraction orders stay at 1 - a totally invariant point that is not"
    "\nsuperattracting, hence excluded from the exceptional point set."
)
