"""Restricted root systems and the adjoint-representation table.

Builds root-system data with exact rational pairings, verifies the
defining property of the distinguished simple root for every supported
type, and enumerates admissible subsets with their nuclei.
"""

from anoctl.roots import (
    ThetaSet,
    admissible_lattice_dot,
    build_root_system,
    nucleus_saturation,
    opposition_star,
    table1_rows,
    tau_admissible_sets,
)

# Opposition involutions: type A reverses the diagram, the odd D types
# swap the fork, E6 reflects; everything else is trivial.
for label, rank in (("A", 4), ("D", 5), ("E6", 6), ("B", 3)):
    rs = build_root_system(label, rank)
    print(f"{label}_{rank} opposition:", rs.opposition)

# The highest root of the adjoint representation pairs positively with
# exactly the distinguished simple root and its opposition image.
print("\nadjoint data (one row per type):")
for rs in table1_rows():
    t1 = rs.table1
    derived = sorted(rs.positive_pairing_set(t1.chi_G_coeffs))
    print(f"  {rs.type_label:<3} rank {rs.rank}: chi = {t1.chi_G_coeffs}"
          f"  positive set {derived}")

# Admissible subsets for the support of a minimal embedding of an odd
# complex orthogonal group form a chain, with singleton nuclei.
rs = build_root_system("B", 3)
support = ThetaSet(rs, frozenset({3}))
print("\nadmissible sets for B_3 with support {alpha_3}:")
for theta in tau_admissible_sets(rs, support):
    vee, dd = nucleus_saturation(rs, support, theta)
    print(f"  theta = {set(theta.sorted_members) or '{}'}"
          f"  saturation {set(vee.sorted_members) or '{}'}"
          f"  nucleus {set(dd.sorted_members) or '{}'}")

star = opposition_star(rs, support)
print("opposition image of the support:", set(star.sorted_members))
print("\ninclusion lattice (dot):")
print(admissible_lattice_dot(rs, support))
