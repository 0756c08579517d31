"""Witt normal forms and subspace geometry.

Builds indefinite forms in Witt normal form, restricts them to
subspaces, and measures principal-angle distances on projective spaces
and Grassmannians.
"""

import numpy as np

from anoctl.forms import (
    Frame,
    dist_grassmann,
    dist_projective,
    dist_to_incidence,
    intersects,
    make_witt_form,
    orthogonal_complement,
    restrict_kernel,
    signature,
)

# The canonical form of signature (2,1): antidiagonal ones pair the first
# and last coordinates, so isotropic lines sit along basis vectors.
form = make_witt_form(2, 1)
print("gram matrix of the (2,1) Witt form:")
print(form.gram)
print("signature:", signature(form.gram, 1e-12))

# e1 is isotropic; (e1 - e3)/sqrt(2) is negative: an interior point of
# the projectivized solid cone.
iso = Frame.standard(3, [0])
neg = Frame.from_spanning(np.array([1.0, 0.0, -1.0]))
for name, line in (("e1", iso), ("(e1-e3)/sqrt2", neg)):
    restricted, kernel = restrict_kernel(form, line)
    print(f"b restricted to {name}: {restricted[0, 0]:+.3f}, "
          f"kernel dimension {kernel.k}")

# Distances: the sine metric on lines, its Hausdorff extension to planes,
# and the distance to the incidence set of planes through a line.
f32 = make_witt_form(3, 2)
w = Frame.standard(5, [0, 1])
wprime = Frame.standard(5, [0, 2])
line = Frame.from_spanning(np.array([1.0, 1.0, 0.0, 0.0, 0.0]))
print("\nplane distances in R^5:")
print("  dist(span(e1,e2), span(e1,e3)) =", dist_grassmann(w, wprime))
print("  dist(line(e1+e2), span(e1,e2)) =", dist_projective(
    line, Frame.from_spanning(w.columns[:, :1])))
print("  dist to incidence set of the line:", dist_to_incidence(w, line))

# Incidence of an isotropic line with a nonpositive plane is equivalent
# to a rank drop of W + L-perp; both sides computed independently.
l_iso = Frame.standard(5, [0])
w_touching = Frame.standard(5, [0, 1])
perp = orthogonal_complement(f32, l_iso)
print("\nisotropic line against a touching plane:")
print("  intersects:", intersects(l_iso, w_touching, 1e-9))
print("  dim(L-perp):", perp.k)
