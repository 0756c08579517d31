"""Dense linear algebra over indefinite symmetric bilinear forms.

Witt normal forms, orthonormal subspace frames, restrictions and kernels,
principal-angle distances on projective spaces and Grassmannians, and
incidence tests.  Everything here is a pure function of its inputs; the
value types are treated as immutable after construction and are safe to
share across threads.

Subspaces are always carried as Euclidean-orthonormal frames (never as
projectors or Pluecker coordinates): principal-angle computations stay
stable and storage is O(nk).  Complex vector spaces are realized as real
spaces of doubled dimension together with an explicit complex-structure
matrix J; a complex bilinear form is carried as the pair of real forms
(its real and imaginary parts).
"""

from __future__ import annotations

import json

import numpy as np

# Global defaults for rank / membership decisions.  All rank and
# intersection decisions are singular-value thresholds against a single
# relative tolerance.
DEFAULT_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-10
SYMMETRY_TOL = 1e-12


class FormSignatureError(ValueError):
    """A gram matrix does not have the declared signature."""


class WittForm:
    """A nondegenerate symmetric bilinear form in Witt normal form.

    For signature (p, q) with p >= q the canonical gram matrix pairs
    coordinate i with coordinate n+1-i for i <= q (antidiagonal ones) and
    is the identity on the middle p-q block, so isotropic coordinate
    planes are spanned by leading basis vectors.

    ``field_tag`` is "real" or "complex".  A complex form of dimension n
    uses the same canonical n x n gram read as a complex-bilinear form;
    accessors provide the doubled real realization (real part, imaginary
    part, complex structure J) on R^{2n}.
    """

    def __init__(self, p, q, gram, field_tag="real"):
        gram = np.asarray(gram, dtype=float)
        n = p + q
        if gram.shape != (n, n):
            raise ValueError(f"gram must be {n}x{n}, got {gram.shape}")
        scale = np.linalg.norm(gram, 2)
        if scale > 0 and np.linalg.norm(gram - gram.T, 2) > SYMMETRY_TOL * scale:
            raise FormSignatureError("gram matrix is not symmetric")
        pos, neg, null = signature(gram, SYMMETRY_TOL)
        if (pos, neg, null) != (p, q, 0):
            raise FormSignatureError(
                f"gram has signature {(pos, neg, null)}, expected ({p}, {q}, 0)")
        self.p = int(p)
        self.q = int(q)
        self.gram = gram
        self.field_tag = field_tag

    @property
    def n(self):
        return self.p + self.q

    @property
    def is_complex(self):
        return self.field_tag == "complex"

    def eval(self, x, y):
        """Bilinear value b(x, y); columns are paired columnwise."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return x.T @ self.gram @ y

    # -- complex realization on R^{2n} ------------------------------------
    # Coordinates on R^{2n} are (Re z, Im z).

    def j_matrix(self):
        """Multiplication by sqrt(-1) on the doubled real space."""
        self._require_complex()
        n = self.n
        J = np.zeros((2 * n, 2 * n))
        J[:n, n:] = -np.eye(n)
        J[n:, :n] = np.eye(n)
        return J

    def re_gram(self):
        """Real part of the complex form as a 2n x 2n real gram matrix."""
        self._require_complex()
        G = self.gram
        return np.block([[G, np.zeros_like(G)], [np.zeros_like(G), -G]])

    def im_gram(self):
        """Imaginary part of the complex form as a 2n x 2n real gram."""
        self._require_complex()
        G = self.gram
        return np.block([[np.zeros_like(G), G], [G, np.zeros_like(G)]])

    def _require_complex(self):
        if not self.is_complex:
            raise ValueError("operation requires a complex form")

    # -- serialization -----------------------------------------------------

    def to_json(self):
        d = matrix_to_json(self.gram)
        d.update({"p": self.p, "q": self.q, "field": self.field_tag})
        return d

    @classmethod
    def from_json(cls, d):
        return cls(d["p"], d["q"], matrix_from_json(d), d.get("field", "real"))

    def __repr__(self):
        return f"WittForm(p={self.p}, q={self.q}, field={self.field_tag!r})"


def make_witt_form(p, q, field_tag="real"):
    """Canonical Witt form of signature (p, q), p >= q >= 0, p + q >= 1.

    The caller must order the signature so that p >= q; inputs with
    p < q are rejected rather than silently swapped.
    """
    if not (p >= q >= 0 and p + q >= 1):
        raise ValueError(f"need p >= q >= 0 and p + q >= 1, got ({p}, {q})")
    n = p + q
    gram = np.zeros((n, n))
    for i in range(q):
        gram[i, n - 1 - i] = 1.0
        gram[n - 1 - i, i] = 1.0
    for i in range(q, p):
        gram[i, i] = 1.0
    return WittForm(p, q, gram, field_tag)


def signature(m, tol):
    """Signature (pos, neg, null) of a symmetric matrix.

    Eigenvalues above +tol*|m|, below -tol*|m| and in between are counted,
    where |m| is the spectral norm.
    """
    m = np.asarray(m, dtype=float)
    scale = np.linalg.norm(m, 2) if m.size else 0.0
    if scale > 0 and np.linalg.norm(m - m.T, 2) > max(tol, SYMMETRY_TOL) * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    cut = tol * scale
    pos = int(np.sum(w > cut))
    neg = int(np.sum(w < -cut))
    return pos, neg, len(w) - pos - neg


class Frame:
    """An orthonormal spanning frame for a k-dimensional subspace of R^n.

    Frames with equal column span compare equal under ``span_equals``
    (all principal angles zero within tolerance); the stored columns are
    one choice of orthonormal basis.
    """

    def __init__(self, columns):
        columns = np.asarray(columns, dtype=float)
        if columns.ndim == 1:
            columns = columns[:, None]
        n, k = columns.shape
        if k > n:
            raise ValueError(f"frame has more columns ({k}) than ambient dim ({n})")
        if k:
            defect = np.linalg.norm(columns.T @ columns - np.eye(k), 2)
            if defect > ORTHONORMALITY_TOL:
                raise ValueError(
                    f"columns are not orthonormal (defect {defect:.2e}); "
                    "use Frame.from_spanning to orthonormalize")
        self.columns = columns
        self.ambient_dim = n
        self.k = k

    @classmethod
    def from_spanning(cls, vectors, tol=DEFAULT_TOL):
        """Orthonormalize a spanning set (columns); drops dependent columns."""
        vectors = np.asarray(vectors, dtype=float)
        if vectors.ndim == 1:
            vectors = vectors[:, None]
        if vectors.shape[1] == 0:
            return cls(np.zeros((vectors.shape[0], 0)))
        u, s, _ = np.linalg.svd(vectors, full_matrices=False)
        rank = int(np.sum(s > tol * (s[0] if s.size else 1.0)))
        return cls(u[:, :rank])

    @classmethod
    def standard(cls, n, indices):
        """Frame spanned by the listed standard basis vectors of R^n."""
        cols = np.zeros((n, len(indices)))
        for j, i in enumerate(indices):
            cols[i, j] = 1.0
        return cls(cols)

    def span_equals(self, other, tol=DEFAULT_TOL):
        if self.ambient_dim != other.ambient_dim or self.k != other.k:
            return False
        if self.k == 0:
            return True
        return dist_grassmann(self, other) < tol

    def to_json(self):
        return matrix_to_json(self.columns)

    @classmethod
    def from_json(cls, d):
        return cls(matrix_from_json(d))

    def __repr__(self):
        return f"Frame(ambient_dim={self.ambient_dim}, k={self.k})"


class FlagPoint:
    """A point of an isotropic-subspace flag variety: a frame whose span
    is isotropic for the referenced form."""

    def __init__(self, frame, form, iso_dim=None, tol=DEFAULT_TOL):
        if iso_dim is None:
            iso_dim = frame.k
        if frame.k != iso_dim:
            raise ValueError(f"frame has {frame.k} columns, expected {iso_dim}")
        gram = form.re_gram() if form.is_complex else form.gram
        if frame.ambient_dim != gram.shape[0]:
            raise ValueError("frame ambient dimension does not match the form")
        if iso_dim:
            restricted = frame.columns.T @ gram @ frame.columns
            scale = max(np.linalg.norm(gram, 2), 1.0)
            if np.linalg.norm(restricted, 2) > tol * scale:
                raise ValueError("frame span is not isotropic for the form")
        self.frame = frame
        self.form = form
        self.iso_dim = iso_dim

    def __repr__(self):
        return f"FlagPoint(iso_dim={self.iso_dim}, ambient={self.frame.ambient_dim})"


# ---------------------------------------------------------------------------
# restrictions and kernels


def restrict_kernel(form, w, tol=DEFAULT_TOL):
    """Restrict a form to a frame's span: (k x k gram, kernel frame).

    The kernel spans the null space of the restricted form, decided by
    singular values relative to tol (scaled by the ambient gram norm).
    """
    gram = form.re_gram() if form.is_complex else form.gram
    if w.ambient_dim != gram.shape[0]:
        raise ValueError("frame ambient dimension does not match the form")
    restricted = w.columns.T @ gram @ w.columns
    restricted = 0.5 * (restricted + restricted.T)
    if w.k == 0:
        return restricted, Frame(np.zeros((w.ambient_dim, 0)))
    vals, vecs = np.linalg.eigh(restricted)
    cut = tol * max(np.linalg.norm(gram, 2), 1.0)
    null_cols = vecs[:, np.abs(vals) <= cut]
    kernel = Frame(w.columns @ null_cols) if null_cols.shape[1] else \
        Frame(np.zeros((w.ambient_dim, 0)))
    return restricted, kernel


# ---------------------------------------------------------------------------
# principal angles and distances


def principal_sines(a, b):
    """Sines of the principal angles between two frames (ascending).

    Returns min(a.k, b.k) values, computed from the residual
    (I - P_big) Q_small, which stays accurate for small angles.
    """
    small, big = (a, b) if a.k <= b.k else (b, a)
    if small.k == 0:
        return np.zeros(0)
    resid = small.columns - big.columns @ (big.columns.T @ small.columns)
    s = np.linalg.svd(resid, compute_uv=False)
    return np.sort(np.clip(s, 0.0, 1.0))


def dist_projective(l1, l2):
    """|sin| of the angle between two lines (frames with one column)."""
    if l1.k != 1 or l2.k != 1:
        raise ValueError("dist_projective expects one-column frames")
    if not np.any(l1.columns) or not np.any(l2.columns):
        raise ValueError("zero column")
    return float(principal_sines(l1, l2)[0])


def dist_grassmann(w1, w2):
    """Hausdorff distance between projectivized spans of equal-dimensional
    subspaces under the projective sine metric = sine of the largest
    principal angle."""
    if w1.ambient_dim != w2.ambient_dim or w1.k != w2.k:
        raise ValueError("frames must have equal ambient dimension and k")
    if w1.k == 0:
        return 0.0
    return float(principal_sines(w1, w2)[-1])


def dist_to_incidence(w, l):
    """Distance from the line l to the projectivized span of w.

    Equals the Grassmannian distance from w to the incidence set of
    q-planes containing l (whose zero locus this function implicitly
    carries): the sine of the smallest principal angle between l and w.
    """
    if l.k != 1:
        raise ValueError("l must be a line (one column)")
    if w.ambient_dim != l.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    return float(principal_sines(l, w)[0])


def intersects(a, b, tol=DEFAULT_TOL):
    """True iff the spans intersect nontrivially (smallest principal
    angle sine below tol)."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if a.k == 0 or b.k == 0:
        return False
    return float(principal_sines(a, b)[0]) < tol


def contains(inner, outer, tol=DEFAULT_TOL):
    """True iff span(inner) is contained in span(outer) (every principal
    angle sine below tol)."""
    if inner.ambient_dim != outer.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if inner.k == 0:
        return True
    if inner.k > outer.k:
        return False
    return float(principal_sines(inner, outer)[-1]) < tol


def orthogonal_complement(form, w, tol=DEFAULT_TOL):
    """Frame of the b-orthogonal complement of span(w)."""
    gram = form.re_gram() if form.is_complex else form.gram
    if w.k == 0:
        return Frame(np.eye(gram.shape[0]))
    constraints = (gram @ w.columns).T
    _, s, vt = np.linalg.svd(constraints)
    rank = int(np.sum(s > tol * (s[0] if s.size else 1.0)))
    return Frame(vt[rank:].T)


def subspace_sum_rank(frames, tol=DEFAULT_TOL):
    """Rank of the sum of the given spans (singular-value decision)."""
    cols = np.hstack([f.columns for f in frames])
    if cols.shape[1] == 0:
        return 0
    s = np.linalg.svd(cols, compute_uv=False)
    return int(np.sum(s > tol * s[0]))


# ---------------------------------------------------------------------------
# JSON matrix encoding shared across the package


def matrix_to_json(m):
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]),
            "data": [float(x) for x in m.reshape(-1)]}


def matrix_from_json(d):
    m = np.asarray(d["data"], dtype=float).reshape(d["rows"], d["cols"])
    return m


def dump_json(obj, path):
    """Deterministic JSON emission (sorted keys, fixed separators)."""
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")
