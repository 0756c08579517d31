"""KAK decompositions, Cartan projections, flag maps, exterior powers.

Supported group tags: "gl" (real invertible matrices), "opq" (orthogonal
group of a real Witt form), "onC" (complex orthogonal group of the
canonical complex Witt form, handled with complex matrices and realified
flags).

The chamber representative mu(g) is the vector of log singular values in
a root-adapted order: all of them, weakly decreasing, for gl; the top q,
weakly decreasing and nonnegative, for opq and onC.  Decompositions are
deterministic: sign ambiguities in the compact factors are resolved by
forcing the first significant entry of each canonical column positive.

For opq the factorization works at any scale representable in floats:
the symmetric square g^T g is processed by deflation, using the exact
reciprocal-pair symmetry I M I = M^{-1} (I the +-1 diagonal of the form)
so that logarithms only ever see well-conditioned blocks, and compact
factors are assembled from the singular directions that are resolvable
in float64 (unresolvable directions contribute below the reconstruction
tolerance by construction and are completed orthogonally).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebras import KillingForm, adjoint_rep  # noqa: F401  (re-exported)
from .forms import Frame, FlagPoint, WittForm

FORM_PRESERVATION_TOL = 1e-8
_SIGNIFICANT = 1e-9
# singular directions below ||g|| * _RESOLVABLE cannot be recovered in
# float64 and are completed orthogonally
_RESOLVABLE = 1e-13


class GapTooSmallError(ValueError):
    """A flag map was requested where the defining root gap is too small
    for the flag to be numerically well defined."""

    def __init__(self, alpha, value, tol):
        super().__init__(
            f"gap <alpha_{alpha}, mu(g)> = {value:.3e} is below tol {tol:.3e}; "
            "the flag point is numerically ill-defined")
        self.alpha = alpha
        self.value = value


@dataclass(frozen=True)
class MuVector:
    """Cartan projection value in the closed positive chamber."""
    group_tag: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if np.any(np.diff(v) > 1e-9):
            raise ValueError("mu must be weakly decreasing")
        if self.group_tag in ("opq", "onC") and v.size and v[-1] < -1e-9:
            raise ValueError("opq/onC mu must be nonnegative")

    def gaps(self, rs):
        """Per-simple-root pairings (1-based dict); see mu_gaps."""
        return mu_gaps(self, rs)

    def gap(self, rs, alpha):
        return mu_gaps(self, rs)[alpha]

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class KakTriple:
    """g = k exp(a(mu)) l with k, l in the declared maximal compact."""
    k: np.ndarray
    mu: MuVector
    l: np.ndarray
    form: WittForm | None = None

    def chamber_matrix(self):
        return chamber_exp(self.mu, self.form)

    def reconstruct(self):
        return self.k @ self.chamber_matrix() @ self.l


def chamber_exp(mu, form=None):
    """exp of the chamber element with the given projection value."""
    v = mu.values
    if mu.group_tag == "gl":
        return np.diag(np.exp(v))
    if mu.group_tag == "opq":
        n = form.n
        d = np.ones(n)
        d[:len(v)] = np.exp(v)
        d[n - len(v):] = np.exp(-v[::-1])
        return np.diag(d)
    if mu.group_tag == "onC":
        n = form.n
        d = np.ones(n, dtype=complex)
        d[:len(v)] = np.exp(v)
        d[n - len(v):] = np.exp(-v[::-1])
        return np.diag(d)
    raise ValueError(f"unknown group tag {mu.group_tag!r}")


# ---------------------------------------------------------------------------
# sign canonicalization


def _canonicalize_signs(u, vt=None):
    """Force the first significant entry of each column of u positive,
    compensating on the matching rows of vt."""
    u = u.copy()
    vt = None if vt is None else vt.copy()
    for j in range(u.shape[1]):
        col = u[:, j]
        cmax = np.max(np.abs(col))
        if cmax == 0:
            continue
        idx = int(np.argmax(np.abs(col) > _SIGNIFICANT * cmax))
        if col[idx] < 0:
            u[:, j] = -col
            if vt is not None and j < vt.shape[0]:
                vt[j, :] = -vt[j, :]
    return (u, vt) if vt is not None else u


# ---------------------------------------------------------------------------
# gl


def kak_gl(g):
    """KAK of an invertible real matrix via SVD."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    if g.shape != (n, n):
        raise ValueError("g must be square")
    u, s, vt = np.linalg.svd(g)
    if s[-1] <= 0 or not np.all(np.isfinite(s)):
        raise ValueError("g is not invertible")
    u, vt = _canonicalize_signs(u, vt)
    return KakTriple(u, MuVector("gl", np.log(s)), vt)


# ---------------------------------------------------------------------------
# opq


def witt_pm_basis(p, q):
    """Orthogonal change of basis C with C^T G C = diag(+1_p, -1_q) for
    the canonical Witt gram G; chamber diagonals map to the standard
    block-antidiagonal abelian subspace."""
    n = p + q
    c = np.zeros((n, n))
    r = 1.0 / np.sqrt(2.0)
    for i in range(q):
        c[i, i] = r
        c[n - 1 - i, i] = r          # u_i^+ = (e_i + e_{n+1-i})/sqrt(2)
        c[i, p + i] = r
        c[n - 1 - i, p + i] = -r     # u_i^- = (e_i - e_{n+1-i})/sqrt(2)
    for j in range(q, p):
        c[j, j] = 1.0
    return c


def _check_form_preserved(g, gram, tol=FORM_PRESERVATION_TOL):
    scale = max(1.0, np.linalg.norm(g, 2) ** 2) * max(1.0, np.linalg.norm(gram, 2))
    defect = np.linalg.norm(g.T @ gram @ g - gram, 2)
    if defect > tol * scale:
        raise ValueError(
            f"matrix does not preserve the form (defect {defect:.2e})")


def _reciprocal_log(m, ipq, cutoff=1e6):
    """S = 1/2 log(m) for SPD m satisfying ipq m ipq = m^{-1}.

    Huge eigenpairs are peeled one at a time; each peeled eigenvector v
    has its reciprocal partner exactly at ipq v, so the orthogonal
    complement stays invariant and the remaining block is better
    conditioned.  In the final block only eigenvalues >= 1 are used and
    their mirrors are reconstructed through ipq, so the log never sees an
    eigenvalue computed with poor relative accuracy.
    """
    n = m.shape[0]
    w = np.eye(n)
    s = np.zeros((n, n))
    for _ in range(n):
        if w.shape[1] == 0:
            break
        mw = w.T @ m @ w
        mw = 0.5 * (mw + mw.T)
        norm = np.linalg.norm(mw, 2)
        if norm <= cutoff:
            vals, vecs = np.linalg.eigh(mw)
            ipq_w = w.T @ ipq @ w
            keep = vals > 1.0
            lplus = (vecs[:, keep] * (0.5 * np.log(vals[keep]))) @ vecs[:, keep].T
            s_blk = lplus - ipq_w @ lplus @ ipq_w
            s += w @ s_blk @ w.T
            break
        vals, vecs = np.linalg.eigh(mw)
        v = w @ vecs[:, -1]
        lam = 0.5 * np.log(vals[-1])
        vbar = ipq @ v
        vbar -= v * (v @ vbar)
        vbar /= np.linalg.norm(vbar)
        s += lam * (np.outer(v, v) - np.outer(vbar, vbar))
        # orthonormal complement of {v, vbar} inside the working space
        proj = w - np.outer(v, v @ w) - np.outer(vbar, vbar @ w)
        uu, sv, _ = np.linalg.svd(proj, full_matrices=False)
        w = uu[:, sv > 0.5]
    return s


def _complete_orthogonal(known, n):
    """Complete known orthonormal columns (dict index -> vector) to an
    n x n orthogonal matrix, filling unknown slots from the nullspace."""
    out = np.zeros((n, n))
    cols = sorted(known)
    missing = [j for j in range(n) if j not in known]
    if cols:
        mat = np.stack([known[j] for j in cols], axis=1)
        # polish the known block onto the nearest orthonormal set
        uu, _, vvt = np.linalg.svd(mat, full_matrices=False)
        mat = uu @ vvt
        for idx, j in enumerate(cols):
            out[:, j] = mat[:, idx]
        basis = np.linalg.svd(mat)[0][:, len(cols):]
    else:
        basis = np.eye(n)
    for idx, j in enumerate(missing):
        out[:, j] = _canonicalize_signs(basis[:, idx:idx + 1])[:, 0]
    return out


# above this spectral norm the squared matrix g^T g no longer resolves the
# full exponent range in float64 and the direct SVD assembly takes over
_MODERATE_NORM = 1e6


def kak_opq(g, form):
    """KAK of an element of O(b) for a real Witt form b.

    Up to spectral norm 1e5 all exponents are recovered to full precision
    through the deflated logarithm of g^T g.  Beyond that the singular
    value decomposition of g itself is paired up using the mirror
    symmetry (sigma, 1/sigma); exponents that float64 cannot separate
    from 0 at that scale are reported as 0, which perturbs the
    reconstruction by less than its relative tolerance.
    """
    g = np.asarray(g, dtype=float)
    p, q, n = form.p, form.q, form.n
    if g.shape != (n, n):
        raise ValueError(f"g must be {n}x{n}")
    if not np.all(np.isfinite(g)):
        raise ValueError("g has non-finite entries")
    _check_form_preserved(g, form.gram)
    c = witt_pm_basis(p, q)
    gp = c.T @ g @ c
    ipq = np.diag(np.concatenate([np.ones(p), -np.ones(q)]))
    if np.linalg.norm(gp, 2) <= _MODERATE_NORM:
        kdbl, lam, k1 = _assemble_opq_moderate(gp, ipq, p, q)
    else:
        kdbl, lam, k1 = _assemble_opq_extreme(gp, ipq, p, q)
    k = c @ kdbl @ c.T
    l = c @ k1.T @ c.T
    return KakTriple(k, MuVector("opq", lam), l, form)


def _assemble_opq_moderate(gp, ipq, p, q):
    """Factor through S = 1/2 log(g^T g): exact-grade at moderate scale."""
    n = p + q
    m = gp.T @ gp
    m = 0.5 * (m + m.T)
    s = _reciprocal_log(m, ipq)
    b = s[:p, p:]
    u1, lam, v1t = np.linalg.svd(b)
    u1, v1t = _canonicalize_signs(u1, v1t)
    k1 = np.zeros((n, n))
    k1[:p, :p] = u1
    k1[p:, p:] = v1t.T

    # left factor columns: the top singular direction of every reciprocal
    # pair determines both block columns (its mirror is ipq times it, so
    # the mirror is never computed through gp, where it would be noise)
    kdbl = np.zeros((n, n))
    root2 = np.sqrt(2.0)
    for i in range(q):
        rplus = (k1[:, i] + k1[:, p + i]) / root2
        splus = (gp @ rplus) / np.exp(lam[i])
        kdbl[:p, i] = root2 * splus[:p]
        kdbl[p:, p + i] = root2 * splus[p:]
    for j in range(q, p):
        kdbl[:, j] = gp @ k1[:, j]
    kdbl = _block_polish(kdbl, p)
    return kdbl, lam, k1


def _assemble_opq_extreme(gp, ipq, p, q):
    """Pair the SVD of gp itself via the mirror symmetry: the singular
    triple for 1/sigma is (left ipq u, right ipq v), so the canonical
    factor columns are the +-block parts of v and u."""
    n = p + q
    u, s, vt = np.linalg.svd(gp)
    band = max(1e-4, 3e6 * np.finfo(float).eps * s[0])
    nbig = sum(1 for i in range(q) if s[i] >= 1.0 + band)
    lam = np.zeros(q)
    lam[:nbig] = np.log(s[:nbig])

    k1_p, k1_q, kd_p, kd_q = {}, {}, {}, {}
    for j in range(nbig):
        v, uvec = vt[j], u[:, j]
        k1_p[j], k1_q[j] = v[:p], v[p:]
        kd_p[j], kd_q[j] = uvec[:p], uvec[p:]

    def normalize(d):
        return {j: w / np.linalg.norm(w) for j, w in d.items()}

    k1pp = _complete_orthogonal(normalize(k1_p), p)
    k1qq = _complete_orthogonal(normalize(k1_q), q)
    k1 = np.zeros((n, n))
    k1[:p, :p] = k1pp
    k1[p:, p:] = k1qq

    # pool slots act by the identity exponent; recover their left images
    # from gp where resolvable, falling back to orthogonal completion
    kd_p, kd_q = normalize(kd_p), normalize(kd_q)
    for slot in list(range(nbig, q)) + list(range(q, p)):
        img = (gp @ np.concatenate([k1pp[:, slot], np.zeros(q)]))[:p]
        kd_p = _try_add_column(kd_p, slot, img)
    for slot in range(nbig, q):
        img = (gp @ np.concatenate([np.zeros(p), k1qq[:, slot]]))[p:]
        kd_q = _try_add_column(kd_q, slot, img)
    kdbl = np.zeros((n, n))
    kdbl[:p, :p] = _complete_orthogonal(kd_p, p)
    kdbl[p:, p:] = _complete_orthogonal(kd_q, q)
    return kdbl, lam, k1


def _try_add_column(known, slot, img):
    """Gram-Schmidt a candidate column against the known ones; drop it if
    it is numerically degenerate (it will be completed orthogonally)."""
    if not np.all(np.isfinite(img)):
        return known
    v = img.copy()
    for w in known.values():
        v -= w * (w @ v)
    nrm = np.linalg.norm(v)
    if 0.5 <= np.linalg.norm(img) <= 2.0 and nrm >= 1e-3:
        known = dict(known)
        known[slot] = v / nrm
    return known


def _block_polish(kdbl, p):
    """Project a near block-orthogonal matrix exactly onto O(p) x O(q)."""
    out = np.zeros_like(kdbl)
    for blk in (slice(0, p), slice(p, None)):
        uu, _, vvt = np.linalg.svd(kdbl[blk, blk])
        out[blk, blk] = uu @ vvt
    return out


# ---------------------------------------------------------------------------
# onC


def complex_pm_basis(n):
    """Unitary T with T^T G T = I for the canonical complex Witt gram
    (full antidiagonal); conjugation carries the complex orthogonal group
    to the standard one with maximal compact O(n, R)."""
    m = n // 2
    t = np.zeros((n, n), dtype=complex)
    r = 1.0 / np.sqrt(2.0)
    for i in range(m):
        t[i, i] = r
        t[n - 1 - i, i] = r                 # a_i
        t[i, n - m + i] = 1j * r
        t[n - 1 - i, n - m + i] = -1j * r   # b_i
    if n % 2:
        t[m, m] = 1.0
    return t


def kak_onC(g, form):
    """KAK of an element of the complex orthogonal group of the canonical
    complex Witt form (moderate scales; no deflation)."""
    g = np.asarray(g, dtype=complex)
    n = form.n
    if g.shape != (n, n):
        raise ValueError(f"g must be {n}x{n} complex")
    defect = np.linalg.norm(g.T @ form.gram @ g - form.gram, 2)
    if defect > FORM_PRESERVATION_TOL * max(1.0, np.linalg.norm(g, 2) ** 2):
        raise ValueError("matrix does not preserve the complex form")
    m = n // 2
    t = complex_pm_basis(n)
    gs = t.conj().T @ g @ t

    # polar part: S = 1/2 log(g* g) is i * (real skew)
    h = gs.conj().T @ gs
    h = 0.5 * (h + h.conj().T)
    vals, vecs = np.linalg.eigh(h)
    s = (vecs * (0.5 * np.log(vals))) @ vecs.conj().T
    bskew = np.imag(s)
    bskew = 0.5 * (bskew - bskew.T)

    # canonical form of the real skew matrix: eigh of i*B
    bvals, bvecs = np.linalg.eigh(1j * bskew)
    order = np.argsort(-bvals)
    lam, rot_cols = [], {}
    pair_positions = [(i, n - m + i) for i in range(m)]
    rank = 0
    for idx in order:
        if bvals[idx] <= 1e-12 or rank >= m:
            break
        z = bvecs[:, idx]
        x = np.sqrt(2.0) * np.real(z)
        y = np.sqrt(2.0) * np.imag(z)
        # orthonormalize against drift
        x /= np.linalg.norm(x)
        y -= x * (x @ y)
        y /= np.linalg.norm(y)
        a_pos, b_pos = pair_positions[rank]
        rot_cols[a_pos] = y
        rot_cols[b_pos] = x
        lam.append(float(bvals[idx]))
        rank += 1
    lam = np.array(lam + [0.0] * (m - rank))
    rot = _complete_orthogonal(rot_cols, n)

    # exp of the canonical element with exponents lam
    expa = np.eye(n, dtype=complex)
    for i in range(m):
        a_pos, b_pos = pair_positions[i]
        chl, shl = np.cosh(lam[i]), np.sinh(lam[i])
        expa[a_pos, a_pos] = expa[b_pos, b_pos] = chl
        expa[a_pos, b_pos] = 1j * shl
        expa[b_pos, a_pos] = -1j * shl

    kss = gs @ rot @ np.linalg.inv(expa)
    # K = U(n) cap O(n, C) = O(n, R): polish onto real orthogonal
    kre = np.real(kss)
    uu, _, vvt = np.linalg.svd(kre)
    kss = uu @ vvt

    k = t @ kss @ t.conj().T
    l = t @ rot.T @ t.conj().T
    return KakTriple(k, MuVector("onC", lam), l, form)


# ---------------------------------------------------------------------------
# dispatch, gaps, flags


def kak(g, group_tag, form=None):
    """Cartan decomposition dispatch; see the group tags in the module
    docstring."""
    if group_tag == "gl":
        return kak_gl(g)
    if group_tag == "opq":
        if form is None:
            raise ValueError("opq requires a WittForm")
        return kak_opq(g, form)
    if group_tag == "onC":
        if form is None or not form.is_complex:
            raise ValueError("onC requires a complex WittForm")
        return kak_onC(g, form)
    raise ValueError(f"unknown group tag {group_tag!r}")


def mu_gaps(mu, rs):
    """Pairings of mu with each simple root, as a 1-based dict."""
    v = mu.values
    if mu.group_tag == "gl":
        if rs.type_label != "A" or rs.rank != len(v) - 1:
            raise ValueError(
                f"gl mu of length {len(v)} needs root system A_{len(v) - 1}")
        return {i: float(v[i - 1] - v[i]) for i in range(1, len(v))}
    if rs.type_label not in ("B", "D") or rs.rank != len(v):
        raise ValueError(
            f"{mu.group_tag} mu of length {len(v)} needs type B or D of rank {len(v)}")
    return {i: rs.pair_eps(i, v) for i in range(1, rs.rank + 1)}


def _theta_to_plane_dim(theta, group_tag, form):
    """Numeric scope of the flag map: a singleton {alpha_i}; for p = q the
    (p-1)-plane case is indexed by {alpha_{p-1}, alpha_p}."""
    members = sorted(theta.members)
    if not members:
        raise ValueError("theta must be nonempty")
    if group_tag == "gl":
        if len(members) != 1:
            raise ValueError("gl flag maps support a single simple root")
        return members[0]
    q = form.q if group_tag == "opq" else form.n // 2
    p_eq_q = group_tag == "opq" and form.p == form.q
    if len(members) == 1:
        i = members[0]
        if p_eq_q and i >= q - 1:
            raise ValueError(
                "for p = q the (p-1)-plane flag is indexed by {alpha_{p-1}, alpha_p}")
        return i
    if p_eq_q and members == [q - 1, q]:
        return q - 1
    raise ValueError(f"unsupported theta {members} for this group")


def xi_theta(g, theta, form=None, tol=1e-6, group_tag=None, decomposition=None):
    """Flag map: the span of the leading columns of the compact left factor.

    Requires every gap <alpha, mu(g)> for alpha in theta to exceed tol;
    otherwise GapTooSmallError is raised, because the flag would depend on
    the tie-breaking inside the decomposition.
    """
    if group_tag is None:
        group_tag = "gl" if form is None else ("onC" if form.is_complex else "opq")
    i = _theta_to_plane_dim(theta, group_tag, form)
    dec = decomposition if decomposition is not None else kak(g, group_tag, form)
    gaps = mu_gaps(dec.mu, theta.root_system)
    for a in sorted(theta.members):
        if gaps[a] <= tol:
            raise GapTooSmallError(a, gaps[a], tol)
    if group_tag == "gl":
        return Frame.from_spanning(dec.k[:, :i])
    if group_tag == "opq":
        return FlagPoint(Frame.from_spanning(dec.k[:, :i]), form, i)
    cols = dec.k[:, :i]
    real_cols = np.concatenate(
        [np.concatenate([np.real(cols), np.imag(cols)], axis=0),
         np.concatenate([-np.imag(cols), np.real(cols)], axis=0)], axis=1)
    return FlagPoint(Frame.from_spanning(real_cols), form, 2 * i)


# ---------------------------------------------------------------------------
# exterior powers


def exterior_power(g, i):
    """Matrix of the i-th exterior power in the lexicographic induced
    basis; functorial in g."""
    g = np.asarray(g)
    n = g.shape[0]
    if not 1 <= i <= n - 1:
        raise ValueError(f"need 1 <= i <= {n - 1}")
    combos = list(itertools.combinations(range(n), i))
    out = np.empty((len(combos), len(combos)), dtype=g.dtype)
    for a, rows in enumerate(combos):
        for b, cols in enumerate(combos):
            out[a, b] = np.linalg.det(g[np.ix_(rows, cols)])
    return out
