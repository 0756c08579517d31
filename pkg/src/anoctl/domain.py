"""The quadric compactification of the symmetric space of an orthogonal
group, realized as nonpositive q-planes in the Grassmannian: membership
and stratification, bad sets against a sampled limit set, dynamical
properness and coverage evidence, expansion certificates, and the
subalgebra compactification points r_theta inside the Lie algebra
Grassmannian.

All verdicts here are desk-scale evidence against finite samples: the
bad-set test is one-sided (false negatives shrink as the limit sample
grows, and every report carries the sample's covering radius), and the
properness scan reports flags, never a boolean theorem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebras import get_algebra
from .forms import (
    Frame,
    contains,
    dist_grassmann,
    intersects,
    principal_sines,
    restrict_kernel,
)

MEMBERSHIP_TOL = 1e-9
BAD_SET_TOL = 1e-6
ACCUMULATION_TOL = 1e-3


class NotInCompactificationError(ValueError):
    def __init__(self, msg, violation):
        super().__init__(msg)
        self.violation = violation


@dataclass(frozen=True)
class CompactPoint:
    """A nonpositive q-plane; stratum = kernel dimension of the
    restricted form (0 on the interior)."""
    frame: Frame
    stratum: int
    form: object

    @property
    def is_interior(self):
        return self.stratum == 0


def in_Xbar(w, form, tol=MEMBERSHIP_TOL):
    """Membership of a q-plane in the compactification: the restricted
    form must be nonpositive; rejections carry the violating eigenvalue."""
    if w.k != form.q:
        raise ValueError(f"frame must have q = {form.q} columns")
    restricted, kernel = restrict_kernel(form, w, tol)
    top = float(np.max(np.linalg.eigvalsh(restricted))) if w.k else 0.0
    scale = np.linalg.norm(form.gram, 2)
    if top > tol * scale:
        raise NotInCompactificationError(
            f"restriction has positive eigenvalue {top:.3e}", top)
    return CompactPoint(w, kernel.k, form)


def complex_in_Xbar(w, bC, tol=MEMBERSHIP_TOL):
    """Membership in the complex-form compactification, on the doubled
    real space: the imaginary part must vanish on the span, the real
    part must be nonpositive, and the kernel must be stable under the
    complex structure."""
    if not bC.is_complex:
        raise ValueError("complex_in_Xbar needs a complex form")
    n = bC.n
    if w.ambient_dim != 2 * n or w.k != n:
        raise ValueError(f"frame must have {n} columns in R^{2 * n}")
    scale = np.linalg.norm(bC.gram, 2)
    im_restricted = w.columns.T @ bC.im_gram() @ w.columns
    im_norm = float(np.linalg.norm(im_restricted, 2))
    if im_norm > tol * scale:
        raise NotInCompactificationError(
            f"imaginary part does not vanish on the span ({im_norm:.3e})", im_norm)
    in_Xbar(w, _real_part_view(bC), tol)      # nonpositivity of the real part
    kernel = restrict_kernel(_real_part_view(bC), w, tol)[1]
    if kernel.k:
        rotated = Frame.from_spanning(bC.j_matrix() @ kernel.columns)
        if not (rotated.k == kernel.k and dist_grassmann(rotated, kernel) < 1e3 * tol):
            raise NotInCompactificationError(
                "kernel is not stable under the complex structure", kernel.k)
        if kernel.k % 2:
            raise NotInCompactificationError(
                "kernel has odd real dimension", kernel.k)
    return CompactPoint(w, kernel.k, bC)


_REAL_VIEWS = {}


def _real_part_view(bC):
    """WittForm-like wrapper exposing Re(bC) on the doubled real space."""
    key = id(bC)
    if key not in _REAL_VIEWS:
        class _View:
            is_complex = False
            gram = bC.re_gram()
            q = bC.n
        _REAL_VIEWS[key] = (_View(), bC)      # keep bC alive with its view
    return _REAL_VIEWS[key][0]


# ---------------------------------------------------------------------------
# bad sets


def in_bad_set(point, sample, variant="intersect", tol=BAD_SET_TOL):
    """Scan the sampled limit flags for one meeting (variant
    "intersect") or contained in (variant "contain") the plane; returns
    (bool, witness word or None), taking the first witness in sample
    order.  For one-dimensional flags inside nonpositive planes the two
    variants agree."""
    if variant not in ("intersect", "contain"):
        raise ValueError("variant must be 'intersect' or 'contain'")
    w = point.frame
    for p in sample.points:
        flag = p.frame
        hit = intersects(flag, w, tol) if variant == "intersect" \
            else contains(flag, w, tol)
        if hit:
            return True, p.source_word
    return False, None


def bad_set_distance(frame, sample):
    """Distance proxy to the bad set: the minimum over sampled flags of
    the smallest principal-angle sine against the plane (for lines this
    is exactly the incidence-set distance)."""
    cols = frame.columns
    best = np.inf
    lines = None
    if sample.points and sample.points[0].frame.k == 1:
        lines = sample.line_array()
    if lines is not None and frame.k == 1:
        cos = np.abs(lines @ cols[:, 0])
        return float(np.min(np.sqrt(np.clip(1 - cos**2, 0.0, 1.0))))
    for p in sample.points:
        best = min(best, float(principal_sines(p.frame, frame)[0]))
    return best


# ---------------------------------------------------------------------------
# dynamical relation scan


@dataclass(frozen=True)
class RelationFlag:
    point_index: int
    word: str
    word_length: int
    min_gap: float           # smallest relevant root gap of the element
    residual: float          # distance of the image to the sampled bad set


def dynamical_relation_scan(points, ball, sample, tol=ACCUMULATION_TOL,
                            min_word_length=None, max_elements=None):
    """Push every point with every long ball element and flag pairs whose
    image stays outside the sampled bad set at the accumulation
    tolerance.

    Zero flags is properness evidence: long words of a divergent group
    must accumulate on the bad set.  A flag with a small recorded gap
    exposes an infinite bounded-projection family (non-divergence); a
    flag with a large gap contradicts the accumulation statement itself.
    Points must be members of the compactification outside the bad set.
    """
    if not points:
        return []
    if min_word_length is None:
        min_word_length = max(ball.radius, 1)
    for idx, pt in enumerate(points):
        hit, witness = in_bad_set(pt, sample, "intersect", tol)
        if hit:
            raise ValueError(f"scan point {idx} is already in the bad set "
                             f"(witness {witness!r})")
    elements = [(w, m, r) for w, m, r in ball.elements if r >= min_word_length]
    if max_elements is not None and len(elements) > max_elements:
        stride = len(elements) / max_elements
        elements = [elements[int(i * stride)] for i in range(max_elements)]

    flags = []
    q = points[0].frame.k if points else 1
    lines = None
    if q == 1 and sample.points and sample.points[0].frame.k == 1:
        lines = sample.line_array()
        pts = np.stack([pt.frame.columns[:, 0] for pt in points], axis=1)
    from .cartan import kak, mu_gaps
    for word, mat, r in elements:
        dec = kak(mat, "opq", sample.form) if sample.form is not None \
            else kak(mat, "gl")
        gaps = mu_gaps(dec.mu, sample.theta.root_system)
        gap = min(gaps[a] for a in sample.theta.members)
        if lines is not None:
            moved = mat @ pts
            moved /= np.linalg.norm(moved, axis=0, keepdims=True)
            cos = np.abs(lines @ moved)
            residuals = np.sqrt(np.clip(1 - np.max(cos, axis=0) ** 2, 0.0, 1.0))
            for idx in np.nonzero(residuals > tol)[0]:
                flags.append(RelationFlag(int(idx), word, r, gap,
                                          float(residuals[idx])))
        else:
            for idx, pt in enumerate(points):
                moved = Frame.from_spanning(mat @ pt.frame.columns)
                resid = bad_set_distance(moved, sample)
                if resid > tol:
                    flags.append(RelationFlag(idx, word, r, gap, resid))
    return flags


# ---------------------------------------------------------------------------
# expansion certificates


@dataclass(frozen=True)
class ExpansionResult:
    success: bool
    word: str | None
    neighborhood_radius: float
    factor: float            # certified factor, or best found on failure
    pairs_tested: int


def _perturbed_line(rng, line, max_angle, ambient):
    v = line.columns[:, 0]
    u = rng.standard_normal(ambient)
    u -= v * (v @ u)
    u /= np.linalg.norm(u)
    phi = rng.uniform(0.2, 1.0) * max_angle
    return Frame.from_spanning(np.cos(phi) * v + np.sin(phi) * u)


DEFAULT_EXPANSION_RADII = (0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4,
                           3e-5, 1e-5)


def expansion_certificate(flag, ray, ball, c, q=1, grid=8, rng=None,
                          radii=DEFAULT_EXPANSION_RADII):
    """Search the inverses of a quasigeodesic ray for an element
    expanding incidence distances by the factor c on a measured
    neighborhood of the incidence set of the flag.

    ``q`` is the plane dimension of the Grassmannian being certified.
    The grid samples pairs (W, L): planes W at incidence distance below
    the radius from the flag and lines L within the radius; by the
    distance identity both lie in the r-neighborhood of the incidence
    set.  Returns the first certified (word, radius, factor) or a failure
    record with the best factor found.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    rng = rng or np.random.default_rng(0)
    frame = flag if isinstance(flag, Frame) else flag.frame
    n = frame.ambient_dim
    candidates = [("", np.eye(n))]
    from .words import word_inverse
    for w in ray:
        iw = word_inverse(w)
        candidates.append((iw, ball.matrix(iw)))

    best = (-np.inf, None, None)
    tested = 0
    for word, mat in candidates:
        for radius in radii:
            factors = []
            for _ in range(grid):
                # W: a q-plane through a line near the flag
                near = _perturbed_line(rng, frame, 0.9 * radius, n)
                extra = rng.standard_normal((n, q - 1)) if q > 1 else \
                    np.zeros((n, 0))
                wplane = Frame.from_spanning(np.hstack([near.columns, extra]))
                if wplane.k != q:
                    continue
                lline = _perturbed_line(rng, frame, 0.9 * radius, n)
                before = float(principal_sines(lline, wplane)[0])
                if before < 1e-12:
                    continue
                moved_w = Frame.from_spanning(mat @ wplane.columns)
                moved_l = Frame.from_spanning(mat @ lline.columns)
                after = float(principal_sines(moved_l, moved_w)[0])
                factors.append(after / before)
                tested += 1
            if not factors:
                continue
            factor = min(factors)
            if factor >= c:
                return ExpansionResult(True, word, radius, factor, tested)
            if factor > best[0]:
                best = (factor, word, radius)
    return ExpansionResult(False, best[1], best[2] or radii[-1],
                           best[0] if best[0] > -np.inf else 0.0, tested)


# ---------------------------------------------------------------------------
# coverage


@dataclass(frozen=True)
class CoverageCurve:
    margins: tuple
    fractions: tuple
    counts: tuple

    def fraction_at(self, margin):
        for m, f in zip(self.margins, self.fractions):
            if m == margin:
                return f
        raise KeyError(margin)


def gaussian_domain_sampler(form, rng, tol=MEMBERSHIP_TOL, max_tries=5000):
    """Uniform-frame sampler rejected onto the compactification: frames
    from orthonormalized Gaussian matrices, accepted when nonpositive."""
    n, q = form.n, form.q
    for _ in range(max_tries):
        w = Frame.from_spanning(rng.standard_normal((n, q)))
        try:
            return in_Xbar(w, form, tol)
        except NotInCompactificationError:
            continue
    raise RuntimeError("rejection sampling failed")


def orbit_coverage(core, ball, domain_sampler, trials, sample=None,
                   d_core=0.1, margins=(0.3, 0.1, 0.03, 0.01)):
    """Fraction of sampled domain points moved within d_core of the core
    by some ball element, reported as a curve over bad-set margins.

    With a limit sample, points are bucketed by their bad-set distance
    and the fraction is computed among points at margin at least m; the
    curve is reported, not judged.
    """
    core_frames = [p.frame if isinstance(p, CompactPoint) else p for p in core]
    residuals, covered = [], []
    mats = [m for _, m, r in ball.elements]
    for _ in range(trials):
        pt = domain_sampler()
        frame = pt.frame if isinstance(pt, CompactPoint) else pt
        resid = bad_set_distance(frame, sample) if sample is not None else np.inf
        hit = False
        for m in mats:
            moved = Frame.from_spanning(m @ frame.columns)
            if any(dist_grassmann(moved, cf) <= d_core for cf in core_frames):
                hit = True
                break
        residuals.append(resid)
        covered.append(hit)
    residuals = np.array(residuals)
    covered = np.array(covered)
    fractions, counts = [], []
    for m in margins:
        keep = residuals >= m
        counts.append(int(np.sum(keep)))
        fractions.append(float(np.mean(covered[keep])) if np.any(keep) else float("nan"))
    return CoverageCurve(tuple(margins), tuple(fractions), tuple(counts))


# ---------------------------------------------------------------------------
# subalgebra compactification


@dataclass(frozen=True)
class SubalgebraPoint:
    """A boundary point of the subalgebra compactification: the span of
    k_theta + u_theta in Lie-algebra coordinates."""
    algebra_tag: str
    theta: object
    basis: Frame               # dim_k columns in R^{dim g}


def subalgebra_point(algebra_tag, theta, tol=1e-9):
    """The subalgebra r_theta = k_theta + u_theta for a subset of the
    simple restricted roots (theta empty gives the maximal compact)."""
    alg = get_algebra(algebra_tag)
    rs = alg.root_system
    if theta.root_system.type_label != rs.type_label or \
            theta.root_system.rank != rs.rank:
        raise ValueError(
            f"theta belongs to {theta.root_system!r}, algebra has {rs!r}")
    members = set(theta.members)

    u_cols, levi_cols = [], [alg.zero_space()]
    for eps, coeffs in alg.positive_root_list():
        support = {i + 1 for i, c in enumerate(coeffs) if c != 0}
        space = alg.root_space(eps)
        if support & members:
            u_cols.append(space)
        else:
            neg = alg.root_space([-c for c in eps])
            levi_cols.extend([space, neg])
    u_basis = np.hstack(u_cols) if u_cols else np.zeros((alg.dim, 0))
    levi = Frame.from_spanning(np.hstack(levi_cols))
    kc = Frame(alg.compact_subalgebra) if alg.compact_subalgebra.shape[1] else \
        Frame(np.zeros((alg.dim, 0)))
    k_theta = _intersect(levi, kc, tol)
    cols = np.hstack([k_theta.columns, u_basis])
    basis = Frame.from_spanning(cols) if cols.shape[1] else \
        Frame(np.zeros((alg.dim, 0)))

    _check_subalgebra(alg, basis, tol)
    kappa = basis.columns.T @ alg.killing_gram @ basis.columns
    if basis.k and np.max(np.linalg.eigvalsh(0.5 * (kappa + kappa.T))) > \
            1e-6 * np.linalg.norm(alg.killing_gram, 2):
        raise ValueError("killing form is not nonpositive on r_theta")
    return SubalgebraPoint(algebra_tag, theta, basis)


def _intersect(a, b, tol):
    if a.k == 0 or b.k == 0:
        return Frame(np.zeros((a.ambient_dim, 0)))
    stacked = np.hstack([a.columns, -b.columns])
    _, s, vt = np.linalg.svd(stacked)
    rank = int(np.sum(s > tol * s[0]))
    null = vt[rank:].T
    if null.shape[1] == 0:
        return Frame(np.zeros((a.ambient_dim, 0)))
    return Frame.from_spanning(a.columns @ null[:a.k])


def _check_subalgebra(alg, basis, tol):
    cols = basis.columns
    for i in range(cols.shape[1]):
        for j in range(i + 1, cols.shape[1]):
            br = alg.bracket_coords(cols[:, i], cols[:, j])
            resid = br - cols @ (cols.T @ br)
            if np.linalg.norm(resid) > 1e-7 * max(1.0, np.linalg.norm(br)):
                raise ValueError("span is not closed under the bracket")


def subalgebra_kernel_dimension(point, tol=1e-8):
    """Null count of the Killing form restricted to the subalgebra span,
    relative to the scale of the ambient Killing gram (the restriction
    can be numerically zero)."""
    alg = get_algebra(point.algebra_tag)
    kappa = point.basis.columns.T @ alg.killing_gram @ point.basis.columns
    vals = np.linalg.eigvalsh(0.5 * (kappa + kappa.T))
    cut = tol * np.linalg.norm(alg.killing_gram, 2)
    return int(np.sum(np.abs(vals) <= cut))


def nilpotent_incidence_check(w, l, kappa, tol=1e-8):
    """For a nilpotently spanned subspace l of the Lie algebra: meeting
    the subalgebra-compactification point w forces containment in it.
    Returns the truth of that implication on the given pair."""
    alg = get_algebra(kappa.algebra_tag)
    w_frame = w.basis if isinstance(w, SubalgebraPoint) else w
    for i in range(l.k):
        if not alg.is_nilpotent_element(l.columns[:, i], tol):
            raise ValueError(f"column {i} of l is not ad-nilpotent")
    if l.k == 0:
        return True
    if not intersects(l, w_frame, tol):
        return True
    return contains(l, w_frame, tol)
