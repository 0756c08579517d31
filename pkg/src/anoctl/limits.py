"""Limit sets on flag varieties, sampled from word-length balls.

Samples are flags of ball elements whose relevant root gaps clear a
floor, merged at a flag-distance tolerance (keeping the shortlex-first
representative).  Boundary maps of free groups are evaluated on
reduced-word cylinders.  Everything reports finite-radius evidence:
divergence slopes, transversality margins, dynamics-preservation
residuals; no asymptotic verdict is ever produced.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .cartan import GapTooSmallError, kak, mu_gaps, xi_theta
from .forms import Frame, dist_grassmann, orthogonal_complement

MERGE_TOL = 1e-6
PAIR_FLOOR = 1e-3


class EmptyLimitSampleError(ValueError):
    """No ball element cleared the gap floor; the ball is too small."""


@dataclass(frozen=True)
class LimitPoint:
    flag: object                # FlagPoint or Frame
    source_word: str
    word_length: int
    gap_at_source: float

    @property
    def frame(self):
        return self.flag if isinstance(self.flag, Frame) else self.flag.frame


@dataclass(frozen=True)
class LimitSample:
    points: list
    theta: object
    form: object = None
    merge_tol: float = MERGE_TOL

    def frames(self):
        return [p.frame for p in self.points]

    def line_array(self):
        """Stacked unit row vectors; only for one-dimensional flags."""
        return np.stack([p.frame.columns[:, 0] for p in self.points])

    def covering_radius(self):
        """Max nearest-neighbor flag distance among the sample points."""
        frames = self.frames()
        if len(frames) < 2:
            return float("inf")
        worst = 0.0
        for i, f in enumerate(frames):
            nearest = min(dist_grassmann(f, g)
                          for j, g in enumerate(frames) if j != i)
            worst = max(worst, nearest)
        return worst

    def nearest_distance(self, frame):
        return min(dist_grassmann(frame, f) for f in self.frames())

    def __len__(self):
        return len(self.points)


def _flag_distance(a, b):
    return dist_grassmann(a, b)


def sample_limit_set(ball, theta, form=None, min_gap=1.0, merge_tol=MERGE_TOL,
                     group_tag=None):
    """Flags of every ball element whose theta-gaps exceed min_gap,
    merged at flag distance merge_tol (shortlex-first representative
    kept).  Raises EmptyLimitSampleError if nothing clears the floor."""
    if group_tag is None:
        group_tag = "gl" if form is None else ("onC" if form.is_complex else "opq")
    if min_gap <= 0:
        raise ValueError("min_gap must be positive")
    rs = theta.root_system
    points = []
    kept_lines = None       # fast dedup path for line flags
    for word, mat, r in ball.elements:
        if r == 0:
            continue
        dec = kak(mat, group_tag, form)
        gaps = mu_gaps(dec.mu, rs)
        gap = min(gaps[a] for a in theta.members)
        if gap <= min_gap:
            continue
        flag = xi_theta(mat, theta, form, tol=min_gap, group_tag=group_tag,
                        decomposition=dec)
        frame = flag if isinstance(flag, Frame) else flag.frame
        if frame.k == 1:
            v = frame.columns[:, 0]
            if kept_lines is not None and len(kept_lines):
                cos = np.abs(np.asarray(kept_lines) @ v)
                if np.max(cos) > np.sqrt(max(0.0, 1.0 - merge_tol ** 2)):
                    continue
            kept_lines = (kept_lines or []) + [v]
        else:
            if any(_flag_distance(frame, p.frame) < merge_tol for p in points):
                continue
        points.append(LimitPoint(flag, word, r, gap))
    if not points:
        raise EmptyLimitSampleError(
            f"no ball element has theta-gaps above {min_gap}; enlarge the ball")
    return LimitSample(points, theta, form, merge_tol)


def boundary_map_free_group(ball, theta, form=None, depth=1, tail_length=10,
                            min_gap=1.0, group_tag=None):
    """Cylinder evaluation of the boundary map of a free group.

    For each reduced word w of the given length, evaluates the flag of
    rho(w v) with the tail v a long power of w's last letter (so that
    w v stays reduced and heads to the periodic endpoint of the
    cylinder); the map w -> flag approximates the boundary map on the
    cylinder of w and is equivariant by construction.
    """
    words = [w for w, _, r in ball.elements if r == depth]
    if not words:
        raise ValueError(f"ball has no words of length {depth}")
    out = {}
    for w in words:
        mat = ball.matrix(w) @ np.linalg.matrix_power(
            ball.matrix(w[-1]), tail_length)
        out[w] = xi_theta(mat, theta, form, tol=min_gap, group_tag=group_tag)
    return out


# ---------------------------------------------------------------------------
# transversality


@dataclass(frozen=True)
class TransversalityReport:
    margin: float
    worst_pair: tuple
    pairs_tested: int
    pair_floor: float
    covering_radius: float


def transversality_margin(frame_a, frame_b, form):
    """Smallest singular value of [basis of span(a)-perp-b | basis of b]:
    positive iff the pair is transverse for the form."""
    perp = orthogonal_complement(form, frame_a)
    mat = np.hstack([perp.columns, frame_b.columns])
    return float(np.linalg.svd(mat, compute_uv=False)[-1])


def transversality_report(sample, form, pair_floor=PAIR_FLOOR):
    """Minimum transversality margin over sampled pairs at flag distance
    above the floor (nearly equal pairs are excluded: transversality is
    only required for distinct boundary points)."""
    if len(sample) < 2:
        raise ValueError("need at least two sample points")
    margin, worst, tested = np.inf, None, 0
    frames = sample.frames()
    perps = [orthogonal_complement(form, f) for f in frames]
    for i in range(len(frames)):
        for j in range(len(frames)):
            if i == j:
                continue
            if _flag_distance(frames[i], frames[j]) <= pair_floor:
                continue
            tested += 1
            mat = np.hstack([perps[i].columns, frames[j].columns])
            sv = float(np.linalg.svd(mat, compute_uv=False)[-1])
            if sv < margin:
                margin, worst = sv, (sample.points[i].source_word,
                                     sample.points[j].source_word)
    if tested == 0:
        raise ValueError("no pair clears the distance floor")
    return TransversalityReport(margin, worst, tested, pair_floor,
                                sample.covering_radius())


# ---------------------------------------------------------------------------
# dynamics preservation


@dataclass(frozen=True)
class DynamicsRecord:
    word: str
    distance_to_sample: float
    contraction_ratio: float | None


def dynamics_preserving_check(sample, proximals, ball, neighborhood=0.5):
    """For each proximal element: distance from its attracting flag to
    the sample, and the measured contraction of nearby sample points
    toward it (max ratio of after/before distances).  Matrices are
    resolved through the ball by word."""
    records = []
    for word, frame, _gap in proximals:
        dist = sample.nearest_distance(frame)
        mat = ball.matrix(word)
        ratios = []
        for p in sample.points:
            before = dist_grassmann(p.frame, frame)
            if not 1e-9 < before < neighborhood:
                continue
            moved = Frame.from_spanning(mat @ p.frame.columns)
            ratios.append(dist_grassmann(moved, frame) / before)
        ratio = max(ratios) if ratios else None
        records.append(DynamicsRecord(word, dist, ratio))
    return records


# ---------------------------------------------------------------------------
# export


def sample_to_csv(sample):
    out = io.StringIO()
    n = sample.points[0].frame.ambient_dim if sample.points else 0
    k = sample.points[0].frame.k if sample.points else 0
    coords = ",".join(f"f{i}_{j}" for j in range(k) for i in range(n))
    out.write(f"word,word_length,gap,{coords}\n")
    for p in sample.points:
        flat = ",".join(f"{x:.12g}" for x in p.frame.columns.T.reshape(-1))
        out.write(f"{p.source_word},{p.word_length},{p.gap_at_source:.12g},{flat}\n")
    return out.getvalue()


def sample_to_svg(sample, chart=(0, 1), size=600, radius=2.5):
    """Flat SVG scatter of line flags in the affine chart given by two
    coordinate indices of the sign-canonicalized unit vector."""
    i, j = chart
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
             f'height="{size}" viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    for p in sample.points:
        v = p.frame.columns[:, 0]
        idx = int(np.argmax(np.abs(v) > 1e-9))
        if v[idx] < 0:
            v = -v
        x = (v[i] + 1.0) / 2.0 * size
        y = (1.0 - (v[j] + 1.0) / 2.0) * size
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{radius}" '
                     'fill="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
