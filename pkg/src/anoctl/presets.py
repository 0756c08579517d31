"""Bundled example configurations used by the CLI, the demos, and the
acceptance suite."""

from __future__ import annotations

import numpy as np

from .cartan import MuVector, chamber_exp, witt_pm_basis
from .forms import make_witt_form


def o21_boost(translation):
    """Chamber element of O(2,1) translating by the given amount along
    the axis through the first/last Witt coordinates."""
    form = make_witt_form(2, 1)
    return chamber_exp(MuVector("opq", np.array([float(translation)])), form)


def o21_rotation(angle):
    """Compact element of O(2,1): rotation of the positive-definite plane."""
    c = witt_pm_basis(2, 1)
    s, co = np.sin(angle), np.cos(angle)
    blk = np.array([[co, -s, 0.0], [s, co, 0.0], [0.0, 0.0, 1.0]])
    return c @ blk @ c.T


def schottky_o21(translation=9.0, angle=1.2):
    """Ping-pong pair in O(2,1): two boosts with transversal axes.

    The default translation keeps the depth-2 limit points closer than
    the transversality pair floor, so that the reported margins come from
    genuinely separated pairs.  The default angle is deliberately not
    pi/2: the dihedral symmetry of perpendicular axes makes many distinct
    word pairs (such as the two orderings of a^3 b^4) numerically
    indistinguishable, thinning the ball more than necessary.  At this
    translation some long distinct words still agree to within any
    usable matrix tolerance and deduplicate away; their words are simply
    absent from the ball and every retained element is genuine.
    """
    form = make_witt_form(2, 1)
    a = o21_boost(translation)
    r = o21_rotation(angle)
    b = r @ a @ np.linalg.inv(r)
    return form, [("a", a), ("b", b)]


def mixed_o21(translation=2.0, angle=1.0):
    """Non-discrete negative control: a boost plus an infinite-order
    rotation (angle irrational w.r.t. pi)."""
    form = make_witt_form(2, 1)
    return form, [("a", o21_boost(translation)), ("b", o21_rotation(angle))]


BUILTIN_GENERATORS = {
    "schottky-o21": schottky_o21,
    "mixed-o21": mixed_o21,
}
