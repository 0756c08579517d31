"""Command-line entry point: anoctl <command> [options].

Commands: cartan, divergence, limitset, domain, orbits, table1.
Configuration comes from an optional key = value file plus flag
overrides; a fixed seed makes every report byte-reproducible (SVG output
carries no timestamps).  Exit code is 0 iff no error records were
produced.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .cartan import GapTooSmallError, kak, mu_gaps, witt_pm_basis, xi_theta
from .domain import (
    NotInCompactificationError,
    dynamical_relation_scan,
    expansion_certificate,
    gaussian_domain_sampler,
    in_Xbar,
    in_bad_set,
    orbit_coverage,
)
from .forms import Frame, dump_json, make_witt_form, matrix_from_json
from .limits import (
    EmptyLimitSampleError,
    sample_limit_set,
    sample_to_csv,
    sample_to_svg,
    transversality_report,
)
from .presets import BUILTIN_GENERATORS
from .roots import ThetaSet, build_root_system, table1_rows, tau_admissible_sets
from .satake import orbit_decomposition, orbits_to_dot, orbits_to_json
from .words import CapExceededError, divergence_profile, enumerate_ball, \
    fit_divergence_slope

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    command: str = ""
    config: str = ""
    form: str = "2,1"
    gens: str = "builtin:schottky-o21"
    radius: int = 6
    cap: int = 100000
    tol: float = 1e-9
    seed: int = 0
    # the output directory is the one setting that may come from the
    # environment; everything else is file/flag only
    out: str = os.environ.get("ANOCTL_OUT", ".")
    samples: int = 200
    min_gap: float = 1.0
    xi_root: int = 1
    chart: str = "0,1"
    report: str = ""
    type: str = "A"
    rank: int = 2
    support: str = "adjoint"
    scan_points: int = 100
    expansion_flags: int = 8
    expansion_factor: float = 2.0

    def __post_init__(self):
        if self.tol <= 0 or self.min_gap <= 0:
            raise ValueError("tolerances must be positive")

    def parsed_form(self):
        parts = self.form.split(",")
        p, q = int(parts[0]), int(parts[1])
        complex_tag = len(parts) > 2 and parts[2].strip().upper() == "C"
        return make_witt_form(p, q, "complex" if complex_tag else "real")

    def rng(self):
        return np.random.default_rng(self.seed)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def load_config_file(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key] = value
    return out


def build_config(args):
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    for key, val in vars(args).items():
        if key in ("config",) or val is None:
            continue
        values[key] = val
    casts = {"int": int, "float": float, "str": str}
    kwargs = {}
    for key, val in values.items():
        if key not in _FIELD_TYPES:
            raise ValueError(f"unknown config key {key!r}")
        kwargs[key] = casts.get(_FIELD_TYPES[key], str)(val) \
            if isinstance(val, str) else val
    if args.config:
        kwargs["config"] = args.config
    return RunConfig(**kwargs)


def load_generators(config):
    """Generator list from a builtin name or a JSON file of named
    matrices; returns (form_or_None, [(name, matrix), ...])."""
    source = config.gens
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        if name not in BUILTIN_GENERATORS:
            raise ValueError(f"unknown builtin {name!r}; "
                             f"available: {sorted(BUILTIN_GENERATORS)}")
        return BUILTIN_GENERATORS[name]()
    with open(source) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data["generators"]
    gens = [(d["name"], matrix_from_json(d)) for d in data]
    return None, gens


def _named_matrices(config):
    form, gens = load_generators(config)
    if form is None and config.form:
        form = config.parsed_form()
    return form, gens


def _group_setup(form, n):
    """(group_tag, root system) for a form or a plain matrix size."""
    if form is None:
        return "gl", build_root_system("A", n - 1)
    if form.is_complex:
        m = form.n // 2
        return "onC", build_root_system("B" if form.n % 2 else "D", m)
    label = "B" if form.p > form.q else "D"
    return "opq", build_root_system(label, form.q)


# ---------------------------------------------------------------------------
# commands


def cmd_cartan(config):
    form, named = _named_matrices(config)
    group_tag, rs = _group_setup(form, named[0][1].shape[0])
    theta = ThetaSet(rs, frozenset({config.xi_root}))
    records, errors = [], []
    for name, mat in named:
        try:
            dec = kak(mat, group_tag, form)
        except ValueError as exc:
            errors.append({"name": name, "error": str(exc)})
            continue
        gaps = mu_gaps(dec.mu, rs)
        record = {
            "name": name,
            "mu": [float(x) for x in dec.mu.values],
            "gaps": {f"alpha_{k}": float(v) for k, v in sorted(gaps.items())},
        }
        try:
            flag = xi_theta(mat, theta, form, tol=config.tol,
                            group_tag=group_tag, decomposition=dec)
            frame = flag if isinstance(flag, Frame) else flag.frame
            record["flag_frame"] = frame.to_json()
        except GapTooSmallError as exc:
            record["flag_error"] = str(exc)
        records.append(record)
    report = {"schema_version": SCHEMA_VERSION, "records": records,
              "errors": errors}
    dump_json(report, os.path.join(config.out, "cartan.json"))
    print(f"cartan: {len(records)} records, {len(errors)} errors "
          f"-> {config.out}/cartan.json")
    return 1 if errors else 0


def _enumerate(config, gens):
    try:
        return enumerate_ball(gens, config.radius, cap=config.cap), False
    except CapExceededError as exc:
        return exc.ball, True


def cmd_ball(config):
    form, gens = _named_matrices(config)
    ball, truncated = _enumerate(config, gens)
    from .forms import matrix_to_json
    report = {
        "schema_version": SCHEMA_VERSION,
        "radius": ball.radius,
        "truncated": truncated,
        "dedup_tol": ball.dedup_tol,
        "elements": [{"word": w, "word_length": r, **matrix_to_json(m)}
                     for w, m, r in ball.elements],
    }
    path = os.path.join(config.out, "ball.json")
    dump_json(report, path)
    print(f"ball: {len(ball)} elements up to radius {ball.radius}"
          f"{' (truncated)' if truncated else ''} -> {path}")
    return 0


def cmd_divergence(config):
    form, gens = _named_matrices(config)
    group_tag, rs = _group_setup(form, gens[0][1].shape[0])
    ball, truncated = _enumerate(config, gens)
    profile = divergence_profile(ball, rs, group_tag, form)
    path = os.path.join(config.out, "divergence.csv")
    with open(path, "w") as fh:
        fh.write(profile.to_csv())
    slope, shape = fit_divergence_slope(profile, 1) \
        if len(profile.per_radius) >= 3 else (float("nan"), "n/a")
    print(f"divergence: ball of {len(ball)} elements"
          f"{' (truncated)' if truncated else ''}, "
          f"alpha_1 slope {slope:.3g} ({shape}) -> {path}")
    return 0


def cmd_limitset(config):
    form, gens = _named_matrices(config)
    group_tag, rs = _group_setup(form, gens[0][1].shape[0])
    theta = ThetaSet(rs, frozenset({config.xi_root}))
    ball, truncated = _enumerate(config, gens)
    sample = sample_limit_set(ball, theta, form, min_gap=config.min_gap,
                              group_tag=group_tag)
    csv_path = os.path.join(config.out, "limitset.csv")
    with open(csv_path, "w") as fh:
        fh.write(sample_to_csv(sample))
    chart = tuple(int(x) for x in config.chart.split(","))
    svg_path = os.path.join(config.out, "limitset.svg")
    with open(svg_path, "w") as fh:
        fh.write(sample_to_svg(sample, chart))
    print(f"limitset: {len(sample)} sampled flags"
          f"{' (truncated ball)' if truncated else ''} -> {csv_path}, {svg_path}")
    return 0


def _base_point(form):
    """The maximally negative q-plane fixed by the compact subgroup."""
    n, q = form.n, form.q
    c = witt_pm_basis(form.p, form.q)
    return in_Xbar(Frame(c[:, n - q:]), form)


def cmd_domain(config):
    form, gens = _named_matrices(config)
    if form is None:
        raise ValueError("domain check needs a form (use --form P,Q)")
    group_tag, rs = _group_setup(form, gens[0][1].shape[0])
    theta = ThetaSet(rs, frozenset({1}))
    ball, truncated = _enumerate(config, gens)
    rng = config.rng()

    try:
        sample = sample_limit_set(ball, theta, form, min_gap=config.min_gap,
                                  group_tag=group_tag)
    except EmptyLimitSampleError:
        sample = None

    interior = []
    attempts = 0
    while len(interior) < config.samples and attempts < 50 * config.samples:
        attempts += 1
        pt = gaussian_domain_sampler(form, rng, config.tol)
        if pt.is_interior:
            interior.append(pt)

    report = {"schema_version": SCHEMA_VERSION,
              "truncated_ball": truncated,
              "ball_size": len(ball),
              "interior_samples": len(interior),
              # signatures excluded by the properness/cocompactness
              # statements; runs are permitted but tagged
              "outside_theorem_hypotheses": (form.p, form.q) in ((1, 1), (2, 2))}

    if sample is None:
        report.update({"sample_size": 0, "bad_set_hits": 0,
                       "relation_flags": [], "expansion_certificates": []})
        flags = []
    else:
        hits = [i for i, pt in enumerate(interior)
                if in_bad_set(pt, sample, "intersect", config.tol)[0]]
        clean = [pt for i, pt in enumerate(interior) if i not in hits]
        flags = dynamical_relation_scan(clean[:config.scan_points], ball, sample)
        certs = []
        for p in sample.points[:config.expansion_flags]:
            ray = [p.source_word[:k] for k in range(1, len(p.source_word) + 1)]
            res = expansion_certificate(p.flag, ray, ball,
                                        config.expansion_factor,
                                        rng=np.random.default_rng(config.seed))
            certs.append({"flag_word": p.source_word, "success": res.success,
                          "word": res.word, "radius": res.neighborhood_radius,
                          "factor": res.factor})
        trans = transversality_report(sample, form) if len(sample) > 1 else None
        report.update({
            "sample_size": len(sample),
            "sample_covering_radius": sample.covering_radius(),
            "bad_set_hits": len(hits),
            "transversality_margin": trans.margin if trans else None,
            "relation_flags": [
                {"point": f.point_index, "word": f.word,
                 "min_gap": f.min_gap, "residual": f.residual}
                for f in flags],
            "expansion_certificates": certs,
        })

    core = [_base_point(form)]
    curve = orbit_coverage(core, ball,
                           lambda: gaussian_domain_sampler(form, rng, config.tol),
                           trials=min(config.samples, 100), sample=sample,
                           d_core=0.3)
    report["coverage_curve"] = [
        {"margin": m, "fraction": (None if np.isnan(f) else f), "count": c}
        for m, f, c in zip(curve.margins, curve.fractions, curve.counts)]

    path = config.report or os.path.join(config.out, "domain.json")
    dump_json(report, path)
    print(f"domain: {report.get('bad_set_hits', 0)} bad-set hits, "
          f"{len(report['relation_flags'])} relation flags -> {path}")
    return 0


def cmd_orbits(config):
    rs = build_root_system(config.type, config.rank)
    if config.support == "adjoint":
        if rs.table1 is None:
            raise ValueError(f"{config.type}_{config.rank} has no adjoint data")
        a = rs.table1.alpha_G_index
        support = ThetaSet(rs, frozenset({a, rs.opposition[a - 1]}))
    elif config.support == "all":
        support = ThetaSet(rs, frozenset(range(1, rs.rank + 1)))
    else:
        support = ThetaSet(rs, frozenset(int(x)
                                         for x in config.support.split(",")))
    orbits = orbit_decomposition(rs, support)
    d = orbits_to_json(orbits)
    d.update({"schema_version": SCHEMA_VERSION, "type": config.type,
              "rank": config.rank,
              "support": list(support.sorted_members)})
    json_path = os.path.join(config.out, "orbits.json")
    dump_json(d, json_path)
    dot_path = os.path.join(config.out, "orbits.dot")
    with open(dot_path, "w") as fh:
        fh.write(orbits_to_dot(rs, support, orbits))
    print(f"orbits: {len(orbits)} orbits of {config.type}_{config.rank} "
          f"with support {set(support.sorted_members)} -> {json_path}, {dot_path}")
    return 0


def cmd_table1(config):
    rows = []
    all_ok = True
    print(f"{'type':<6} {'alpha_G':<10} {'chi_G coefficients':<28} verified")
    for rs in table1_rows():
        t1 = rs.table1
        derived = rs.positive_pairing_set(t1.chi_G_coeffs)
        expected = {t1.alpha_G_index, rs.opposition[t1.alpha_G_index - 1]}
        ok = derived == expected
        all_ok &= ok
        label = f"{rs.type_label}_{rs.rank}" if rs.type_label in "ABCD" or \
            rs.type_label == "BC" else rs.type_label
        chi = "+".join(f"{c}a{i + 1}" for i, c in enumerate(t1.chi_G_coeffs))
        stars = sorted(expected)
        print(f"{label:<6} {','.join(f'alpha_{i}' for i in stars):<10} "
              f"{chi:<28} {'yes' if ok else 'NO'}")
        rows.append({"type": rs.type_label, "rank": rs.rank,
                     "alpha_G": sorted(expected),
                     "chi_G": list(t1.chi_G_coeffs),
                     "derived_positive_set": sorted(derived),
                     "verified": ok})
    dump_json({"schema_version": SCHEMA_VERSION, "rows": rows},
              os.path.join(config.out, "table1.json"))
    return 0 if all_ok else 1


COMMANDS = {
    "ball": cmd_ball,
    "cartan": cmd_cartan,
    "divergence": cmd_divergence,
    "limitset": cmd_limitset,
    "domain": cmd_domain,
    "orbits": cmd_orbits,
    "table1": cmd_table1,
}


def make_parser():
    parser = argparse.ArgumentParser(
        prog="anoctl",
        description="Cartan projections, limit sets, and boundary-orbit "
                    "combinatorics for matrix groups")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default="")
        p.add_argument("--form", default=None)
        p.add_argument("--gens", default=None)
        p.add_argument("--radius", type=int, default=None)
        p.add_argument("--cap", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--min-gap", dest="min_gap", type=float, default=None)
        p.add_argument("--xi-root", dest="xi_root", type=int, default=None)
        p.add_argument("--chart", default=None)
        p.add_argument("--report", default=None)
        p.add_argument("--type", default=None)
        p.add_argument("--rank", type=int, default=None)
        p.add_argument("--support", default=None)
        p.add_argument("--scan-points", dest="scan_points", type=int,
                       default=None)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        config = build_config(args)
        os.makedirs(config.out, exist_ok=True)
        return COMMANDS[config.command](config)
    except (ValueError, OSError, EmptyLimitSampleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def domain_check_main(argv=None):
    """`domain-check --form p,q --gens gens.json --radius R --samples N
    --report out.json`: alias for `anoctl domain`."""
    argv = sys.argv[1:] if argv is None else argv
    return main(["domain"] + list(argv))


if __name__ == "__main__":
    sys.exit(main())
