"""Command-line harness for the Judy Benjamin benchmark.

Subcommands: update (apply one rule to one prior), jb-sweep (CSV table of
the rules across report values q), jb-mc (Monte Carlo validation report),
jb-contrast (the q=1 disagreement between the rules).

Exit codes: 0 success, 2 parse or validation error, 3 infeasible update
(including conditioning on a zero-probability event), 4 solver failed to
converge, 5 no Monte Carlo samples accepted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

from . import judy
from .ce import ConstraintSet, ce_update
from .core import (
    Event,
    FiniteDistribution,
    Partition,
    condition,
    jeffrey_update,
)
from .errors import (
    BadPartition,
    Infeasible,
    InfeasibleWeight,
    NoAcceptedSamples,
    NotConverged,
    ZeroConditioningEvent,
)
from .hier import (
    DEFAULT_EPSILON,
    QUADRANTS,
    McConfig,
    MessageBand,
    SecondOrderPrior,
    cdf_blue,
    cdf_cond_red,
    exact_posterior_quadrants,
    expected_blue_given_message,
    independence_deviation,
    ks_statistic,
    mc_band_report,
    sample_prior_array,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_NOT_CONVERGED = 4
EXIT_NO_ACCEPTED = 5

SWEEP_HEADER = "q,ce_blue,hier_blue,base_cond_blue,ce_r1,ce_r2,hier_r1,hier_r2"


@dataclass
class SweepRow:
    q: float
    ce_blue: float
    hier_blue: float
    base_cond_blue: float | None  # defined only when the report is a base event
    ce_r1: float
    ce_r2: float
    hier_r1: float
    hier_r2: float

    def csv_cells(self) -> list[str]:
        vals = (self.q, self.ce_blue, self.hier_blue, self.base_cond_blue,
                self.ce_r1, self.ce_r2, self.hier_r1, self.hier_r2)
        return ["" if v is None else repr(v) for v in vals]


def _read_json_file(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _atomic_write(path: str, text: str) -> None:
    """Write whole-file or not at all; no partial files on error paths."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".probkin-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# --- update ---


def cmd_update(args) -> int:
    prior = FiniteDistribution.from_json_obj(_read_json_file(args.prior))
    spec = _read_json_file(args.constraints)
    diagnostics: dict = {}
    if args.rule == "condition":
        posterior = condition(prior, Event(spec["event"]))
    elif args.rule == "jeffrey":
        posterior = jeffrey_update(prior, Partition(spec["partition"]), spec["weights"])
    else:  # ce
        solution = ce_update(prior, ConstraintSet.from_json_obj(spec))
        posterior = solution.posterior
        diagnostics = {
            "kl_value": solution.kl_value,
            "iterations": solution.iterations,
            "residual": solution.residual,
            "converged": solution.converged,
            "multipliers": list(solution.multipliers),
        }
    if args.json:
        print(json.dumps({"posterior": posterior.to_json_obj(), **diagnostics}))
    else:
        print(posterior.to_json())
        for key in ("kl_value", "iterations"):
            if key in diagnostics:
                print(f"{key}: {diagnostics[key]}")
    return EXIT_OK


# --- jb-sweep ---


def parse_grid(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be START:STEP:END, got {spec!r}")
    try:
        start, step, end = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"grid values must be numbers, got {spec!r}") from None
    if step <= 0.0:
        raise ValueError("grid step must be positive")
    if end < start:
        raise ValueError("grid end lies before its start")
    count = (end - start) / step
    n = round(count)
    if abs(count - n) > 1e-9:
        raise ValueError(f"grid step {step} does not divide [{start}, {end}] evenly")
    qs = [start + i * step for i in range(n + 1)]
    # snap accumulated float drift onto the exact endpoints
    qs = [0.0 if abs(q) < 1e-12 else (1.0 if abs(q - 1.0) < 1e-12 else q) for q in qs]
    if qs[0] < 0.0 or qs[-1] > 1.0:
        raise ValueError("grid must lie within [0, 1]")
    return qs


def _sweep_row(q: float, eps: float) -> SweepRow:
    solution = ce_update(judy.PRIOR, judy.red_report(q))
    ce_post = solution.posterior
    hier = exact_posterior_quadrants(MessageBand(q, eps))
    if q == 1.0:
        base = judy.blue_of(condition(judy.PRIOR, judy.NOT_R2))
    elif q == 0.0:
        base = judy.blue_of(condition(judy.PRIOR, judy.R1.complement(judy.SPACE)))
    else:
        base = None  # the report is not a base-space event away from the endpoints
    return SweepRow(
        q=q,
        ce_blue=judy.blue_of(ce_post),
        hier_blue=judy.blue_of(hier),
        base_cond_blue=base,
        ce_r1=ce_post.prob("R1"),
        ce_r2=ce_post.prob("R2"),
        hier_r1=hier.prob("R1"),
        hier_r2=hier.prob("R2"),
    )


def render_sweep_csv(rows: list[SweepRow]) -> str:
    lines = [SWEEP_HEADER]
    lines += [",".join(row.csv_cells()) for row in rows]
    return "\n".join(lines) + "\n"


def render_sweep_svg(rows: list[SweepRow]) -> str:
    """Minimal line chart of ce_blue and hier_blue against q.

    Fixed axes [0,1] x [0.4,0.7]: the phenomenon lives entirely in that
    band (conditioning at 2/3, the rest between 1/2 and 2/3).
    """
    width, height = 640, 440
    left, right, top, bottom = 70, 20, 20, 50
    x_lo, x_hi = 0.0, 1.0
    y_lo, y_hi = 0.4, 0.7

    def px(q: float) -> float:
        return left + (q - x_lo) / (x_hi - x_lo) * (width - left - right)

    def py(v: float) -> float:
        v = min(max(v, y_lo), y_hi)
        return top + (y_hi - v) / (y_hi - y_lo) * (height - top - bottom)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    # axes
    parts.append(
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" '
        f'y2="{height - bottom}" stroke="black"/>'
    )
    parts.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>')
    for i in range(5):
        q = i * 0.25
        parts.append(
            f'<text x="{px(q):.1f}" y="{height - bottom + 20}" font-size="12" '
            f'text-anchor="middle">{q:g}</text>'
        )
        parts.append(
            f'<line x1="{px(q):.1f}" y1="{height - bottom}" x2="{px(q):.1f}" '
            f'y2="{height - bottom + 5}" stroke="black"/>'
        )
    v = y_lo
    while v <= y_hi + 1e-9:
        parts.append(
            f'<text x="{left - 8}" y="{py(v):.1f}" font-size="12" '
            f'text-anchor="end" dominant-baseline="middle">{v:.2f}</text>'
        )
        parts.append(f'<line x1="{left - 5}" y1="{py(v):.1f}" x2="{left}" y2="{py(v):.1f}" stroke="black"/>')
        v += 0.05
    for series, color, label, offset in (
        ("ce_blue", "#c0392b", "minimum cross-entropy", 0),
        ("hier_blue", "#2980b9", "second-order band + trust", 18),
    ):
        pts = " ".join(f"{px(r.q):.2f},{py(getattr(r, series)):.2f}" for r in rows)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        parts.append(
            f'<rect x="{width - 250}" y="{top + 10 + offset}" width="14" height="4" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{width - 230}" y="{top + 16 + offset}" font-size="12">{label}</text>'
        )
    parts.append(
        f'<text x="{(left + width - right) / 2:.0f}" y="{height - 10}" font-size="13" '
        f'text-anchor="middle">reported q = Pr(R1 | R)</text>'
    )
    parts.append(
        f'<text x="18" y="{(top + height - bottom) / 2:.0f}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 18 {(top + height - bottom) / 2:.0f})">'
        "posterior Blue probability</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_jb_sweep(args) -> int:
    qs = parse_grid(args.grid)
    if args.eps <= 0.0:
        raise ValueError("eps must be positive")
    rows = [_sweep_row(q, args.eps) for q in qs]
    _atomic_write(args.out, render_sweep_csv(rows))
    if args.plot:
        _atomic_write(args.plot, render_sweep_svg(rows))
    return EXIT_OK


# --- jb-mc ---


def parse_prior_spec(spec: str) -> SecondOrderPrior:
    """Inline spec (uniform | conditional | dirichlet:a1,a2,a3,a4) or a
    path to a prior JSON file."""
    if os.path.exists(spec):
        return SecondOrderPrior.from_json_obj(_read_json_file(spec))
    name, _, rest = spec.partition(":")
    if name == "uniform" and not rest:
        return SecondOrderPrior.uniform()
    if name == "conditional" and not rest:
        return SecondOrderPrior.conditional()
    if name == "dirichlet" and rest:
        return SecondOrderPrior.dirichlet(*(float(v) for v in rest.split(",")))
    raise ValueError(
        f"cannot parse prior spec {spec!r}: use uniform, conditional, "
        "dirichlet:a1,a2,a3,a4, or a JSON file path"
    )


def _uniform_equivalent(prior: SecondOrderPrior) -> bool:
    if prior.variant == "uniform":
        return True
    return prior.variant == "dirichlet" and all(v == 1.0 for v in prior.alpha)


def cmd_jb_mc(args) -> int:
    prior = parse_prior_spec(args.prior)
    band = MessageBand(args.q, args.eps)
    cfg = McConfig(args.samples, args.seed, args.chunks)
    report = mc_band_report(prior, band, cfg)
    out = {
        "prior": prior.to_json_obj(),
        "band": {"q": band.q, "epsilon": band.epsilon, "lo": band.lo, "hi": band.hi},
        "config": {"samples": cfg.samples, "seed": cfg.seed, "chunks": cfg.chunks},
        "estimates": {name: est.to_json_obj() for name, est in report.items()},
    }
    if _uniform_equivalent(prior):
        exact = exact_posterior_quadrants(band)
        targets = {name: exact.prob(name) for name in QUADRANTS}
        targets["BLUE"] = expected_blue_given_message(band)
        z_scores = {}
        for name, target in targets.items():
            est = report[name]
            z_scores[name] = (
                abs(est.mean - target) / est.stderr if est.stderr > 0.0 else None
            )
        out["exact"] = targets
        out["z_scores"] = z_scores
    abc = sample_prior_array(prior, cfg)
    t = abc[:, 0] + abc[:, 1]
    keep = t > 0.0
    cr = abc[keep, 0] / t[keep]
    bl = 1.0 - t[keep]
    # KS statistics are measured against the uniform-prior laws; for other
    # priors they quantify the departure from those laws
    out["ks"] = {
        "cond_red": ks_statistic(cr, cdf_cond_red),
        "blue": ks_statistic(bl, cdf_blue),
    }
    out["independence_deviation"] = independence_deviation(cr, bl, grid=20)
    text = json.dumps(out, indent=2)
    if args.out:
        _atomic_write(args.out, text + "\n")
    else:
        print(text)
    return EXIT_OK


# --- jb-contrast ---


def cmd_jb_contrast(args) -> int:
    eps = args.eps
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be inside (0, 1), got {eps}")
    base_post = condition(judy.PRIOR, judy.NOT_R2)
    hier_post = exact_posterior_quadrants(MessageBand(1.0, eps))
    ce_post = ce_update(judy.PRIOR, judy.red_report(1.0)).posterior
    rows = [
        (
            "condition on not-R2",
            base_post,
            "reading the q=1 report as the base event 'not R2' lifts Blue to 2/3",
        ),
        (
            "second-order band q=1",
            hier_post,
            "trusting the banded report keeps Blue at 1/2 for every band width: "
            "2/3 vs 1/2 is the disagreement",
        ),
        (
            "cross-entropy target 1",
            ce_post,
            "the CE update agrees with conditioning at the endpoint: Blue 2/3",
        ),
    ]
    if args.json:
        obj = {
            "epsilon": eps,
            "rows": [
                {
                    "rule": rule,
                    "posterior": post.to_json_obj(),
                    "blue": judy.blue_of(post),
                    "note": note,
                }
                for rule, post, note in rows
            ],
        }
        print(json.dumps(obj, indent=2))
        return EXIT_OK
    header = f"{'rule':<26}{'R1':>10}{'R2':>10}{'B1':>10}{'B2':>10}{'Blue':>10}"
    print(f"report q=1 read three ways (band epsilon = {eps:g})")
    print(header)
    print("-" * len(header))
    for rule, post, note in rows:
        cells = "".join(f"{post.prob(name):>10.6f}" for name in QUADRANTS)
        print(f"{rule:<26}{cells}{judy.blue_of(post):>10.6f}")
        print(f"{'':<26}note: {note}")
    return EXIT_OK


# --- entry point ---


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="probkin",
        description="Belief update rules side by side on the Judy Benjamin scenario.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_update = sub.add_parser("update", help="apply one update rule to a prior")
    p_update.add_argument("--prior", required=True, help="prior distribution JSON file")
    p_update.add_argument("--rule", required=True, choices=("condition", "jeffrey", "ce"))
    p_update.add_argument(
        "--constraints",
        required=True,
        help="JSON file: {'event': [...]} for condition, "
        "{'partition': [[...], ...], 'weights': [...]} for jeffrey, "
        "a constraint set for ce",
    )
    p_update.add_argument("--json", action="store_true", help="emit one JSON object")
    p_update.set_defaults(func=cmd_update)

    p_sweep = sub.add_parser("jb-sweep", help="CSV of the rules across report values")
    p_sweep.add_argument("--grid", default="0:0.05:1", help="q grid as START:STEP:END")
    p_sweep.add_argument("--eps", type=float, default=DEFAULT_EPSILON, help="band half-width")
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    p_sweep.add_argument("--plot", default=None, help="optional SVG output path")
    p_sweep.set_defaults(func=cmd_jb_sweep)

    p_mc = sub.add_parser("jb-mc", help="Monte Carlo validation report (JSON)")
    p_mc.add_argument(
        "--prior",
        default="uniform",
        help="uniform | conditional | dirichlet:a1,a2,a3,a4 | prior JSON file",
    )
    p_mc.add_argument("--q", type=float, required=True, help="reported Pr(R1|R)")
    p_mc.add_argument("--eps", type=float, default=DEFAULT_EPSILON, help="band half-width")
    p_mc.add_argument("--samples", type=int, default=10**6)
    p_mc.add_argument("--seed", type=int, default=42)
    p_mc.add_argument("--chunks", type=int, default=1)
    p_mc.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p_mc.set_defaults(func=cmd_jb_mc)

    p_contrast = sub.add_parser("jb-contrast", help="the q=1 disagreement, three ways")
    p_contrast.add_argument("--eps", type=float, default=DEFAULT_EPSILON, help="band half-width")
    p_contrast.add_argument("--json", action="store_true")
    p_contrast.set_defaults(func=cmd_jb_contrast)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_PARSE
    try:
        return args.func(args)
    except (Infeasible, ZeroConditioningEvent, InfeasibleWeight) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except NoAcceptedSamples as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ACCEPTED
    except (ValueError, KeyError, TypeError, OSError, BadPartition, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
