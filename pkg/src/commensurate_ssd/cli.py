"""Command-line planner.

Exit codes: 0 success, 1 numerical failure, 2 validation failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .collective import (
    build_collective_prior,
    hellinger_matrix,
    prior_credible_interval,
)
from .config import DesignConfig, load_config
from .distributions import GammaParams, gamma_summary
from .errors import ConfigError, QuadratureError, SSDError
from .montecarlo import (
    SimulationPlan,
    simulate_average_coverage,
    simulate_average_length,
    simulate_average_posterior_variance,
)
from .posterior import KnownVariance
from .ssd import ACC, ALC, APVC, SSDResult, criterion_met, solve
from .sweep import SweepSpec, rows_to_csv, run_sweep

EXIT_OK, EXIT_NUMERIC, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3


class _IOFailure(Exception):
    pass


def _describe_variance(config: DesignConfig) -> str:
    vm = config.variance_model()
    if isinstance(vm, KnownVariance):
        return f"known sigma0^2 = {vm.sigma2:g}"
    return f"unknown, sigma0^2 ~ Inv-Gamma(c/2, c*S/2) with c = {vm.c:g}"


def _describe_criterion(crit) -> str:
    if isinstance(crit, ACC):
        return f"l0={crit.l0:g}, coverage>={1 - crit.alpha:g}"
    if isinstance(crit, ALC):
        return f"coverage={1 - crit.alpha0:g}, length<={crit.l:g}"
    return f"variance<={crit.eps0:g}"


def _metric_name(crit) -> str:
    return {"ACC": "coverage", "ALC": "length", "APVC": "variance"}[crit.kind]


def _matrix_lines(matrix, width=7) -> list[str]:
    k = len(matrix)
    lines = ["      " + "".join(f"{j + 1:>{width}d}" for j in range(k))]
    for i, row in enumerate(matrix):
        lines.append(f"{i + 1:>5d} " + "".join(f"{x:>{width}.3f}" for x in row))
    return lines


def report_prior(config: DesignConfig) -> str:
    sources = config.historical()
    hyper = config.gamma_hyper()
    prior = build_collective_prior(sources, hyper, config.rule())
    lo, hi = prior_credible_interval(prior, 0.95)
    out = []
    for label, g in (("vague", GammaParams(hyper.a01, hyper.b01)), ("informative", GammaParams(hyper.a02, hyper.b02))):
        mean, q1, q2 = gamma_summary(g)
        out.append(f"{label:<12s} Gamma({g.shape:g}, {g.rate:g}): mean {mean:.3f} (95% {q1:.3f}, {q2:.3f})")
    out.append("")
    out.append(f"{'k':>3s} {'m_k':>8s} {'s2_k':>8s} {'w_k':>7s} {'p_k':>7s} {'lambda_k':>9s} {'xi2_k':>8s}")
    for i, (src, part) in enumerate(zip(sources, prior.per_source), start=1):
        out.append(
            f"{i:>3d} {src.m:>8.3f} {src.v:>8.3f} {src.w:>7.3f} {part.p:>7.3f} {part.lam:>9.3f} {part.xi2:>8.3f}"
        )
    out.append("")
    out.append(f"collective prior: N({prior.mean:.3f}, {prior.variance:.3f})")
    out.append(f"95% credible interval: ({lo:.3f}, {hi:.3f})")
    out.append("")
    out.append("squared Hellinger distances between source summaries:")
    out.extend(_matrix_lines(hellinger_matrix(sources)))
    return "\n".join(out) + "\n"


def _format_result(r: SSDResult) -> str:
    if r.total == 0:
        total = "0"
    elif r.method == "closed_form":
        total = f"{r.real_total:.1f}"
    else:
        total = f"{r.total:d}"
    line = (
        f"{r.criterion.kind:<5s} {_describe_criterion(r.criterion):<30s} {r.method:<12s} "
        f"{total:>8s} {r.nA:>5d} {r.nB:>5d}  {_metric_name(r.criterion)} {r.achieved:.4f}"
    )
    if r.total == 0:
        line += "  (prior alone meets the target; no new experiment needed)"
    return line


def report_ssd(config: DesignConfig) -> str:
    prior = build_collective_prior(config.historical(), config.gamma_hyper(), config.rule())
    vm = config.variance_model()
    alloc = config.allocation_rule()
    out = [
        f"collective prior: N({prior.mean:.3f}, {prior.variance:.3f})",
        f"variance: {_describe_variance(config)}",
        f"allocation nA:nB = {alloc.ratio_A}:{alloc.ratio_B}",
        "",
        f"{'crit':<5s} {'target':<30s} {'method':<12s} {'total':>8s} {'nA':>5s} {'nB':>5s}  achieved",
    ]
    for crit in config.criteria_objects():
        out.append(_format_result(solve(prior, crit, vm, alloc)))
    return "\n".join(out) + "\n"


def report_hellinger(config: DesignConfig) -> str:
    lines = ["squared Hellinger distances between source summaries:"]
    lines.extend(_matrix_lines(hellinger_matrix(config.historical())))
    return "\n".join(lines) + "\n"


def _estimate_line(label: str, est) -> str:
    return f"{label + ':':<34s} {est.value:.5f} +/- {est.std_error:.5f}"


def report_verify(config: DesignConfig, n_total: int, plan: SimulationPlan, workers: int = 1) -> str:
    if n_total < 0:
        raise ConfigError(f"--n-total must be >= 0, got {n_total}")
    prior = build_collective_prior(config.historical(), config.gamma_hyper(), config.rule())
    vm = config.variance_model()
    nA, nB = config.allocation_rule().split(n_total)
    criteria = config.criteria_objects()
    accs = [c for c in criteria if isinstance(c, ACC)]
    alcs = [c for c in criteria if isinstance(c, ALC)]
    l0 = accs[0].l0 if accs else (alcs[0].l if alcs else 0.65)
    alpha0 = alcs[0].alpha0 if alcs else (accs[0].alpha if accs else 0.05)

    coverage = {c.l0: simulate_average_coverage(prior, vm, nA, nB, c.l0, plan, workers=workers) for c in accs}
    if l0 not in coverage:
        coverage[l0] = simulate_average_coverage(prior, vm, nA, nB, l0, plan, workers=workers)
    lengths = {c.alpha0: simulate_average_length(prior, vm, nA, nB, c.alpha0, plan, workers=workers) for c in alcs}
    if alpha0 not in lengths:
        lengths[alpha0] = simulate_average_length(prior, vm, nA, nB, alpha0, plan, workers=workers)
    variance = simulate_average_posterior_variance(prior, vm, nA, nB, plan, workers=workers)

    out = [
        f"collective prior: N({prior.mean:.3f}, {prior.variance:.3f})",
        f"variance: {_describe_variance(config)}",
        f"design: nA={nA}, nB={nB} (total {n_total}); draws={plan.draws}, seed={plan.seed}",
        "",
        _estimate_line(f"average coverage (l0={l0:g})", coverage[l0]),
        _estimate_line(f"average length (coverage {1 - alpha0:g})", lengths[alpha0]),
        _estimate_line("average posterior variance", variance),
        "",
    ]
    for crit in criteria:
        if isinstance(crit, ACC):
            est = coverage[crit.l0]
        elif isinstance(crit, ALC):
            est = lengths[crit.alpha0]
        else:
            est = variance
        verdict = "PASS" if criterion_met(crit, est.value, 3.0 * est.std_error) else "FAIL"
        out.append(
            f"{verdict} {crit.kind:<5s} {_describe_criterion(crit):<30s} "
            f"estimate {est.value:.5f} +/- {est.std_error:.5f} (3 SE allowance)"
        )
    return "\n".join(out) + "\n"


def _parse_values(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"--values: expected comma-separated numbers, got {text!r}") from None


def _write(path: str, content: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commensurate-ssd",
        description="Bayesian sample sizes with a commensurate collective prior.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", required=True, metavar="PATH", help="JSON design file")
        return p

    with_config(sub.add_parser("prior", help="collective prior report"))
    with_config(sub.add_parser("ssd", help="sample sizes for every configured criterion"))
    with_config(sub.add_parser("hellinger", help="pairwise squared Hellinger distances"))

    sweep = with_config(sub.add_parser("sweep", help="solve over a grid of one parameter, write CSV"))
    sweep.add_argument("--axis", required=True, help="alpha, l0, l, eps0, c, a02 or b02")
    sweep.add_argument("--values", required=True, help="comma-separated axis values")
    sweep.add_argument("--modes", default="robust",
                       help="comma-separated: robust, no_robustification, no_borrowing, "
                            "single_source[:K], optimal")
    sweep.add_argument("--out", required=True, metavar="PATH", help="CSV output path")
    sweep.add_argument("--workers", type=int, default=1)

    verify = with_config(sub.add_parser("verify", help="Monte Carlo check of a design"))
    verify.add_argument("--n-total", type=int, required=True, help="total sample size nA + nB")
    verify.add_argument("--draws", type=int, default=100_000)
    verify.add_argument("--seed", type=int, default=1)
    verify.add_argument("--chunk-size", type=int, default=50_000)
    verify.add_argument("--workers", type=int, default=1)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        try:
            config = load_config(args.config)
        except OSError as exc:
            raise _IOFailure(f"cannot read {args.config}: {exc}") from None
        if args.command == "prior":
            stdout.write(report_prior(config))
        elif args.command == "ssd":
            stdout.write(report_ssd(config))
        elif args.command == "hellinger":
            stdout.write(report_hellinger(config))
        elif args.command == "sweep":
            modes = tuple(m.strip() for m in args.modes.split(",") if m.strip())
            spec = SweepSpec(args.axis, _parse_values(args.values), modes)
            rows = run_sweep(config, spec, workers=args.workers)
            _write(args.out, rows_to_csv(rows))
            stdout.write(f"wrote {len(rows)} rows to {args.out}\n")
        elif args.command == "verify":
            try:
                plan = SimulationPlan(args.draws, args.seed, args.chunk_size)
            except SSDError as exc:
                raise ConfigError(str(exc)) from None
            stdout.write(report_verify(config, args.n_total, plan, args.workers))
    except ConfigError as exc:
        stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    except _IOFailure as exc:
        stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO
    except (QuadratureError, SSDError, ArithmeticError) as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
