"""Command-line front end.

Every command writes its artifacts and a ``manifest.json`` into ``--out``,
prints one summary line on stdout and exits with 0 on success, 1 when a
certificate fails (or a solver does not converge) and 2 on usage or domain
errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import logging
import math
import sys
from pathlib import Path

from expinfo import __version__
from expinfo._frankwolfe import ConvergenceError
from expinfo._jsonio import write_json
from expinfo.corpus import MODES, ingest_files
from expinfo.maxent import (
    read_family,
    read_solution,
    solve_maxent,
    verify_equilibrium,
    write_family,
    write_solution,
)
from expinfo.measures import (
    DomainError,
    chain_rule_decompose,
    divergence,
    entropy,
    read_measure,
    total_mass,
)
from expinfo.poisson import (
    PoissonProcessSpec,
    empirical_expectation_check,
    poisson_divergence_closed_form,
    poisson_divergence_truncated,
    sample_process,
    write_samples_csv,
)
from expinfo.projections import DEFAULT_TOL as PROJECTION_TOL
from expinfo.projections import (
    evariable_certificate,
    i_projection,
    poisson_evalue_integral,
    reverse_i_projection,
    verify_iproj_poisson_lift,
    verify_pythagorean,
    verify_ripr_poisson_lift,
)
from expinfo.scoring import GameConfig, honesty_gap_scan

log = logging.getLogger("expinfo")

LN2 = math.log(2)
POISSON_VERIFY_TOL = 1e-8
PYTHAGOREAN_TOL = 1e-7


def _nats(x: float) -> str:
    return f"{x:.10g} nats ({x / LN2:.10g} bits)"


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(args, inputs: list[str]) -> None:
    manifest = {
        "command": args.command,
        "inputs": [{"name": Path(p).name, "sha256": _sha256(p)} for p in inputs],
        "seed": args.seed,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "version": __version__,
    }
    write_json(manifest, args.out / "manifest.json")


def _write_table(path: Path, header: list[str], columns: list) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([v if isinstance(v, str) else format(float(v), ".17g") for v in row])


# ---------------------------------------------------------------------------
# commands; each returns (summary line, ok flag, input paths)


def cmd_divergence(args):
    mu, nu = read_measure(args.m1), read_measure(args.m2)
    d = divergence(mu, nu)
    out = {"divergence_nats": d, "divergence_bits": d / LN2,
           "mass_term_nats": None, "conditional_term_nats": None}
    if math.isfinite(d) and total_mass(nu) > 0:
        out["mass_term_nats"], out["conditional_term_nats"] = chain_rule_decompose(mu, nu)
    write_json(out, args.out / "divergence.json")
    return f"divergence {_nats(d)}", True, [args.m1, args.m2]


def cmd_entropy(args):
    mu = read_measure(args.m)
    h = entropy(mu)
    write_json({"entropy_nats": h, "entropy_bits": h / LN2, "total_mass": total_mass(mu)},
               args.out / "entropy.json")
    return f"entropy {_nats(h)}", True, [args.m]


def cmd_ingest(args):
    family = ingest_files(args.files, mode=args.mode, case_folding=args.casefold)
    write_family(family, args.out / "family.json")
    return (f"ingested {len(family)} texts over {len(family.alphabet)} symbols",
            True, list(args.files))


def cmd_maxent(args):
    family = read_family(args.family)
    try:
        sol = solve_maxent(family, tol=args.tol, max_iter=args.max_iter)
    except ConvergenceError as exc:
        write_solution(exc.best, args.out / "solution.json")
        raise
    write_solution(sol, args.out / "solution.json")
    if args.format == "csv":
        _write_table(args.out / "solution.csv",
                     ["symbol", "mu_star", "ell_star_nats", "ell_star_bits"],
                     [list(family.alphabet), sol.mu_star.weights, sol.ell_star.lengths,
                      sol.ell_star.in_bits()])
    return (f"maxent c = {_nats(sol.c)}, gap {sol.gap:.3e}, support {list(sol.support)}",
            True, [args.family])


def cmd_check_equilibrium(args):
    family = read_family(args.family)
    sol = read_solution(args.solution, family)
    report = verify_equilibrium(sol, family, tol=args.tol)
    write_json(report.to_json(), args.out / "equilibrium.json")
    return report.summary(), report.passed, [args.solution, args.family]


def _projection_table(args, name, family, result):
    if args.format == "csv" and result.minimizer is not None:
        _write_table(args.out / f"{name}.csv", ["symbol", "minimizer"],
                     [list(family.alphabet), result.minimizer.weights])


def cmd_iproj(args):
    family = read_family(args.family, empirical=False)
    nu = read_measure(args.nu)
    result = i_projection(family, nu, tol=min(args.tol, PROJECTION_TOL), max_iter=args.max_iter)
    tol = max(args.tol, PYTHAGOREAN_TOL)
    checks = [verify_pythagorean(family, nu, result, n_samples=args.samples, tol=tol, seed=args.seed)]
    if result.minimizer is not None:
        checks.append(verify_iproj_poisson_lift(family, nu, result.minimizer,
                                                n_samples=args.samples, tol=tol, seed=args.seed))
    out = result.to_json()
    out["checks"] = [c.to_json() for c in checks]
    write_json(out, args.out / "iproj.json")
    _projection_table(args, "iproj", family, result)
    ok = all(c.passed for c in checks)
    return f"iproj D(C||nu) = {_nats(result.optimum)}; " + "; ".join(c.summary() for c in checks), ok, \
        [args.family, args.nu]


def cmd_riproj(args):
    family = read_family(args.family, empirical=False)
    mu = read_measure(args.mu)
    result = reverse_i_projection(family, mu, tol=min(args.tol, PROJECTION_TOL),
                                  max_iter=args.max_iter)
    checks = []
    if result.minimizer is not None:
        checks = [evariable_certificate(family, mu, result.minimizer, tol=args.tol),
                  verify_ripr_poisson_lift(family, mu, result.minimizer, tol=args.tol)]
    out = result.to_json()
    out["checks"] = [c.to_json() for c in checks]
    write_json(out, args.out / "riproj.json")
    _projection_table(args, "riproj", family, result)
    ok = all(c.passed for c in checks)
    return f"riproj min D(mu||C) = {_nats(result.optimum)}; " + "; ".join(c.summary() for c in checks), \
        ok, [args.family, args.mu]


def cmd_evalue(args):
    family = read_family(args.family, empirical=False)
    mu, nu_hat = read_measure(args.mu), read_measure(args.nuhat)
    cert = evariable_certificate(family, mu, nu_hat, tol=args.tol)
    lift = verify_ripr_poisson_lift(family, mu, nu_hat, tol=args.tol)
    integrals = [poisson_evalue_integral(mu, nu_hat, v) for v in family.vertices]
    write_json({"checks": [cert.to_json(), lift.to_json()], "poisson_integrals": integrals},
               args.out / "evalue.json")
    return f"{cert.summary()}; {lift.summary()}", cert.passed and lift.passed, \
        [args.family, args.mu, args.nuhat]


def cmd_poisson_verify(args):
    mu, nu = read_measure(args.m1), read_measure(args.m2)
    closed = poisson_divergence_closed_form(mu, nu)
    N = args.truncation
    truncated = poisson_divergence_truncated(mu, nu, N)
    if math.isinf(closed) and math.isinf(truncated):
        err = 0.0
    else:
        err = abs(closed - truncated)
    ok = err <= POISSON_VERIFY_TOL
    write_json({"closed_form_nats": closed, "truncated_nats": truncated,
                "truncation": N, "abs_error": err, "pass": ok},
               args.out / "poisson_verify.json")
    return f"poisson-verify closed {closed:.12g} truncated {truncated:.12g} error {err:.3e}", ok, \
        [args.m1, args.m2]


def cmd_poisson_sample(args):
    spec = PoissonProcessSpec(read_measure(args.spec))
    samples = sample_process(spec, seed=args.seed, n=args.n)
    write_samples_csv(samples, spec.alphabet, args.out / "samples.csv")
    report = empirical_expectation_check(spec, samples, sigmas=args.sigmas)
    write_json({"mean_counts": samples.mean(axis=0), "check": report.to_json()},
               args.out / "expectation.json")
    return f"sampled {args.n} draws; {report.summary()}", report.passed, [args.spec]


def cmd_score_sim(args):
    family = read_family(args.family)
    sol = solve_maxent(family, tol=args.tol, max_iter=args.max_iter)
    config = GameConfig(family, f=args.fee, k=args.price, prior=sol.p)
    scan = honesty_gap_scan(config, n_perturbations=args.perturbations, radius=args.radius,
                            seed=args.seed, solution=sol)
    write_json(scan.to_json(), args.out / "scan.json")
    return (f"score-sim honest {scan.honest_expected:.10g}, best perturbed "
            f"{scan.best_perturbed:.10g}, gap {scan.gap:.3e}"), scan.passed, [args.family]


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="solver / certificate tolerance")
    common.add_argument("--max-iter", type=int, default=10_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, default=Path("."), help="artifact directory")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="csv additionally writes per-symbol tables")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="expinfo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("divergence", cmd_divergence, "information divergence D(M1||M2)")
    p.add_argument("m1")
    p.add_argument("m2")
    p = add("entropy", cmd_entropy, "entropy of a measure")
    p.add_argument("m")
    p = add("ingest", cmd_ingest, "build a family file from text files")
    p.add_argument("files", nargs="+")
    p.add_argument("--mode", choices=MODES, default="char")
    p.add_argument("--casefold", action="store_true")
    p = add("maxent", cmd_maxent, "maximum entropy measure and minimax code")
    p.add_argument("family")
    p = add("check-equilibrium", cmd_check_equilibrium, "verify a maxent solution")
    p.add_argument("solution")
    p.add_argument("family")
    p = add("iproj", cmd_iproj, "information projection of NU on the hull of FAMILY")
    p.add_argument("family")
    p.add_argument("nu")
    p.add_argument("--samples", type=int, default=1000)
    p = add("riproj", cmd_riproj, "reverse information projection of MU on the hull of FAMILY")
    p.add_argument("family")
    p.add_argument("mu")
    p = add("evalue", cmd_evalue, "e-variable certificate for a claimed reverse projection")
    p.add_argument("family")
    p.add_argument("mu")
    p.add_argument("nuhat")
    p = add("poisson-verify", cmd_poisson_verify, "check D(M1||M2) = D(Po(M1)||Po(M2))")
    p.add_argument("m1")
    p.add_argument("m2")
    p.add_argument("--truncation", type=int, default=None)
    p = add("poisson-sample", cmd_poisson_sample, "sample a Poisson point process")
    p.add_argument("spec")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--sigmas", type=float, default=4.0)
    p = add("score-sim", cmd_score_sim, "logarithmic scoring honesty scan")
    p.add_argument("family")
    p.add_argument("--fee", type=float, default=1.0, help="fixed payment f")
    p.add_argument("--price", type=float, default=1.0, help="price per nat k")
    p.add_argument("--perturbations", type=int, default=1000)
    p.add_argument("--radius", type=float, default=0.1)
    return parser


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        summary, ok, inputs = args.func(args)
        _write_manifest(args, inputs)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(summary)
    if not ok:
        print("certificate failed", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
