"""
Command-line interface: every command writes one deterministic JSON report.

    python -m src.cli solve --algebra tn:3 --field Q --mode jordan
    python -m src.cli verify-theorem1 --n 3 --field Q
    python -m src.cli verify-theorem2 --n 2 --field Fp:7
    python -m src.cli counterexample --field Q
    python -m src.cli oracle-check --algebra tn:2 --field Q --trials 1000 --seed 42
    python -m src.cli record-golden --output reports/golden_dimensions.json

Exit codes: 0 verified/passed, 1 falsified (the report carries a witness) or
golden drift, 2 usage or internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from config import settings
from src.algebra import algebra_size, build_mn, build_tn, parse_algebra
from src.errors import BudgetExceededError, DerivationToolkitError, UsageError
from src.linmap import triple_unpack
from src.oracle import (
    bilinearity_agreement,
    check_space_soundness,
    counterexample_t2,
    is_gh_derivation,
    is_jordan_gh_derivation,
    oracle_null_space_dim,
    pair_family_audit,
    swap_lemma_suite,
)
from src.report_builder import compare_golden, envelope, golden_key, load_golden, write_golden, write_report
from src.scalar import ScalarDomain, parse_domain
from src.solver import Mode, SolutionSpace, compare, solve, solve_many
from utils.report_summary import dimension_table, drift_table, print_failure, print_summary

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2

COMMANDS = ("solve", "verify-theorem1", "verify-theorem2", "counterexample",
            "oracle-check", "record-golden")
THEOREM_MODES = (Mode.GH, Mode.JORDAN_CORNER, Mode.JORDAN)
ORACLE_MODES = (Mode.GH, Mode.JORDAN, Mode.JORDAN_CORNER)


@dataclass
class RunConfig:
    command: str
    field_spec: str = "Q"
    algebra_spec: Optional[str] = None
    n: Optional[int] = None
    mode: Optional[str] = None
    seed: int = settings.DEFAULT_SEED
    trials: int = settings.DEFAULT_TRIALS
    output_path: Optional[str] = None
    golden_path: Optional[str] = None
    jobs: int = 1
    timings: bool = False
    quiet: bool = False
    tn_sizes: Tuple[int, ...] = settings.GOLDEN_TN_SIZES
    mn_sizes: Tuple[int, ...] = settings.GOLDEN_MN_SIZES
    golden_fields: Tuple[str, ...] = settings.GOLDEN_FIELDS

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.command == "verify-theorem1" or self.command == "verify-theorem2":
            if self.n is None or self.n < 2:
                raise UsageError(f"{self.command} needs --n >= 2, got {self.n}")
            self.algebra_spec = f"{'tn' if self.command == 'verify-theorem1' else 'mn'}:{self.n}"
        if self.command in ("solve", "oracle-check") and not self.algebra_spec:
            raise UsageError(f"{self.command} needs --algebra")
        if self.command == "solve" and not self.mode:
            raise UsageError("solve needs --mode")
        if self.trials < 1:
            raise UsageError("--trials must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("--seed must be a 64-bit unsigned integer")


def _dims_record(space: SolutionSpace) -> dict:
    return {"algebra": space.algebra.name, "field": space.algebra.domain.spec,
            "mode": space.mode.value, "dim": space.dim}


class VerificationRunner:
    """Runs one command and returns (report, exit code)."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.domain: ScalarDomain = parse_domain(config.field_spec)
        self.summary_lines: List[str] = []
        self.summary_rows: List[dict] = []
        self.summary_table = None

    def run(self) -> Tuple[dict, int]:
        handler = {
            "solve": self.run_solve,
            "verify-theorem1": self.verify_theorem1,
            "verify-theorem2": self.verify_theorem2,
            "counterexample": self.run_counterexample,
            "oracle-check": self.run_oracle_check,
            "record-golden": self.record_golden,
        }[self.config.command]
        return handler()

    # -- golden ----------------------------------------------------------------

    def _golden_section(self, spaces: Sequence[SolutionSpace]) -> Optional[dict]:
        if not self.config.golden_path:
            return None
        golden = load_golden(self.config.golden_path)
        computed = {golden_key(s.algebra.name, s.algebra.domain.spec, s.mode.value): s.dim
                    for s in spaces}
        section = compare_golden(golden, computed)
        if not section["ok"]:
            self.summary_lines.append("Golden drift detected:")
            self.summary_table = drift_table(section)
        return section

    # -- commands --------------------------------------------------------------

    def run_solve(self) -> Tuple[dict, int]:
        """Solution space of one (algebra, field, mode)"""
        algebra = parse_algebra(self.config.algebra_spec, self.domain)
        space = solve(algebra, Mode.parse(self.config.mode))

        payload = {"solution_space": space.to_json()}
        golden = self._golden_section([space])
        if golden is not None:
            payload["golden"] = golden

        self.summary_lines.append(
            f"{algebra.name} over {self.domain.spec}, mode {space.mode.value}: dim {space.dim} "
            f"(rank {space.rank} of {space.system.n_cols} columns)"
        )
        code = EXIT_OK if golden is None or golden["ok"] else EXIT_FALSIFIED
        return envelope("solve", self.domain.spec, settings.DEFAULT_SEED, payload), code

    def _verify(self, theorem: str, algebra, target: Mode) -> Tuple[dict, int]:
        start = time.perf_counter()
        spaces = solve_many(algebra, THEOREM_MODES, jobs=self.config.jobs)
        elapsed = time.perf_counter() - start

        gh, corner, jordan = (spaces[m] for m in THEOREM_MODES)
        verdict = compare(spaces[target], gh)
        strictness = compare(jordan, gh)
        monotone = gh.dim <= corner.dim <= jordan.dim

        report = {
            "theorem": theorem,
            "algebra": algebra.name,
            "equal": verdict.relation == "equal",
            "dim_jordan": jordan.dim,
            "dim_jordan_corner": corner.dim,
            "dim_gh": gh.dim,
            "relation": verdict.relation,
            "monotone": monotone,
            "jordan_vs_gh": strictness.relation,
        }
        if verdict.witness is not None:
            report["witness"] = triple_unpack(verdict.witness, algebra).to_json()
        if strictness.witness is not None:
            report["jordan_vs_gh_witness"] = triple_unpack(strictness.witness, algebra).to_json()
        if self.config.timings:
            report["elapsed_seconds"] = round(elapsed, 3)
        payload = {"theorem_report": report}

        golden = self._golden_section([gh, corner, jordan])
        if golden is not None:
            payload["golden"] = golden

        self.summary_rows = [_dims_record(s) for s in (gh, corner, jordan)]
        self.summary_lines += [
            f"{theorem} on {algebra.name} over {self.domain.spec}: "
            f"{'verified' if report['equal'] else 'FALSIFIED'} ({verdict.relation})",
            f"Jordan vs GH: {strictness.relation}",
            f"Elapsed: {elapsed:.2f}s",
        ]

        ok = report["equal"] and monotone and (golden is None or golden["ok"])
        return envelope(self.config.command, self.domain.spec, settings.DEFAULT_SEED, payload), \
            EXIT_OK if ok else EXIT_FALSIFIED

    def verify_theorem1(self) -> Tuple[dict, int]:
        """Jordan triples on T_n meeting the corner assumption are {g,h}-derivations"""
        return self._verify("theorem1", build_tn(self.config.n, self.domain), Mode.JORDAN_CORNER)

    def verify_theorem2(self) -> Tuple[dict, int]:
        """Every Jordan triple on M_n is a {g,h}-derivation"""
        return self._verify("theorem2", build_mn(self.config.n, self.domain), Mode.JORDAN)

    def run_counterexample(self) -> Tuple[dict, int]:
        """(0, g, -g) on T_2: Jordan yes, {g,h} no, defect -e12 at (e11, e11)"""
        cfg = self.config
        t = counterexample_t2(self.domain)
        t2 = t.algebra
        jordan = is_jordan_gh_derivation(t, trials=cfg.trials, seed=cfg.seed)
        gh = is_gh_derivation(t, trials=cfg.trials, seed=cfg.seed)

        e11 = t2.basis_element((1, 1))
        expected_defect = -t2.basis_element((1, 2))
        reproduced = (
            jordan.passed and not gh.passed and gh.witness is not None
            and gh.witness.x == e11 and gh.witness.y == e11
            and gh.witness.defect == expected_defect
        )

        payload = {
            "algebra": t2.name,
            "triple": t.to_json(),
            "jordan_check": jordan.to_json(),
            "gh_check": gh.to_json(),
            "expected_defect": expected_defect.to_json(),
            "reproduced": reproduced,
        }
        self.summary_lines += [
            f"Jordan {{g,-g}} check: {'passed' if jordan.passed else 'failed'}",
            f"{{g,-g}} check: {'passed' if gh.passed else 'failed'}"
            + (f" at ({gh.witness.x}, {gh.witness.y}), defect {gh.witness.defect}" if gh.witness else ""),
        ]
        return envelope("counterexample", self.domain.spec, cfg.seed, payload), \
            EXIT_OK if reproduced else EXIT_FALSIFIED

    def run_oracle_check(self) -> Tuple[dict, int]:
        """Solver vs oracle: dimensions, soundness, swap lemmas, bilinearity, pair families"""
        cfg = self.config
        algebra = parse_algebra(cfg.algebra_spec, self.domain)
        spaces = solve_many(algebra, ORACLE_MODES, jobs=cfg.jobs)
        ok = True

        modes = {}
        for mode, space in spaces.items():
            try:
                oracle_dim = oracle_null_space_dim(algebra, mode)
            except BudgetExceededError as e:
                logger.info("Oracle skipped for %s: %s", mode.value, e)
                oracle_dim = None
            soundness = check_space_soundness(space, trials=cfg.trials, seed=cfg.seed)
            agree = oracle_dim is None or oracle_dim == space.dim
            ok = ok and agree and soundness.passed
            modes[mode.value] = {
                "dim": space.dim,
                "oracle_dim": oracle_dim,
                "agree": agree,
                "sound": soundness.to_json(),
            }
            self.summary_rows.append(dict(_dims_record(space), oracle=oracle_dim, agree=agree))

        gh, jordan, corner = (spaces[m] for m in ORACLE_MODES)
        monotone = gh.dim <= corner.dim <= jordan.dim

        lemma_reports = swap_lemma_suite(jordan, trials=cfg.trials, seed=cfg.seed)
        lemmas = {
            "triples": len(lemma_reports),
            "passed": all(r.passed for r in lemma_reports),
            "inconclusive": sum(r.inconclusive for r in lemma_reports),
            "failures": [r.to_json() for r in lemma_reports if r.witness is not None],
        }

        agreement = bilinearity_agreement(
            [gh, jordan], n_triples=cfg.trials, seed=cfg.seed)
        families = {m.value: pair_family_audit(spaces[m]).to_json()
                    for m in (Mode.JORDAN, Mode.JORDAN_CORNER)}

        ok = ok and monotone and lemmas["passed"] and agreement["disagreements"] == 0
        payload = {
            "algebra": algebra.name,
            "trials": cfg.trials,
            "modes": modes,
            "monotone": monotone,
            "swap_lemmas": lemmas,
            "bilinearity": agreement,
            "pair_families": families,
            "passed": ok,
        }
        self.summary_lines += [
            f"Oracle check on {algebra.name} over {self.domain.spec}: {'passed' if ok else 'FAILED'}",
            f"Swap lemmas: {lemmas['triples']} triples, {lemmas['inconclusive']} inconclusive",
            f"Bilinearity disagreements: {agreement['disagreements']}",
        ]
        return envelope("oracle-check", self.domain.spec, cfg.seed, payload), \
            EXIT_OK if ok else EXIT_FALSIFIED

    def record_golden(self) -> Tuple[dict, int]:
        """Recompute the dimension grid, cross-check with the oracle, write the golden file"""
        cfg = self.config
        specs = [f"tn:{n}" for n in cfg.tn_sizes] + [f"mn:{n}" for n in cfg.mn_sizes]
        dims: Dict[str, int] = {}
        disagreements = []

        for field_spec in cfg.golden_fields:
            domain = parse_domain(field_spec)
            for spec in specs:
                algebra = parse_algebra(spec, domain)
                for mode, space in solve_many(algebra, list(Mode), jobs=cfg.jobs).items():
                    key = golden_key(spec, field_spec, mode.value)
                    dims[key] = space.dim
                    if space.system.n_cols <= settings.ORACLE_MAX_COLUMNS:
                        oracle_dim = oracle_null_space_dim(algebra, mode)
                        if oracle_dim != space.dim:
                            disagreements.append({"key": key, "solver": space.dim, "oracle": oracle_dim})
                    self.summary_rows.append(_dims_record(space))

        path = cfg.output_path or settings.GOLDEN_PATH
        if disagreements:
            self.summary_lines.append("Oracle disagreement: golden file not written")
        else:
            write_golden(path, dims)
            self.summary_lines.append(f"Golden file written: {path} ({len(dims)} entries)")

        payload = {"entries": len(dims), "disagreements": disagreements,
                   "written": not disagreements, "path": path}
        return envelope("record-golden", ",".join(cfg.golden_fields), settings.DEFAULT_SEED, payload), \
            EXIT_FALSIFIED if disagreements else EXIT_OK


def _int_list(text: str) -> Tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gh-derivation-verifier",
        description="Exact solution spaces of {g,h}-derivations and Jordan {g,h}-derivations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeded=False):
        p.add_argument("--field", default="Q", help="'Q' or 'Fp:<p>'")
        p.add_argument("--output", help="write the JSON report here instead of stdout")
        p.add_argument("--quiet", action="store_true", help="no stderr summary")
        p.add_argument("--verbose", action="store_true", help="debug logging")
        p.add_argument("--jobs", type=int, default=1, help="processes for independent solves")
        if seeded:
            p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
            p.add_argument("--trials", type=int, default=settings.DEFAULT_TRIALS)

    p = sub.add_parser("solve", help="solution space of one constraint mode")
    common(p)
    p.add_argument("--algebra", required=True, help="'tn:<n>' or 'mn:<n>'")
    p.add_argument("--mode", required=True, choices=[m.value for m in Mode])
    p.add_argument("--golden", help="compare against a golden dimension file")

    for name in ("verify-theorem1", "verify-theorem2"):
        p = sub.add_parser(name, help=f"{name} at a concrete size")
        common(p)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--golden", help="compare against a golden dimension file")
        p.add_argument("--timings", action="store_true", help="include elapsed time in the JSON")

    p = sub.add_parser("counterexample", help="reproduce the T_2 counterexample")
    common(p, seeded=True)

    p = sub.add_parser("oracle-check", help="cross-check the solver with the oracle")
    common(p, seeded=True)
    p.add_argument("--algebra", required=True, help="'tn:<n>' or 'mn:<n>'")

    p = sub.add_parser("record-golden", help="recompute and write the golden dimension file")
    p.add_argument("--output", help=f"golden file path (default {settings.GOLDEN_PATH})")
    p.add_argument("--tn", type=_int_list, default=settings.GOLDEN_TN_SIZES)
    p.add_argument("--mn", type=_int_list, default=settings.GOLDEN_MN_SIZES)
    p.add_argument("--fields", default=",".join(settings.GOLDEN_FIELDS))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--quiet", action="store_true")
    p.add_argument("--verbose", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(
        command=args.command,
        field_spec=getattr(args, "field", "Q"),
        algebra_spec=getattr(args, "algebra", None),
        n=getattr(args, "n", None),
        mode=getattr(args, "mode", None),
        seed=getattr(args, "seed", settings.DEFAULT_SEED),
        trials=getattr(args, "trials", settings.DEFAULT_TRIALS),
        output_path=args.output,
        golden_path=getattr(args, "golden", None),
        jobs=args.jobs,
        timings=getattr(args, "timings", False),
        quiet=args.quiet,
    )
    if args.command == "record-golden":
        config.tn_sizes = tuple(args.tn)
        config.mn_sizes = tuple(args.mn)
        config.golden_fields = tuple(f.strip() for f in args.fields.split(",") if f.strip())
    if config.algebra_spec:
        algebra_size(config.algebra_spec)
    return config


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL),
        format=settings.LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    setup_logging(args.verbose)
    try:
        config = config_from_args(args)
        runner = VerificationRunner(config)
        report, code = runner.run()
    except DerivationToolkitError as e:
        print_failure(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.exception("Internal error")
        print_failure(f"internal error: {e}")
        return EXIT_USAGE

    # record-golden writes the golden file to --output and its report to stdout
    write_report(report, None if config.command == "record-golden" else config.output_path)
    if not config.quiet:
        table = runner.summary_table
        if table is None and runner.summary_rows:
            table = dimension_table(runner.summary_rows)
        print_summary(f"{config.command} ({config.field_spec})", runner.summary_lines,
                      table=table, ok=code == EXIT_OK)
    return code


if __name__ == "__main__":
    sys.exit(main())
