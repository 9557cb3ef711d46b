"""Command-line interface.

Subcommands: ``solve-joint``, ``solve-mep``, ``solve-roots``, ``synth``,
``experiment``.  All randomness derives from ``--seed`` (default 0), so an
identical invocation produces byte-identical outputs.  Exit codes: 0 on
success, 1 on usage errors, 2 on numerical failures (singular or
indefinite operators), 3 on IO errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import io as jio
from . import polyroots, synth
from .errors import (
    JointeigError,
    KindMismatchError,
    NotDefiniteError,
    ParseError,
    SchemaError,
    SingularError,
)
from .mep import solve_mep, three_param_random_problem
from .polyroots import (
    evaluate_system_residual,
    example8_problem,
    roots_from_multiplication_matrices,
)
from .rjea import rjea
from .seeds import derive_seed

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

SYNTH_PRESETS = ("ex1", "ex2", "ex3", "ex5", "three-param")
EXPERIMENT_PRESETS = (
    "table1",
    "table2",
    "table3",
    "dmu",
    "rq1tail",
    "gauss-cond",
    "defective",
    "sigma-study",
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class RunConfig:
    """Validated per-invocation parameters."""

    seed: int
    trials: int
    mode: str
    strategy: str | None
    out: str | None
    tol: float | None

    def __post_init__(self):
        if self.trials < 1:
            raise _UsageError("--trials must be >= 1")
        if self.tol is not None and self.tol < 0:
            raise _UsageError("--tol must be >= 0")
        if self.out is not None:
            os.makedirs(self.out, exist_ok=True)
            if not os.access(self.out, os.W_OK):
                raise OSError(f"output directory {self.out!r} is not writable")


def _build_parser() -> _Parser:
    parser = _Parser(prog="jointeig", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--mode", choices=("rq1", "rq2"), default="rq2")
        p.add_argument("--strategy", choices=("explicit", "pencil"), default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("solve-joint", help="joint eigenvalues of a family file")
    p.add_argument("file")
    common(p)

    p = sub.add_parser("solve-mep", help="solve a multiparameter problem file")
    p.add_argument("file")
    common(p)

    p = sub.add_parser("solve-roots", help="roots from multiplication matrices")
    p.add_argument("file")
    p.add_argument("--system", default=None, help="polynomial system file for residuals")
    common(p)

    p = sub.add_parser("synth", help="write synthetic family/problem files")
    p.add_argument("preset", choices=SYNTH_PRESETS)
    p.add_argument("--delta", type=float, default=1e-8)
    p.add_argument("--size", type=int, default=4, help="block size for three-param")
    common(p)

    p = sub.add_parser("experiment", help="run an experiment preset")
    p.add_argument("preset", choices=EXPERIMENT_PRESETS)
    common(p)
    return parser


def _emit(doc: dict, out_dir: str | None, filename: str):
    text = json.dumps(doc, indent=1)
    sys.stdout.write(text + "\n")
    if out_dir:
        jio.write_json_doc(doc, os.path.join(out_dir, filename))


def _cmd_solve_joint(args, cfg: RunConfig) -> int:
    family = jio.read_family(args.file)
    res = rjea(family, args.mode.upper(), cfg.seed, cluster_tol=cfg.tol)
    _emit(jio.joint_result_to_dict(res), cfg.out, "joint_result.json")
    return EXIT_OK


def _cmd_solve_mep(args, cfg: RunConfig) -> int:
    problem = jio.read_mep(args.file)
    sol = solve_mep(problem, args.mode.upper(), seed=cfg.seed, strategy=cfg.strategy)
    _emit(jio.mep_solution_to_dict(sol), cfg.out, "mep_solution.json")
    return EXIT_OK


def _cmd_solve_roots(args, cfg: RunConfig) -> int:
    fam = jio.read_mult(args.file)
    roots, res = roots_from_multiplication_matrices(fam, args.mode.upper(), cfg.seed)
    doc = jio.joint_result_to_dict(res)
    doc["kind"] = "roots-result"
    if args.system:
        system = jio.read_polynomial_system(args.system)
        doc["system_residuals"] = [
            evaluate_system_residual(system, root) for root in roots
        ]
    _emit(doc, cfg.out, "roots_result.json")
    return EXIT_OK


def _cmd_synth(args, cfg: RunConfig) -> int:
    out = cfg.out or "."
    os.makedirs(out, exist_ok=True)
    if args.preset == "three-param":
        problem = three_param_random_problem(args.size, cfg.seed)
        path = os.path.join(out, "three_param_mep.json")
        jio.write_mep(problem, path)
        sys.stdout.write(f"wrote {path}\n")
        return EXIT_OK
    if args.preset == "ex1":
        spec = synth.example1_spec()
    elif args.preset == "ex2":
        spec = synth.example2_spec()
    elif args.preset == "ex3":
        spec = synth.example3_spec(args.delta)
    else:
        spec = synth.example5_spec()
    family, ground_truth, _ = synth.make_family(spec)
    fam_path = os.path.join(out, f"{args.preset}_family.json")
    jio.write_family(family, fam_path)
    truth_path = os.path.join(out, f"{args.preset}_ground_truth.json")
    jio.write_json_doc(
        {
            "kind": "ground-truth",
            "tuples": [[jio.encode_complex(z) for z in row] for row in ground_truth],
        },
        truth_path,
    )
    sys.stdout.write(f"wrote {fam_path}\nwrote {truth_path}\n")
    return EXIT_OK


def _table_rows(reports, with_delta=False):
    header = ["epsilon", "tracked", "median_a", "bound13", "median_b", "bound12", "p_b_lt_a", "p_b_lt_5a"]
    if with_delta:
        header.insert(0, "delta")
    rows = []
    for rep in reports:
        for idx in rep.tracked:
            row = [
                rep.epsilon,
                idx,
                rep.median_rq1(idx),
                rep.median_bound_rq1(idx),
                rep.median_rq2(idx),
                rep.median_bound_rq2(idx),
                rep.prob_b_lt_a(idx),
                rep.prob_b_lt_5a(idx),
            ]
            if with_delta:
                row.insert(0, rep.delta)
            rows.append(row)
    return header, rows


def _table_csv_name(eps: float) -> str:
    return repr(float(eps)).replace("-", "m")


def _write_table_outputs(preset, reports, out, with_delta=False, single_tracked=False):
    header, rows = _table_rows(reports, with_delta)
    if single_tracked:
        # single tracked eigenvalue: the column is redundant
        drop = header.index("tracked")
        header = header[:drop] + header[drop + 1 :]
        rows = [r[:drop] + r[drop + 1 :] for r in rows]
    jio.write_csv(os.path.join(out, f"{preset}.csv"), header, rows)
    report_doc = {"kind": "experiment-report", "preset": preset, "levels": [r.to_dict() for r in reports]}
    jio.write_json_doc(report_doc, os.path.join(out, f"{preset}_report.json"))
    for rep in reports:
        for idx in rep.tracked:
            tag = f"eps{_table_csv_name(rep.epsilon)}_idx{idx}"
            if with_delta:
                tag = f"delta{_table_csv_name(rep.delta)}_" + tag
            jio.write_cdf_csv(os.path.join(out, f"{preset}_cdf_a_{tag}.csv"), rep.errors_rq1[idx])
            jio.write_cdf_csv(os.path.join(out, f"{preset}_cdf_b_{tag}.csv"), rep.errors_rq2[idx])
    for row in rows:
        sys.stdout.write(",".join(str(v) for v in row) + "\n")


def _cmd_experiment(args, cfg: RunConfig) -> int:
    out = cfg.out or "."
    os.makedirs(out, exist_ok=True)
    preset = args.preset
    if preset == "table1":
        reports = synth.run_trials(
            synth.example1_spec(),
            (0.0, 1e-14, 1e-12, 1e-10),
            (0,),
            cfg.trials,
            cfg.seed,
        )
        _write_table_outputs(preset, reports, out, single_tracked=True)
    elif preset == "table2":
        reports = synth.run_trials(
            synth.example2_spec(),
            (0.0, 1e-12, 1e-10, 1e-8),
            (0, 3),
            cfg.trials,
            cfg.seed,
        )
        _write_table_outputs(preset, reports, out)
    elif preset == "table3":
        reports = []
        for delta in (1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14):
            reports.extend(
                synth.run_trials(
                    synth.example3_spec(delta),
                    (1e-14, 1e-12, 1e-10, 1e-8, 1e-6),
                    (0,),
                    cfg.trials,
                    derive_seed(cfg.seed, int(-np.log10(delta))),
                    with_bounds=False,
                    delta=delta,
                )
            )
        _write_table_outputs(preset, reports, out, with_delta=True, single_tracked=True)
    elif preset == "dmu":
        _, ground_truth, _ = synth.make_family(synth.example1_spec())
        rows = synth.empirical_dmu_probability(ground_truth, 0, (3.0, 10.0, 30.0), cfg.trials, cfg.seed)
        jio.write_csv(
            os.path.join(out, "dmu.csv"),
            ["R", "empirical_prob", "bound"],
            [(r["R"], r["empirical"], r["bound"]) for r in rows],
        )
        jio.write_json_doc({"kind": "experiment-report", "preset": preset, "rows": rows}, os.path.join(out, "dmu_report.json"))
        for r in rows:
            sys.stdout.write(f"{r['R']},{r['empirical']},{r['bound']}\n")
    elif preset == "rq1tail":
        all_rows = []
        doc_rows = []
        for eps in (1e-12, 1e-9):
            table = synth.rq1_failure_probability_experiment(
                synth.example1_spec(), eps, (3.0, 10.0, 30.0, 100.0), cfg.trials, derive_seed(cfg.seed, int(eps * 1e15))
            )
            for r in table["rows"]:
                all_rows.append((eps, r["R"], r["empirical"], r["bound"]))
                doc_rows.append({"epsilon": eps, **{k: v for k, v in r.items()}})
        jio.write_csv(os.path.join(out, "rq1tail.csv"), ["epsilon", "R", "empirical_prob", "bound"], all_rows)
        jio.write_json_doc({"kind": "experiment-report", "preset": preset, "rows": doc_rows}, os.path.join(out, "rq1tail_report.json"))
        for row in all_rows:
            sys.stdout.write(",".join(str(v) for v in row) + "\n")
    elif preset == "gauss-cond":
        p = 8
        result = synth.gaussian_eigvec_condition_experiment(
            p, cfg.trials, 1.0, 100.0 * p**1.5, cfg.seed
        )
        jio.write_csv(
            os.path.join(out, "gauss_cond.csv"),
            ["p", "t", "R", "samples", "empirical_tail", "bound", "median_norm"],
            [(result["p"], result["t"], result["R"], result["samples"], result["empirical_tail"], result["bound"], result["median_norm"])],
        )
        jio.write_json_doc({"kind": "experiment-report", "preset": preset, **result}, os.path.join(out, "gauss_cond_report.json"))
        sys.stdout.write(f"{result['empirical_tail']},{result['bound']}\n")
    elif preset == "defective":
        result = synth.defective_scaling_experiment(
            synth.example5_spec(), (1e-12, 1e-9, 1e-6), cfg.trials, cfg.seed
        )
        jio.write_csv(
            os.path.join(out, "defective.csv"),
            ["epsilon", "median_defective", "median_simple"],
            list(zip(result["epsilons"], result["median_defective"], result["median_simple"])),
        )
        jio.write_json_doc(
            {
                "kind": "experiment-report",
                "preset": preset,
                "slope_defective": result["slope_defective"],
                "slope_simple": result["slope_simple"],
            },
            os.path.join(out, "defective_report.json"),
        )
        sys.stdout.write(f"slopes,{result['slope_defective']},{result['slope_simple']}\n")
    else:  # sigma-study
        rows = polyroots.sigma_study(
            example8_problem, (1e-1, 1e-2, 1e-3, 1e-4), cfg.trials, cfg.seed
        )
        jio.write_csv(
            os.path.join(out, "sigma_study.csv"),
            ["sigma", "median_error"],
            [(r["sigma"], r["median_error"]) for r in rows],
        )
        jio.write_json_doc(
            {
                "kind": "experiment-report",
                "preset": preset,
                "rows": [{"sigma": r["sigma"], "median_error": r["median_error"]} for r in rows],
            },
            os.path.join(out, "sigma_study_report.json"),
        )
        for r in rows:
            sys.stdout.write(f"{r['sigma']},{r['median_error']}\n")
    return EXIT_OK


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig(
            seed=args.seed,
            trials=args.trials,
            mode=args.mode,
            strategy=args.strategy,
            out=args.out,
            tol=args.tol,
        )
        handler = {
            "solve-joint": _cmd_solve_joint,
            "solve-mep": _cmd_solve_mep,
            "solve-roots": _cmd_solve_roots,
            "synth": _cmd_synth,
            "experiment": _cmd_experiment,
        }[args.command]
        return handler(args, cfg)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (SingularError, NotDefiniteError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (ParseError, SchemaError, KindMismatchError, OSError) as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return EXIT_IO
    except JointeigError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


def main():  # console entry point
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
