"""Command-line front end.

Commands:

* ``twistforge build``   construct a chain and export chain.json,
  rmatrix.json and classical_r.json,
* ``twistforge verify``  run the verification predicates (single chain or
  a sweep) and write report.json,
* ``twistforge golden-so9``  run the so(9) reference regression.

Exit codes: 0 success (including expected failures of negative-control
presets), 2 invalid spec, 3 construction failure, 4 unexpected pass/fail
inversion, 5 reference-data mismatch.

Outputs are byte-deterministic across runs and parallelism degrees;
wall-clock fields are written as null unless --timings is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .algebras import ClassicalAlgebra, build_adjoint
from .chains import (
    ChainConstructionError,
    ChainSpec,
    InvalidSpecError,
    Level,
    build_chain,
    build_improper_sp,
    build_sp_counterexample,
    chain_carriers,
    default_spec,
    wedge_terms,
)
from .reps import Representation
from .scalars import parse_scalar
from .verify import (
    VerificationReport,
    check_twist_equation,
    matreshka_report,
    predicate_suite,
    semiclassical_match,
)

EXIT_OK = 0
EXIT_INVALID_SPEC = 2
EXIT_CONSTRUCTION = 3
EXIT_INVERSION = 4
EXIT_GOLDEN_MISMATCH = 5


@dataclass
class Preset:
    name: str
    series: str
    rank: int
    expect_fail: bool = False
    improper_variant: str = "short"


def preset_registry() -> Dict[str, Preset]:
    presets: Dict[str, Preset] = {}
    for rank in range(1, 6):
        presets[f"sl{rank + 1}"] = Preset(f"sl{rank + 1}", "A", rank)
    for rank in range(2, 5):
        presets[f"so{2 * rank + 1}"] = Preset(f"so{2 * rank + 1}", "B", rank)
    for rank in range(2, 6):
        presets[f"so{2 * rank}"] = Preset(f"so{2 * rank}", "D", rank)
    for rank in (2, 3):
        presets[f"sp{2 * rank}-improper"] = Preset(
            f"sp{2 * rank}-improper", "C", rank
        )
    presets["sp6-counterexample"] = Preset("sp6-counterexample", "C", 3, expect_fail=True)
    return presets


SWEEP_ORDER = (
    ["sl2", "sl3", "sl4", "sl5", "sl6"]
    + ["so5", "so7", "so9"]
    + ["so4", "so6", "so8", "so10"]
    + ["sp4-improper", "sp6-improper"]
)


@dataclass
class RunConfig:
    command: str
    preset: Optional[str] = None
    spec_path: Optional[str] = None
    out_dir: str = "."
    rep: str = "defining"
    sweep: bool = False
    max_rank: Optional[int] = None
    xi: Optional[str] = None
    eta_list: Optional[List[str]] = None
    stage: Optional[str] = None
    verbose: bool = False
    timings: bool = False
    threads: int = 1


def _load_spec(config: RunConfig) -> Tuple[ChainSpec, bool]:
    """Resolve the chain spec; returns (spec, expect_fail)."""
    if config.preset and config.spec_path:
        raise InvalidSpecError("give either --preset or --spec, not both")
    if config.spec_path:
        try:
            data = json.loads(Path(config.spec_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidSpecError(f"cannot read spec file: {exc}") from exc
        return ChainSpec.from_json(data), False
    name = config.preset or "so9"
    registry = preset_registry()
    if name not in registry:
        raise InvalidSpecError(
            f"unknown preset {name!r}; available: {', '.join(sorted(registry))}"
        )
    preset = registry[name]
    if preset.expect_fail:
        spec = build_improper_sp(preset.rank)  # placeholder spec for reports
        return spec, True
    spec = default_spec(
        preset.series, preset.rank, xi=config.xi, improper_variant=preset.improper_variant
    )
    return spec, False


def _apply_xi(spec: ChainSpec, xi: Optional[str]) -> ChainSpec:
    if xi is None:
        return spec
    xi_s = parse_scalar(xi)
    return ChainSpec(
        spec.series,
        spec.rank,
        tuple(Level(l.initial_root, l.theta, xi_s) for l in spec.levels),
        spec.improper,
    )


def _representation(alg: ClassicalAlgebra, spec: ChainSpec, which: str) -> Representation:
    if which == "defining":
        return alg.rep
    if which == "adjoint":
        gids: List[str] = []
        for carrier in chain_carriers(alg, spec):
            gids += [carrier.h_id, carrier.e_id]
            gids += [g for p in carrier.pairs for g in p[:2]]
        rep, _center = build_adjoint(gids, alg.rep)
        return rep
    raise InvalidSpecError(f"unknown representation choice {which!r}")


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _matrix_json(m) -> dict:
    return {
        "dim": m.dim,
        "entries": [[i, j, str(v)] for (i, j), v in m.entries_sorted()],
    }


def cmd_build(config: RunConfig) -> int:
    try:
        spec, expect_fail = _load_spec(config)
        if expect_fail:
            print("build does not apply to counterexample presets", file=sys.stderr)
            return EXIT_INVALID_SPEC
        spec = _apply_xi(spec, config.xi) if config.spec_path else spec
        alg = ClassicalAlgebra(spec.series, spec.rank)
        rep = _representation(alg, spec, config.rep)
    except (InvalidSpecError, ValueError) as exc:
        print(f"invalid spec: {exc}", file=sys.stderr)
        return EXIT_INVALID_SPEC
    try:
        chain = build_chain(alg, spec)
        if not spec.levels:
            print("warning: empty level list produces the identity twist", file=sys.stderr)
        from .verify import r_matrix

        r = r_matrix(chain, rep)
        etas = config.eta_list or ["1"] * len(spec.levels)
        wedges = wedge_terms(alg, spec, etas)
    except InvalidSpecError as exc:
        print(f"invalid spec: {exc}", file=sys.stderr)
        return EXIT_INVALID_SPEC
    except ChainConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    out = Path(config.out_dir)
    _write_json(
        out / "chain.json",
        {"algebra": alg.descriptor(), "spec": spec.to_json(), "twist": chain.to_json()},
    )
    _write_json(
        out / "rmatrix.json",
        {"algebra": alg.descriptor(), "rep": rep.name, "matrix": _matrix_json(r)},
    )
    _write_json(
        out / "classical_r.json",
        {
            "algebra": alg.descriptor(),
            "eta": list(etas),
            "terms": [
                {"coeff": str(c), "left": left, "right": right}
                for c, left, right in wedges
            ],
        },
    )
    print(f"wrote chain.json, rmatrix.json, classical_r.json to {out}")
    return EXIT_OK


def _suite_for(name: str, config: RunConfig) -> Tuple[str, List[VerificationReport], bool]:
    registry = preset_registry()
    if name not in registry:
        raise InvalidSpecError(
            f"unknown preset {name!r}; available: {', '.join(sorted(registry))}"
        )
    preset = registry[name]
    if preset.expect_fail:
        alg = ClassicalAlgebra(preset.series, preset.rank)
        bad = build_sp_counterexample(preset.rank)
        report = check_twist_equation(bad, alg.rep, algebra=alg.descriptor())
        report.check = "twist-equation(negative-control)"
        return name, [report], True
    if preset.series == "C":
        spec = build_improper_sp(preset.rank, preset.improper_variant)
    else:
        spec = default_spec(preset.series, preset.rank, xi=config.xi)
    alg = ClassicalAlgebra(preset.series, preset.rank)
    rep = _representation(alg, spec, config.rep)
    etas = config.eta_list
    return name, predicate_suite(alg, spec, rep, etas=etas), False


def cmd_verify(config: RunConfig) -> int:
    try:
        if config.sweep:
            names = [
                n
                for n in SWEEP_ORDER
                if config.max_rank is None
                or preset_registry()[n].rank <= config.max_rank
            ]
            with ThreadPoolExecutor(max_workers=max(1, config.threads)) as pool:
                futures = [pool.submit(_suite_for, n, config) for n in names]
                outcomes = [f.result() for f in futures]
        elif config.spec_path:
            spec, _ = _load_spec(config)
            spec = _apply_xi(spec, config.xi)
            alg = ClassicalAlgebra(spec.series, spec.rank)
            rep = _representation(alg, spec, config.rep)
            outcomes = [("spec", predicate_suite(alg, spec, rep, etas=config.eta_list), False)]
        else:
            outcomes = [_suite_for(config.preset or "so9", config)]
    except ValueError as exc:
        if isinstance(exc, ChainConstructionError):
            print(f"construction failed: {exc}", file=sys.stderr)
            return EXIT_CONSTRUCTION
        print(f"invalid spec: {exc}", file=sys.stderr)
        return EXIT_INVALID_SPEC

    exit_code = EXIT_OK
    payload = []
    for name, reports, expect_fail in outcomes:
        all_passed = all(r.passed for r in reports)
        if expect_fail:
            inverted = all_passed
            status = "failed-as-predicted" if not all_passed else "UNEXPECTED-PASS"
        else:
            inverted = not all_passed
            status = "pass" if all_passed else "FAIL"
        if inverted:
            exit_code = EXIT_INVERSION
        for r in reports:
            line = f"{name:18s} {r.check:32s} {'pass' if r.passed else 'fail'}"
            if config.verbose and r.witness:
                line += f"  witness {r.witness}"
            print(line)
        print(f"{name:18s} => {status}")
        payload.append(
            {
                "target": name,
                "expected_fail": expect_fail,
                "status": status,
                "reports": [
                    r.to_json(timings=config.timings, include_residual=config.verbose)
                    for r in reports
                ],
            }
        )
    _write_json(Path(config.out_dir) / "report.json", payload)
    return exit_code


def cmd_golden_so9(config: RunConfig) -> int:
    from .golden_so9 import (
        check_classical_r_against_reference,
        run_regression,
    )

    results = run_regression(stage=config.stage)
    fails = [r for r in results if not r.passed]
    for r in results:
        if config.verbose or not r.passed:
            print(
                f"{r.stage:9s} {r.gen_name:6s} {'pass' if r.passed else 'FAIL'}"
                f"  ({r.pointer})"
            )
    print(f"reference coproducts: {len(results) - len(fails)}/{len(results)} pass")

    extra_fail = False
    if config.stage is None:
        alg = ClassicalAlgebra("B", 4)
        spec = default_spec("B", 4)
        ok, details = matreshka_report(alg, spec, alg.rep)
        print(f"matreshka checks: {'pass' if ok else 'FAIL'}")
        if config.verbose:
            for d in details:
                print("  " + d)
        r_ok = check_classical_r_against_reference()
        print(f"classical r-matrix reference: {'pass' if r_ok else 'FAIL'}")
        semi = semiclassical_match(alg, spec, [1, 1], alg.rep)
        print(f"semiclassical match: {'pass' if semi.passed else 'FAIL'}")
        extra_fail = not (ok and r_ok and semi.passed)

    if fails:
        first = fails[0]
        print(
            f"mismatch at {first.pointer} ({first.stage} {first.gen_name})",
            file=sys.stderr,
        )
    if fails or extra_fail:
        return EXIT_GOLDEN_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twistforge",
        description="Exact construction and verification of chains of extended "
        "Jordanian twists for classical Lie algebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--preset", help="named chain preset (e.g. so9, sl4, sp6-counterexample)")
        p.add_argument("--spec", dest="spec_path", help="path to a chain spec JSON file")
        p.add_argument("--out", dest="out_dir", default=".", help="output directory")
        p.add_argument(
            "--rep", choices=("defining", "adjoint"), default="defining",
            help="representation used for evaluation",
        )
        p.add_argument("--xi", help="deformation parameter for all levels, e.g. 1/2")
        p.add_argument(
            "--eta-list",
            help="comma-separated per-level multipliers for the first-order term",
        )
        p.add_argument("--verbose", action="store_true")
        p.add_argument(
            "--timings", action="store_true",
            help="include wall-clock ms in reports (breaks byte determinism)",
        )

    b = sub.add_parser("build", help="construct a chain and export its artifacts")
    add_common(b)

    v = sub.add_parser("verify", help="run the verification predicate suite")
    add_common(v)
    v.add_argument("--sweep", action="store_true", help="verify the whole preset sweep")
    v.add_argument("--max-rank", type=int, help="rank cutoff for --sweep")

    g = sub.add_parser("golden-so9", help="run the so(9) reference regression")
    add_common(g)
    g.add_argument("--stage", choices=("J0", "E0J0", "J1E0J0", "B1prec0"))

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    eta_list = None
    if getattr(args, "eta_list", None):
        eta_list = [part.strip() for part in args.eta_list.split(",") if part.strip()]
    threads = int(os.environ.get("TWISTFORGE_THREADS", "1") or "1")
    return RunConfig(
        command=args.command,
        preset=getattr(args, "preset", None),
        spec_path=getattr(args, "spec_path", None),
        out_dir=getattr(args, "out_dir", "."),
        rep=getattr(args, "rep", "defining"),
        sweep=getattr(args, "sweep", False),
        max_rank=getattr(args, "max_rank", None),
        xi=getattr(args, "xi", None),
        eta_list=eta_list,
        stage=getattr(args, "stage", None),
        verbose=getattr(args, "verbose", False),
        timings=getattr(args, "timings", False),
        threads=threads,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    if config.command == "build":
        return cmd_build(config)
    if config.command == "verify":
        return cmd_verify(config)
    if config.command == "golden-so9":
        return cmd_golden_so9(config)
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
