"""so(9) reference regression: twisted coproducts at every chain stage.

The reference formulas live in ``data/so9_coproducts.jsonl`` (one record
per line, so mismatches can point at a file and line) plus
``data/so9_classical_r.json`` for the wedge expansion of the first-order
term.  Formula legs use a compact product grammar:

    "H34 E1+3"                    product of generators (order preserved)
    "E4^2"                        integer powers
    "exp[-1/2 s34 - 3/2 s12]"     (1+E_{3+4})^{-1/2} (1+E_{1+2})^{-3/2}
    "1"                           the unit

where ``s12``/``s34`` are the level logarithms log(1 + E_{1+2}) and
log(1 + E_{3+4}) at deformation parameter 1.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Tuple

from gmpy2 import mpq

from .algebras import ClassicalAlgebra
from .chains import build_chain, default_spec, wedge_terms
from .expr import ONE, Expr, eprod, esum, gen, pow_rat
from .scalars import Scalar, parse_scalar
from .tensors import TensorPoly, TwistElement
from .verify import twisted_coproduct

STAGES = ("J0", "E0J0", "J1E0J0", "B1prec0")

# Factor counts from the right of the full factor list per stage.
_STAGE_DEPTH = {"J0": 1, "E0J0": 2, "J1E0J0": 3, "B1prec0": 4}

_TOKEN = re.compile(r"exp\[[^\]]*\]|\S+")
_EXP_TERM = re.compile(r"([+-])?\s*(?:(\d+(?:/\d+)?)\s+)?(s\d+)")
_GEN_NAME = re.compile(r"([HE])(\d\d|\d(?:[+-]\d)?)(?:\^(\d+))?$")

_SIGMA_BASE = {
    "s12": (1, 1, 0, 0),
    "s34": (0, 0, 1, 1),
}


def gen_name_to_gid(name: str) -> str:
    m = _GEN_NAME.match(name)
    if not m:
        raise ValueError(f"unrecognized generator name {name!r}")
    kind, root, _power = m.groups()
    if kind == "H":
        if len(root) != 2:
            raise ValueError(f"Cartan names take two indices: {name!r}")
        return f"H_{{{root[0]}+{root[1]}}}"
    return f"E_{{{root}}}"


def _parse_exp_atom(body: str) -> Expr:
    factors = []
    pos = 0
    matched = False
    for m in _EXP_TERM.finditer(body):
        matched = True
        sign, coeff, sigma = m.groups()
        q = mpq(coeff) if coeff else mpq(1)
        if sign == "-":
            q = -q
        if sigma not in _SIGMA_BASE:
            raise ValueError(f"unknown level logarithm {sigma!r}")
        root = _SIGMA_BASE[sigma]
        label = "1+2" if sigma == "s12" else "3+4"
        base = esum(ONE, gen(f"E_{{{label}}}"))
        factors.append(pow_rat(base, q))
        pos = m.end()
    if not matched:
        raise ValueError(f"empty exponential atom {body!r}")
    return eprod(*factors)


def parse_leg(text: str) -> Expr:
    """Parse one leg of a reference formula into an expression."""
    factors: List[Expr] = []
    for atom in _TOKEN.findall(text.strip()):
        if atom == "1":
            continue
        if atom.startswith("exp[") and atom.endswith("]"):
            factors.append(_parse_exp_atom(atom[4:-1]))
            continue
        m = _GEN_NAME.match(atom)
        if not m:
            raise ValueError(f"unrecognized atom {atom!r} in leg {text!r}")
        power = int(m.group(3)) if m.group(3) else 1
        g = gen(gen_name_to_gid(atom.split("^")[0]))
        factors.extend([g] * power)
    if not factors:
        return ONE
    return eprod(*factors)


def parse_formula(terms: List[dict]) -> TensorPoly:
    poly = TensorPoly.zero(2)
    for term in terms:
        coeff = parse_scalar(term["coeff"])
        legs = term["legs"]
        if len(legs) != 2:
            raise ValueError("reference formulas are two-leg")
        poly = poly + TensorPoly.single(coeff, parse_leg(legs[0]), parse_leg(legs[1]))
    return poly


@dataclass
class GoldenRecord:
    stage: str
    gen_name: str
    line: int
    formula: TensorPoly


@dataclass
class GoldenResult:
    stage: str
    gen_name: str
    line: int
    passed: bool
    residual_nnz: int
    pointer: str


def _data_text(name: str) -> str:
    return resources.files("twistforge").joinpath("data", name).read_text()


def load_records(stage: Optional[str] = None) -> List[GoldenRecord]:
    records = []
    for line_no, line in enumerate(_data_text("so9_coproducts.jsonl").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("//"):
            continue
        data = json.loads(line)
        if stage and data["stage"] != stage:
            continue
        if data["stage"] not in _STAGE_DEPTH:
            raise ValueError(f"unknown stage {data['stage']!r} at line {line_no}")
        records.append(
            GoldenRecord(data["stage"], data["gen"], line_no, parse_formula(data["terms"]))
        )
    return records


def stage_twist(chain: TwistElement, stage: str) -> TwistElement:
    depth = _STAGE_DEPTH[stage]
    return TwistElement(2, chain.factors[len(chain.factors) - depth :])


def run_regression(stage: Optional[str] = None) -> List[GoldenResult]:
    """Check every reference coproduct against direct matrix evaluation."""
    alg = ClassicalAlgebra("B", 4)
    chain = build_chain(alg, default_spec("B", 4))
    rep = alg.rep
    stage_cache: Dict[str, TwistElement] = {}
    results: List[GoldenResult] = []
    for record in load_records(stage):
        tw = stage_cache.setdefault(record.stage, stage_twist(chain, record.stage))
        lhs = twisted_coproduct(tw, gen(gen_name_to_gid(record.gen_name)), rep)
        residual = lhs - record.formula.eval(rep)
        results.append(
            GoldenResult(
                stage=record.stage,
                gen_name=record.gen_name,
                line=record.line,
                passed=residual.is_zero(),
                residual_nnz=residual.nnz(),
                pointer=f"data/so9_coproducts.jsonl:{record.line}",
            )
        )
    return results


def reference_classical_r() -> List[Tuple[Scalar, str, str]]:
    data = json.loads(_data_text("so9_classical_r.json"))
    return [
        (parse_scalar(t["coeff"]), gen_name_to_gid(t["left"]), gen_name_to_gid(t["right"]))
        for t in data["terms"]
    ]


def check_classical_r_against_reference() -> bool:
    alg = ClassicalAlgebra("B", 4)
    built = {(l, r): c for c, l, r in wedge_terms(alg, default_spec("B", 4))}
    ref = {(l, r): c for c, l, r in reference_classical_r()}
    return built == ref
