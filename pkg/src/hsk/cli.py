"""Batch command-line front end.

Commands: check, skeleton, solve, sreu, encode, eval, countermodel.
Input is one formula per file ('-' reads standard input); lines starting
with '#' and blank lines are ignored.  Exit status: 0 for a positive
result, 1 for a negative or exhausted one, 2 for usage or parse errors.

Output is plain text, or line-oriented records (`--format records`) of
tab-separated KEY=VALUE pairs with keys among verdict, witness,
problem_index and alpha.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field

from . import arith, models, qcheck, skeleton, sreu, textform
from .models import AlphaAssignment, pairing_j, unpair
from .syntax import ContractError, FunctionSymbol, Substitution, Unknown
from .textform import ParseError, parse_formula, print_formula, print_term


@dataclass
class RunConfig:
    command: str
    n: int = 1
    max_size: int = 6
    structure: str = "two-point"
    alpha: list[str] = field(default_factory=list)
    fmt: str = "text"
    solve: bool = False
    m: int | None = None


class _UsageError(ValueError):
    pass


def _strip_comments(text: str) -> str:
    kept = [line for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")]
    return "\n".join(kept)


def _record(**fields: str) -> str:
    return "\t".join(f"{key}={value}" for key, value in fields.items())


def _witness_text(solution: Substitution) -> str:
    items = sorted(solution.bindings.items(), key=lambda kv: _unknown_sort(kv[0]))
    return ";".join(f"*{u.index}:={print_term(t)}" for u, t in items)


def _unknown_sort(u: Unknown) -> tuple:
    return (0, u.index) if isinstance(u.index, int) else (1, u.index)


def _alpha_value_text(value: int) -> str:
    parts = unpair(value)
    if parts is None:
        return str(value)
    return f"J({parts[0]},{parts[1]})"


def _parse_alpha_bindings(pairs: list[str]) -> AlphaAssignment:
    values: dict[FunctionSymbol, int] = {}
    for pair_text in pairs:
        if "=" not in pair_text:
            raise _UsageError(f"alpha binding must be name=value: {pair_text!r}")
        name, _, value_text = pair_text.partition("=")
        symbol = textform.special_of_name(name.strip())
        if symbol is None:
            raise _UsageError(f"{name!r} is not a special constant")
        value_text = value_text.strip()
        if value_text.startswith("J(") and value_text.endswith(")"):
            inner = value_text[2:-1].split(",")
            if len(inner) != 2:
                raise _UsageError(f"malformed pairing value: {value_text!r}")
            values[symbol] = pairing_j(int(inner[0]), int(inner[1]))
        else:
            values[symbol] = int(value_text)
    return AlphaAssignment(values)


# ---------------------------------------------------------------------------
# Command implementations; each returns (status, list of output lines)


def _cmd_check(config: RunConfig, text: str) -> tuple[int, list[str]]:
    formula = parse_formula(_strip_comments(text))
    verdict = qcheck.is_quasitautology(formula)
    if config.fmt == "records":
        return (0 if verdict else 1,
                [_record(verdict="quasitautology" if verdict else "not-quasitautology")])
    return (0 if verdict else 1,
            ["QUASITAUTOLOGY" if verdict else "NOT A QUASITAUTOLOGY"])


def _cmd_skeleton(config: RunConfig, text: str) -> tuple[int, list[str]]:
    psi = skeleton.existential_of(parse_formula(_strip_comments(text)))
    sk = skeleton.make_skeleton(psi, config.n)
    rendered = print_formula(sk.formula)
    if config.fmt == "records":
        return 0, [_record(verdict="skeleton", witness=rendered)]
    return 0, [rendered]


def _cmd_solve(config: RunConfig, text: str) -> tuple[int, list[str]]:
    psi = skeleton.existential_of(parse_formula(_strip_comments(text)))
    sk = skeleton.make_skeleton(psi, config.n)
    solution = skeleton.solve_bounded(sk, max_size=config.max_size)
    if solution is None:
        if config.fmt == "records":
            return 1, [_record(verdict="no-solution")]
        return 1, [f"NO SOLUTION WITHIN BOUND {config.max_size}"]
    if config.fmt == "records":
        return 0, [_record(verdict="solved", witness=_witness_text(solution))]
    lines = [f"*{u.index} := {print_term(t)}"
             for u, t in sorted(solution.bindings.items(),
                                key=lambda kv: _unknown_sort(kv[0]))]
    return 0, lines


def _constraint_text(c: sreu.RigidConstraint) -> str:
    conclusion = f"{print_term(c.conclusion.lhs)} = {print_term(c.conclusion.rhs)}"
    if not c.hypotheses:
        return conclusion
    hyps = " & ".join(f"{print_term(h.lhs)} = {print_term(h.rhs)}" for h in c.hypotheses)
    return f"{hyps} -> {conclusion}"


def _cmd_sreu(config: RunConfig, text: str) -> tuple[int, list[str]]:
    formula = parse_formula(_strip_comments(text))
    problems = sreu.convert_to_sreu(formula)
    lines: list[str] = []
    any_solved = False
    for i, problem in enumerate(problems, start=1):
        if config.fmt == "records":
            witness = " & ".join(f"({_constraint_text(c)})" for c in problem.constraints)
            lines.append(_record(problem_index=str(i), verdict="sreu", witness=witness))
        else:
            for j, constraint in enumerate(problem.constraints, start=1):
                lines.append(f"[{i}.{j}] {_constraint_text(constraint)}")
        if config.solve:
            solution = sreu.solve_sreu_bounded(problem, max_size=config.max_size)
            if solution is not None:
                any_solved = True
            if config.fmt == "records":
                if solution is None:
                    lines.append(_record(problem_index=str(i), verdict="no-solution"))
                else:
                    lines.append(_record(problem_index=str(i), verdict="solved",
                                         witness=_witness_text(solution)))
            else:
                if solution is None:
                    lines.append(f"[{i}] NO SOLUTION WITHIN BOUND {config.max_size}")
                else:
                    lines.append(f"[{i}] SOLVED {_witness_text(solution)}")
    if config.solve:
        return (0 if any_solved else 1), lines
    return (0 if problems else 1), lines


def _cmd_encode(config: RunConfig, text: str) -> tuple[int, list[str]]:
    system = arith.parse_diophantine(text)
    if config.m is not None:
        variables = system.variables()
        if not variables:
            raise _UsageError("-m needs a free variable to instantiate")
        psi = arith.reduction_f(system, variables[0], config.m, config.n)
    else:
        phi = arith.associate(system)
        if config.n == 1:
            matrix = phi.formula()
            bound = [*phi.numeric_vars(), *phi.table_vars()]
        else:
            assigned = arith.assign_n(phi, config.n)
            matrix = assigned.formula()
            bound = [v for variant in assigned.variants
                     for v in (*variant.numeric_vars(), *variant.table_vars())]
        psi = skeleton.ExistentialFormula(tuple(bound), matrix)
    rendered = print_formula(_close_existentially(psi))
    if config.fmt == "records":
        return 0, [_record(verdict="ok", witness=rendered)]
    return 0, [rendered]


def _close_existentially(psi: skeleton.ExistentialFormula):
    from .syntax import Exists

    out = psi.matrix
    for v in reversed(psi.bound_vars):
        out = Exists(v, out)
    return out


def _cmd_eval(config: RunConfig, text: str) -> tuple[int, list[str]]:
    formula = parse_formula(_strip_comments(text))
    if config.structure == "two-point":
        structure = models.two_point_structure()
    elif config.structure == "table":
        structure = models.table_structure()
    elif config.structure == "m-alpha":
        structure = models.m_alpha(_parse_alpha_bindings(config.alpha))
    else:
        raise _UsageError(f"unknown structure {config.structure!r}")
    verdict = models.holds(structure, formula)
    if config.fmt == "records":
        return (0 if verdict else 1, [_record(verdict="true" if verdict else "false")])
    return (0 if verdict else 1, ["TRUE" if verdict else "FALSE"])


def _cmd_countermodel(config: RunConfig, text: str) -> tuple[int, list[str]]:
    from .syntax import flatten_or

    formula = parse_formula(_strip_comments(text))
    disjuncts = flatten_or(formula)
    failures: list[tuple[int, models.Diagnosis]] = []
    for i, disjunct in enumerate(disjuncts, start=1):
        instance = arith.recognize_instance(disjunct)
        if qcheck.is_quasitautology(instance.formula()):
            if config.fmt == "records":
                return 1, [_record(verdict="valid-disjunct", problem_index=str(i))]
            return 1, [f"VALID DISJUNCT {i}"]
        failures.append((instance.language_index,
                         arith.classify_failures(instance)))
    alpha = models.construct_alpha(failures)
    structure = models.m_alpha(alpha)
    for disjunct in disjuncts:
        if models.holds(structure, disjunct):
            raise ContractError("assignment failed to falsify a disjunct")
    alpha_text = ";".join(f"{sym.name}:={_alpha_value_text(v)}" for sym, v in alpha.items())
    if config.fmt == "records":
        return 0, [_record(verdict="falsified", alpha=alpha_text)]
    lines = [f"alpha {sym.name} = {_alpha_value_text(v)}" for sym, v in alpha.items()]
    lines.append("FALSIFIED")
    return 0, lines


_COMMANDS = {
    "check": _cmd_check,
    "skeleton": _cmd_skeleton,
    "solve": _cmd_solve,
    "sreu": _cmd_sreu,
    "encode": _cmd_encode,
    "eval": _cmd_eval,
    "countermodel": _cmd_countermodel,
}


def run(config: RunConfig, text: str) -> tuple[int, str]:
    """Dispatch one command on the given input text; returns exit status and
    the full output (one line per result, trailing newline when nonempty)."""
    handler = _COMMANDS.get(config.command)
    if handler is None:
        raise _UsageError(f"unknown command {config.command!r}")
    status, lines = handler(config, text)
    return status, "".join(f"{line}\n" for line in lines)


def _build_argparser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsk",
        description="Herbrand skeleton toolkit: validity checking, bounded "
                    "skeleton solving, rigid constraint conversion, arithmetic "
                    "encodings and countermodels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_input: bool = True) -> None:
        p.add_argument("--format", choices=("text", "records"), default="text")
        if with_input:
            p.add_argument("input", help="input file, or - for standard input")

    p = sub.add_parser("check", help="decide validity of a ground formula")
    common(p)
    p = sub.add_parser("skeleton", help="emit the size-n skeleton")
    p.add_argument("-n", type=int, default=1)
    common(p)
    p = sub.add_parser("solve", help="search the size-n skeleton within a size bound")
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--max-size", type=int, default=6)
    common(p)
    p = sub.add_parser("sreu", help="convert to rigid constraint problems")
    p.add_argument("--solve", action="store_true")
    p.add_argument("--max-size", type=int, default=6)
    common(p)
    p = sub.add_parser("encode", help="encode a diophantine system")
    p.add_argument("--dioph", required=True, metavar="FILE",
                   help="diophantine system file, or - for standard input")
    p.add_argument("-n", type=int, default=1)
    p.add_argument("-m", type=int, default=None)
    common(p, with_input=False)
    p = sub.add_parser("eval", help="evaluate in an explicit structure")
    p.add_argument("--structure", choices=("two-point", "table", "m-alpha"),
                   default="two-point")
    p.add_argument("--alpha", action="append", default=[],
                   metavar="NAME=VAL", help="special constant value, NAT or J(j,k)")
    common(p)
    p = sub.add_parser("countermodel",
                       help="falsify a disjunction of variant instances")
    common(p)
    return parser


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _diagnose(message: str) -> None:
    prefix = "error:"
    if os.environ.get("HSK_COLOR") == "1":
        prefix = "\x1b[31merror:\x1b[0m"
    print(f"{prefix} {message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = _build_argparser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return 2 if stop.code not in (0, None) else 0
    config = RunConfig(
        command=args.command,
        n=getattr(args, "n", 1),
        max_size=getattr(args, "max_size", 6),
        structure=getattr(args, "structure", "two-point"),
        alpha=list(getattr(args, "alpha", [])),
        fmt=args.format,
        solve=getattr(args, "solve", False),
        m=getattr(args, "m", None),
    )
    path = args.dioph if config.command == "encode" else args.input
    try:
        text = _read_input(path)
    except OSError as err:
        _diagnose(str(err))
        return 2
    try:
        status, output = run(config, text)
    except ParseError as err:
        _diagnose(str(err))
        return 2
    except (_UsageError, ContractError) as err:
        _diagnose(str(err))
        return 2
    print(output, end="")
    return status


if __name__ == "__main__":
    sys.exit(main())
