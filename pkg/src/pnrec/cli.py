"""Command-line front end: ``pnrec <group> <command> [options]``.

Exit status is 0 when every check passes, 1 on a failed check or a
computation error, 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .graded import GradedAlgebraError, TruncationWindow
from .models import (
    Model,
    ModelError,
    build_s1_ch_model,
    build_s1_sft_model,
    dump_model,
    fingerprint,
    resolve_model,
    s1_closed_forms,
    s1_pure_t_normalization,
)
from .parser import ParseError, format_polynomial, parse_expression
from .poisson import (
    AmbiguousSolution,
    InconsistentSystem,
    NoSolutionWithinDegree,
    SeedNotCasimir,
    casimir_expand,
)
from .recursion import MissingPrimary, RingError, WindowTooSmall, ch_closed_form, verify_commuting
from .tensors import (
    TensorError,
    VectorField,
    apply_endomorphism,
    lie_bracket,
    lie_derivative_bivector,
    lie_derivative_endomorphism,
    nijenhuis_torsion,
)

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


class UsageError(Exception):
    pass


@dataclass
class Result:
    name: str
    status: str
    payload: dict = field(default_factory=dict)


@dataclass
class Report:
    command: list
    fingerprint: str | None
    results: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    text: str | None = None  # replaces the default text rendering

    def add(self, name, status, **payload):
        self.results.append(Result(name, status, payload))

    @property
    def ok(self) -> bool:
        return all(r.status != FAIL for r in self.results)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "fingerprint": self.fingerprint,
            "results": [{"name": r.name, "status": r.status, "payload": r.payload} for r in self.results],
            "timing": self.timing,
        }

    def to_text(self) -> str:
        lines = [f"command: {' '.join(self.command)}"]
        if self.fingerprint:
            lines.append(f"model: {self.fingerprint}")
        for r in self.results:
            lines.append(f"[{r.status}] {r.name}")
            for k, v in r.payload.items():
                if isinstance(v, (dict, list)):
                    v = json.dumps(v, sort_keys=True)
                lines.append(f"    {k} = {v}")
        lines.append(f"summary: {'pass' if self.ok else 'fail'}")
        return "\n".join(lines) + "\n"


def _field_payload(X: VectorField) -> dict:
    return {a: format_polynomial(X[a]) for a in X}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_s1_ch(args, report: Report):
    K, L = args.max_orbit, args.levels
    model = build_s1_ch_model(K)
    report.fingerprint = fingerprint(model)
    tower = model.ch_tower(L)
    c_table = lambda m: model.c_table(m, "1")  # noqa: E731
    for n in range(L + 1):
        X = tower.entry(n, "1")
        status = SKIPPED
        if args.verify:
            oracle = VectorField(model.table, {
                f"q{l}": s1_closed_forms("ch_field", n, l, K, model.table) for l in range(1, K + 1)})
            closed = ch_closed_form(model.N, model.primaries, c_table, n)
            status = PASS if X == oracle and X == closed else FAIL
        report.add(f"X_1,{n}", status, **_field_payload(X))
    if args.verify:
        rep = verify_commuting(None, tower)
        report.add("lie_commuting", PASS if rep.ok else FAIL, window=rep.window,
                   pairs=len(rep.pairs), nonzero=[f"{a}-{b}" for a, b, _ in rep.failures])


def cmd_s1_sft(args, report: Report):
    K, L = args.max_orbit, args.levels
    model = build_s1_sft_model(K)
    report.fingerprint = fingerprint(model)
    paper = args.normalization == "paper"
    norm = s1_pure_t_normalization(model) if paper else None
    tower = model.sft_tower(L, normalization=norm)
    for n in range(-1, L + 1):
        h = tower.entry(n, "1")
        W = tower.certified[n + 1]
        w = TruncationWindow(W)
        shown = h.truncate(w)
        status = SKIPPED
        if args.verify:
            oracle = s1_closed_forms("sft_hamiltonian", n, window=W, table=model.table, with_t=paper)
            status = PASS if shown == oracle else FAIL
        report.add(f"h_1,{n}", status, certified_window=W, h=format_polynomial(shown))
    if args.verify:
        rep = verify_commuting(model.structural_poisson, tower, args.window)
        report.add("poisson_commuting", PASS if rep.ok else FAIL, window=rep.window,
                   pairs=len(rep.pairs), nonzero=[f"{a}-{b}" for a, b, _ in rep.failures])


def cmd_check_torsion(args, report: Report):
    model = _load(args, report)
    if model.N is None:
        raise ModelError("endomorphism", "model has no (1,1)-tensor")
    T = nijenhuis_torsion(model.N)
    payload = {f"T^{a}_{b},{c}": format_polynomial(f) for (a, b, c), f in
               sorted(T.entries.items(), key=lambda kv: tuple(model.table.index(x) for x in kv[0]))}
    report.add("torsion", FAIL if payload else PASS, **(payload or {"residual": "0"}))


def cmd_check_lie(args, report: Report):
    model = _load(args, report)
    if model.N is not None:
        if not model.primaries:
            report.add("lie_derivative", SKIPPED, reason="model has no primary fields")
        for cls, X in sorted(model.primaries.items()):
            D = lie_derivative_endomorphism(X, model.N)
            report.add(f"lie_derivative_N[{cls}]", FAIL if D else PASS,
                       residual="0" if not D else {f"{lo}->{up}": format_polynomial(f)
                                                   for (lo, up), f in sorted(D.entries.items())})
            fields = [X]
            for _ in range(args.powers):
                fields.append(apply_endomorphism(model.N, fields[-1]))
            bad = [f"{i}-{j}" for i in range(len(fields)) for j in range(i + 1, len(fields))
                   if lie_bracket(fields[i], fields[j], (0, 0))]
            report.add(f"hereditary[{cls}]", FAIL if bad else PASS, powers=args.powers, nonzero=bad)
    if model.omega is not None:
        X0 = model.primaries.get(sorted(model.primaries)[0]) if model.primaries else VectorField(model.table)
        D = lie_derivative_bivector(X0, model.omega)
        report.add("lie_derivative_omega", FAIL if D else PASS,
                   field="0" if not X0 else "primary", residual="0" if not D else str(len(D.entries)))
    if model.N is None and model.omega is None:
        raise ModelError("", "model has neither a (1,1)-tensor nor an omega bivector")


def cmd_check_commute(args, report: Report):
    model = _load(args, report)
    if model.N is not None and model.primaries:
        tower = model.ch_tower(args.levels)
        rep = verify_commuting(None, tower)
    elif model.omega is not None:
        norm = s1_pure_t_normalization(model) if args.normalization == "paper" and "t1" in model.table else None
        tower = model.sft_tower(args.levels, normalization=norm)
        rep = verify_commuting(model.structural_poisson, tower, args.window)
    else:
        raise ModelError("", "model has no recursion data")
    for a, b, r in rep.pairs:
        res = format_polynomial(r) if hasattr(r, "terms") else ("0" if not r else "nonzero")
        report.add(f"[{_label(a)}, {_label(b)}]", FAIL if r else PASS, window=rep.window, residual=res)
    if not rep.pairs:
        report.add("commuting", PASS, window=rep.window, note="single entry, nothing to compare")


def _label(lab):
    n, cls = lab
    return f"{cls},{n}"


def cmd_pencil_expand(args, report: Report):
    model = _load(args, report, attr="pencil")
    if model.pencil is None:
        raise ModelError("pencil", "document has no pencil")
    seed = parse_expression(args.seed, model.table)
    tower = casimir_expand(model.pencil, seed, args.order, args.degree_bound, args.strict)
    levels = tower.levels
    for i, c in enumerate(levels):
        report.add(f"c_{i - 1}", PASS, value=format_polynomial(c))
    bad = []
    for which, B in (("P1", model.pencil.P1), ("P2", model.pencil.P2)):
        for i in range(len(levels)):
            for j in range(i + 1, len(levels)):
                if B.bracket(levels[i], levels[j]):
                    bad.append(f"{which}:{i - 1}-{j - 1}")
    report.add("tower_commutes", FAIL if bad else PASS, nonzero=bad)
    # each coefficient must satisfy the Lenard step against the previous one
    steps = [i for i in range(len(levels) - 1)
             if model.pencil.hamiltonian_field(1, levels[i + 1]) != model.pencil.hamiltonian_field(2, levels[i])]
    report.add("lenard_steps", FAIL if steps else PASS, failing=steps)
    report.add("resonance", PASS, flag=tower.resonance, kernel_dimensions=tower.kernel_dimensions)


def cmd_model_validate(args, report: Report):
    model = _load(args, report)
    report.add("valid", PASS, variables=len(model.table),
               tensors=[k for k, v in (("endomorphism", model.N), ("bivector", model.omega),
                                       ("ring", model.ring), ("pencil", model.pencil)) if v is not None])


def cmd_model_print(args, report: Report):
    model = _load(args, report)
    report.add("document", PASS, document=dump_model(model))
    report.text = json.dumps(dump_model(model), indent=2, sort_keys=True) + "\n"


def _load(args, report: Report, attr="model") -> Model:
    spec = getattr(args, attr)
    try:
        model = resolve_model(spec)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    report.fingerprint = fingerprint(model)
    return model


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _nonnegative(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON report")
    parser = _Parser(prog="pnrec", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    s1 = groups.add_parser("s1", help="the S^1 example towers").add_subparsers(
        dest="command", required=True, parser_class=_Parser)
    p = s1.add_parser("ch", parents=[common], help="contact-homology N-recursion")
    p.add_argument("--max-orbit", type=_positive, default=8)
    p.add_argument("--levels", type=_nonnegative, default=4)
    p.add_argument("--verify", action="store_true", help="compare with closed forms and check commutativity")
    p.set_defaults(func=cmd_s1_ch)
    p = s1.add_parser("sft", parents=[common], help="rational-SFT omega-recursion")
    p.add_argument("--max-orbit", type=_positive, default=12)
    p.add_argument("--levels", type=_nonnegative, default=2)
    p.add_argument("--window", type=_positive, default=None, help="orbit bound for the bracket check")
    p.add_argument("--normalization", choices=("paper", "zero"), default="paper",
                   help="pure-t part: t1^(n+2)/(n+2)! (paper) or 0")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_s1_sft)

    check = groups.add_parser("check", help="tensor identities").add_subparsers(
        dest="command", required=True, parser_class=_Parser)
    p = check.add_parser("torsion", parents=[common], help="Nijenhuis torsion of the model's N")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_check_torsion)
    p = check.add_parser("lie", parents=[common], help="Lie-derivative invariance and hereditary fields")
    p.add_argument("--model", required=True)
    p.add_argument("--powers", type=_nonnegative, default=3)
    p.set_defaults(func=cmd_check_lie)
    p = check.add_parser("commute", parents=[common], help="commutativity of a descendant tower")
    p.add_argument("--model", required=True)
    p.add_argument("--levels", type=_nonnegative, default=2)
    p.add_argument("--window", type=_positive, default=None)
    p.add_argument("--normalization", choices=("paper", "zero"), default="paper")
    p.set_defaults(func=cmd_check_commute)

    pencil = groups.add_parser("pencil", help="Poisson pencils").add_subparsers(
        dest="command", required=True, parser_class=_Parser)
    p = pencil.add_parser("expand", parents=[common], help="Lenard-Magri Casimir expansion")
    p.add_argument("--pencil", required=True, help="pencil document or builtin 'so3_const'")
    p.add_argument("--seed", required=True)
    p.add_argument("--order", type=_nonnegative, required=True)
    p.add_argument("--degree-bound", type=_positive, default=None)
    p.add_argument("--strict", action="store_true", help="fail on leftover kernel freedom")
    p.set_defaults(func=cmd_pencil_expand)

    model = groups.add_parser("model", help="model documents").add_subparsers(
        dest="command", required=True, parser_class=_Parser)
    p = model.add_parser("validate", parents=[common])
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_model_validate)
    p = model.add_parser("print", parents=[common])
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_model_print)
    return parser


def _check_threads():
    value = os.environ.get("PNREC_THREADS")
    if value is None:
        return
    try:
        ok = int(value) >= 1
    except ValueError:
        ok = False
    if not ok:
        raise UsageError(f"PNREC_THREADS must be a positive integer, got {value!r}")


COMPUTATION_ERRORS = (ModelError, ParseError, GradedAlgebraError, TensorError, RingError,
                      InconsistentSystem, SeedNotCasimir, NoSolutionWithinDegree, AmbiguousSolution,
                      WindowTooSmall, MissingPrimary, ValueError)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        _check_threads()
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    report = Report(["pnrec", *argv], None)
    start = time.perf_counter()
    try:
        args.func(args, report)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except COMPUTATION_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    report.timing = {"seconds": round(time.perf_counter() - start, 6)}
    if args.json:
        stdout.write(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    else:
        stdout.write(report.text or report.to_text())
    return 0 if report.ok else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
