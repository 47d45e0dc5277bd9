"""Command-line driver: ``check``, ``normalize`` and ``corpus``.

Exit codes: 0 success, 1 verification failure, 2 usage, IO or manifest error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import nbe as N
from .corpus import DEFAULT_MANIFEST, ManifestError, diagnostic_json, prelude_paths, run_corpus
from .driver import FileResult, check_file, run_with_big_stack
from .kernel import CheckedModule, Checker, Context, KernelError, normalize_entry
from .parser import HctError, parse_term, resolve_term
from .printer import pretty_print
from .syntax import SourceSpan

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hct", description="Proof checker for .hct files.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check files in order into one growing module")
    c.add_argument("files", nargs="+", type=Path)
    c.add_argument("--prelude", action="store_true", help="check the shipped prelude first")
    c.add_argument("--json", action="store_true", help="print a JSON report")

    n = sub.add_parser("normalize", help="print the normal form of a definition or expression")
    n.add_argument("files", nargs="*", type=Path, help="files to load first")
    n.add_argument("target", help="a global name or an expression")
    n.add_argument("--prelude", action="store_true", help="load the shipped prelude first")
    n.add_argument("--at", metavar="TYPE", help="check the expression against TYPE instead of inferring")
    n.add_argument("--type", action="store_true", help="also print the normalized type")

    k = sub.add_parser("corpus", help="check the prelude and the corpus against a manifest")
    k.add_argument("--manifest", type=Path, default=DEFAULT_MANIFEST)
    k.add_argument("--jobs", type=int, default=1, metavar="N")
    k.add_argument("--json", action="store_true", help="print a JSON report")
    return p


# --- check ----------------------------------------------------------------------------


def _load(paths: Sequence[Path], module: Optional[CheckedModule] = None) -> tuple[CheckedModule, list[FileResult]]:
    module = module or CheckedModule()
    results = []
    for p in paths:
        try:
            module, r = check_file(module, p, str(p))
        except OSError as err:
            raise UsageError(f"{p}: {err.strerror or err}") from None
        results.append(r)
    return module, results


def _paths(args) -> list[Path]:
    return (prelude_paths() if args.prelude else []) + list(args.files)


def _file_json(r: FileResult) -> dict:
    return {"file": r.path, "status": r.status, "millis": round(r.millis, 3),
            "declarations": len(r.declarations), "postulates": list(r.postulates),
            "diagnostics": [diagnostic_json(d) for d in r.diagnostics]}


def _report_files(results: list[FileResult], out, err) -> None:
    for r in results:
        print(f"{r.status} {r.path} ({len(r.declarations)} declarations, {r.millis:.0f} ms)", file=out)
        for d in r.diagnostics:
            print(d.format(), file=err)
            if d.expected is not None:
                print(f"  expected: {d.expected}\n  actual:   {d.actual}", file=err)


def cmd_check(args, out, err) -> int:
    _, results = _load(_paths(args))
    tally = sum(len(r.postulates) for r in results)
    ok = all(r.ok for r in results)
    if args.json:
        doc = {"status": "PASS" if ok else "FAIL", "postulates": tally, "files": [_file_json(r) for r in results]}
        print(json.dumps(doc, indent=2), file=out)
        for r in results:
            for d in r.diagnostics:
                print(d.format(), file=err)
    else:
        _report_files(results, out, err)
        print(f"{'PASS' if ok else 'FAIL'}: {len(results)} file(s), {tally} postulate(s)", file=out)
    return EXIT_OK if ok else EXIT_FAIL


# --- normalize --------------------------------------------------------------------------


def cmd_normalize(args, out, err) -> int:
    module, results = _load(_paths(args))
    failed = [r for r in results if not r.ok]
    if failed:
        _report_files(failed, out, err)
        return EXIT_FAIL
    names = module.names()
    target = args.target.strip()
    ck, ctx = Checker(module), Context()
    if target in module:
        nf = normalize_entry(module, target)
        T = module[target].type_value
    else:
        try:
            term = resolve_term(parse_term(target, "<expression>"), module)
            if args.at is not None:
                ty = resolve_term(parse_term(args.at, "<type>"), module)
                ck.check_type(ctx, ty)
                T = ck.eval(ctx, ty)
                ck.check(ctx, term, T)
            else:
                T = ck.infer(ctx, term)
        except HctError as e:
            print(e.diagnostic.format(), file=err)
            return EXIT_USAGE if e.diagnostic.phase == "scope" else EXIT_FAIL
        except KernelError as e:
            span = e.span or SourceSpan("<expression>", 1, 1, 1, 1)
            print(f"{span.file}:{span.start_line}:{span.start_col}: error: {e.message}", file=err)
            return EXIT_FAIL
        nf = N.readback(0, ck.eval(ctx, term), T)
    print(pretty_print(nf, [], names), file=out)
    if args.type:
        print(f": {pretty_print(N.readback_type(0, T), [], names)}", file=out)
    return EXIT_OK


# --- corpus ---------------------------------------------------------------------------------


def cmd_corpus(args, out, err) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    try:
        report = run_corpus(args.manifest, jobs=args.jobs)
    except ManifestError as e:
        print(f"{args.manifest}: error: {e}", file=err)
        return EXIT_USAGE
    if args.json:
        print(json.dumps(report.to_json(), indent=2), file=out)
    else:
        _report_files(report.prelude + report.files, out, err)
        for e in report.entries:
            axioms = ", ".join(e.found_axioms) or "none"
            line = f"{e.status} {e.entry.result_id} [{axioms}]"
            print(line + (f": {e.message}" if e.message else ""), file=out)
        for n in report.negatives:
            got = n.actual or "accepted"
            print(f"{'PASS' if n.ok else 'FAIL'} rejects {n.path} (expected {n.expected}, got {got})", file=out)
        print(f"{'PASS' if report.ok else 'FAIL'}: {len(report.entries)} entries, "
              f"{len(report.negatives)} negative file(s), {report.postulates} postulate(s)", file=out)
    return EXIT_OK if report.ok else EXIT_FAIL


COMMANDS = {"check": cmd_check, "normalize": cmd_normalize, "corpus": cmd_corpus}


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors itself
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return run_with_big_stack(COMMANDS[args.command], args, out, err)
    except UsageError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE


def entry_point() -> None:
    sys.exit(main())
