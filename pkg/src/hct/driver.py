"""Checking whole files into a growing CheckedModule."""

from __future__ import annotations

import sys
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .kernel import CheckedModule, KernelError, check_declaration
from .parser import Diagnostic, HctError, ResolvedDecl, parse_module, resolve
from .syntax import InternalError, SourceSpan

STACK_BYTES = 512 * 1024 * 1024


def run_with_big_stack(fn: Callable, *args, **kwargs):
    """Run ``fn`` on a thread with a large stack; the checker recurses deeply."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 200_000))
    result: dict = {}

    def target():
        try:
            result["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised on the caller's thread
            result["error"] = exc

    old = threading.stack_size()
    threading.stack_size(STACK_BYTES)
    try:
        t = threading.Thread(target=target)
        t.start()
    finally:
        threading.stack_size(old)
    t.join()
    if "error" in result:
        raise result["error"]
    return result["value"]


@dataclass
class FileResult:
    path: str
    status: str  # PASS | FAIL
    diagnostics: list = field(default_factory=list)
    declarations: list = field(default_factory=list)
    postulates: list = field(default_factory=list)
    millis: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "PASS"


def kernel_diagnostic(err: KernelError, fallback: SourceSpan) -> Diagnostic:
    return Diagnostic("type", err.message, err.span or fallback, err.expected, err.actual,
                      category=err.category)


def check_decls(module: CheckedModule, decls: list[ResolvedDecl]) -> CheckedModule:
    for d in decls:
        try:
            module = check_declaration(module, d.name, d.type, d.body, d.span)
        except KernelError as err:
            raise HctError(kernel_diagnostic(err, d.span)) from None
        except (InternalError, RecursionError) as err:
            raise HctError(Diagnostic("type", f"internal error: {err}", d.span, category="InternalError")) from None
    return module


def check_text(module: CheckedModule, text, path: str) -> tuple[CheckedModule, FileResult]:
    """Elaborate one file's text on top of ``module``.

    Returns the module extended with every declaration that checked (up to the
    first error) and the per-file result."""
    start = time.perf_counter()
    result = FileResult(path, "PASS")
    try:
        decls = resolve(parse_module(text, path), module)
        result.declarations = [d.name for d in decls]
        result.postulates = [d.name for d in decls if d.is_postulate]
        for d in decls:
            module = check_decls(module, [d])
    except HctError as err:
        result.status = "FAIL"
        result.diagnostics.append(err.diagnostic)
    result.millis = (time.perf_counter() - start) * 1000
    return module, result


def check_file(module: CheckedModule, path, display: Optional[str] = None) -> tuple[CheckedModule, FileResult]:
    data = Path(path).read_bytes()
    return check_text(module, data, display or str(path))


def check_files(paths, module: Optional[CheckedModule] = None) -> tuple[CheckedModule, list[FileResult]]:
    module = module or CheckedModule()
    results = []
    for p in paths:
        module, r = check_file(module, p)
        results.append(r)
    return module, results
