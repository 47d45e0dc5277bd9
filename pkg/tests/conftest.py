import functools
from dataclasses import dataclass
from pathlib import Path

import pytest

from hct.corpus import DEFAULT_MANIFEST, check_prelude, parse_manifest
from hct.driver import check_file, run_with_big_stack

CORPUS_ROOT = DEFAULT_MANIFEST.parent


def big_stack(fn):
    """Run a test body on a thread with the checker's deep stack."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return run_with_big_stack(fn, *args, **kwargs)

    return wrapper


@pytest.fixture(scope="session")
def prelude():
    module, results = run_with_big_stack(check_prelude)
    assert all(r.ok for r in results), [d.format() for r in results for d in r.diagnostics]
    return module


@pytest.fixture(scope="session")
def full_module(prelude):
    """The prelude extended with every manifest file, checked in manifest order."""

    def load():
        module = prelude
        seen = []
        for e in parse_manifest(DEFAULT_MANIFEST):
            if e.file in seen:
                continue
            seen.append(e.file)
            module, r = check_file(module, CORPUS_ROOT / e.file)
            assert r.ok, [d.format() for d in r.diagnostics]
        return module

    return run_with_big_stack(load)


def shipped_files() -> list[Path]:
    from hct.corpus import prelude_paths

    files = list(prelude_paths())
    for e in parse_manifest(DEFAULT_MANIFEST):
        if CORPUS_ROOT / e.file not in files:
            files.append(CORPUS_ROOT / e.file)
    return files


@dataclass(frozen=True)
class NormalFormCheck:
    name: str
    idempotent: bool
    rechecks: bool
    error: str = ""


def normal_form_checks_for(module, names=None) -> dict:
    """For each definition: is normalize idempotent, and does the normal form
    re-check against the stated type?"""
    from hct import nbe as N
    from hct.kernel import KernelError, check_closed, normalize_entry

    def work():
        out = {}
        for e in module:
            if e.is_postulate or (names is not None and e.name not in names):
                continue
            nf = normalize_entry(module, e.name)
            again = N.readback(0, N.evaluate((), nf, module.entries), e.type_value)
            try:
                check_closed(module, nf, e.type_term)
                ok, err = True, ""
            except KernelError as exc:
                ok, err = False, exc.message
            out[e.name] = NormalFormCheck(e.name, again == nf, ok, err)
        return out

    return run_with_big_stack(work)


@pytest.fixture(scope="session")
def normal_form_checks(full_module) -> dict:
    return normal_form_checks_for(full_module)


# --- acceptance summary ----------------------------------------------------------

ACCEPTANCE: dict = {}


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = ("PASS" if ok else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{status} criterion {n}: {detail}")
