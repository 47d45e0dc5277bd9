"""The shipped prelude and corpus, the manifest, and its verifier."""

from __future__ import annotations

import csv
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import syntax as S
from .driver import STACK_BYTES, FileResult, check_file, check_files, run_with_big_stack
from .kernel import CheckedModule

PACKAGE_DIR = Path(__file__).resolve().parent
PRELUDE_DIR = PACKAGE_DIR / "prelude"
CORPUS_DIR = PACKAGE_DIR / "corpus"
DEFAULT_MANIFEST = CORPUS_DIR / "MANIFEST.tsv"

# Dependency order, with what each file provides.
PRELUDE_MANIFEST: tuple[tuple[str, str], ...] = (
    ("nat.hct", "natural-number arithmetic"),
    ("paths.hct", "path composition, inverse, ap, transport, happly, coercion"),
    ("logic.hct", "negation, propositions, sets, decidability, LEM, DNE, WLEM, logical equivalence"),
    ("equiv.hct", "equivalences, their inverses and composition"),
    ("hedberg.hct", "decidable equality of Bool, Hedberg's theorem, isolated points"),
    ("axioms.hct", "shapes of the extensionality and univalence hypotheses"),
)

# Names of the axiom shapes; a result assumes one exactly when it appears in
# its stated type.
AXIOM_SHAPES = frozenset({
    "Funext", "Funext0", "PropExt", "UAforward", "UAbeta", "TruncFunextHypothesis",
    "PropExt1", "UAforward1",
})

MANIFEST_HEADER = ("result-id", "file", "theorem-names", "required-axioms")
SUPPORT_PREFIX = "support"
NONE_MARK = "-"


class ManifestError(Exception):
    category = "ManifestError"


class MissingEntry(ManifestError):
    category = "MissingEntry"


@dataclass(frozen=True)
class ManifestEntry:
    result_id: str
    file: str
    theorems: tuple[str, ...]
    axioms: tuple[str, ...]

    @property
    def is_support(self) -> bool:
        return self.result_id.startswith(SUPPORT_PREFIX)


@dataclass
class EntryResult:
    entry: ManifestEntry
    status: str  # PASS | FAIL
    category: Optional[str] = None  # failure category: CheckFailure | AxiomDrift | MissingTheorem
    found_axioms: tuple[str, ...] = ()
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "PASS"


@dataclass
class NegativeResult:
    path: str
    expected: str
    actual: Optional[str]
    message: str = ""
    detail: Optional[str] = None  # text the diagnostic must contain

    @property
    def ok(self) -> bool:
        return self.actual == self.expected and (self.detail is None or self.detail in self.message)


@dataclass
class CorpusReport:
    prelude: list[FileResult] = field(default_factory=list)
    files: list[FileResult] = field(default_factory=list)
    entries: list[EntryResult] = field(default_factory=list)
    negatives: list[NegativeResult] = field(default_factory=list)
    postulates: int = 0

    @property
    def ok(self) -> bool:
        return (all(r.ok for r in self.prelude) and all(r.ok for r in self.files)
                and all(e.ok for e in self.entries) and all(n.ok for n in self.negatives)
                and self.postulates == 0)

    def to_json(self) -> dict:
        def file_json(r: FileResult) -> dict:
            return {
                "file": r.path, "status": r.status, "millis": round(r.millis, 3),
                "declarations": len(r.declarations), "postulates": list(r.postulates),
                "diagnostics": [diagnostic_json(d) for d in r.diagnostics],
            }

        return {
            "status": "PASS" if self.ok else "FAIL",
            "postulates": self.postulates,
            "prelude": [file_json(r) for r in self.prelude],
            "files": [file_json(r) for r in self.files],
            "entries": [{
                "result_id": e.entry.result_id, "file": e.entry.file, "status": e.status,
                "category": e.category, "theorems": list(e.entry.theorems),
                "required_axioms": list(e.entry.axioms), "found_axioms": list(e.found_axioms),
                "message": e.message,
            } for e in self.entries],
            "negatives": [{
                "file": n.path, "status": "PASS" if n.ok else "FAIL",
                "expected": n.expected, "detail": n.detail, "actual": n.actual, "message": n.message,
            } for n in self.negatives],
        }


def diagnostic_json(d) -> dict:
    s = d.span
    return {
        "phase": d.phase, "category": d.category, "message": d.message,
        "file": s.file, "line": s.start_line, "col": s.start_col,
        "expected": d.expected, "actual": d.actual,
    }


# --- manifest ----------------------------------------------------------------------


def _split_list(cell: str) -> tuple[str, ...]:
    cell = cell.strip()
    if cell in ("", NONE_MARK):
        return ()
    return tuple(x.strip() for x in cell.split(",") if x.strip())


def parse_manifest(path) -> list[ManifestEntry]:
    """Read a tab-separated manifest. Raises ManifestError on malformed rows and
    MissingEntry when a listed file does not exist next to the manifest."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ManifestError(f"cannot read manifest {path}: {err.strerror}") from None
    rows = [r for r in csv.reader(text.splitlines(), delimiter="\t") if r and any(c.strip() for c in r)]
    if not rows or tuple(c.strip() for c in rows[0]) != MANIFEST_HEADER:
        raise ManifestError(f"{path}: header must be {' / '.join(MANIFEST_HEADER)}")
    entries, seen = [], set()
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(MANIFEST_HEADER):
            raise ManifestError(f"{path}:{lineno}: expected {len(MANIFEST_HEADER)} columns, got {len(row)}")
        rid, file, names, axioms = (c.strip() for c in row)
        if rid in seen:
            raise ManifestError(f"{path}:{lineno}: duplicate result-id {rid}")
        seen.add(rid)
        unknown = set(_split_list(axioms)) - AXIOM_SHAPES
        if unknown:
            raise ManifestError(f"{path}:{lineno}: unknown axiom(s) {', '.join(sorted(unknown))}")
        entry = ManifestEntry(rid, file, _split_list(names), _split_list(axioms))
        if not entry.is_support and not entry.theorems:
            raise ManifestError(f"{path}:{lineno}: {rid} names no theorem")
        if not (path.parent / file).is_file():
            raise MissingEntry(f"MissingEntry: {rid} names {file}, which does not exist")
        entries.append(entry)
    return entries


# --- axiom hygiene ----------------------------------------------------------------


def stated_axioms(module: CheckedModule, name: str) -> tuple[str, ...]:
    """Axiom shapes a global assumes: those reachable from its stated type
    through the definitions it mentions (an axiom shape's own body is not
    followed)."""
    found, seen = set(), set()
    todo = list(S.global_refs(module[name].type_term))
    while todo:
        g = todo.pop()
        if g in seen:
            continue
        seen.add(g)
        if g in AXIOM_SHAPES:
            found.add(g)
            continue
        entry = module.entries.get(g)
        if entry is not None and entry.body_term is not None:
            todo.extend(S.global_refs(entry.body_term))
    return tuple(sorted(found))


def verify_entry(entry: ManifestEntry, result: FileResult, module: CheckedModule) -> EntryResult:
    if not result.ok:
        first = result.diagnostics[0].format() if result.diagnostics else "file failed"
        return EntryResult(entry, "FAIL", "CheckFailure", message=first)
    if result.postulates:
        return EntryResult(entry, "FAIL", "AxiomDrift",
                           message=f"AxiomDrift: {entry.file} declares postulate(s) {', '.join(result.postulates)}")
    missing = [n for n in entry.theorems if n not in result.declarations]
    if missing:
        return EntryResult(entry, "FAIL", "MissingTheorem",
                           message=f"{entry.file} does not define {', '.join(missing)}")
    required = set(entry.axioms)
    found: set = set()
    for n in entry.theorems:
        mine = set(stated_axioms(module, n))
        found |= mine
        if mine != required:
            return EntryResult(entry, "FAIL", "AxiomDrift", tuple(sorted(found)),
                               f"AxiomDrift: {n} assumes {_show(mine)}, manifest requires {_show(required)}")
    return EntryResult(entry, "PASS", None, tuple(sorted(found)))


def _show(names) -> str:
    return ", ".join(sorted(names)) or "none"


# --- runs ---------------------------------------------------------------------------


def prelude_paths() -> list[Path]:
    return [PRELUDE_DIR / f for f, _ in PRELUDE_MANIFEST]


def check_prelude() -> tuple[CheckedModule, list[FileResult]]:
    return check_files(prelude_paths())


EXPECT = re.compile(r"^--\s*expect:\s*(\w+)[ \t]*(?:\(([^)\n]*)\))?", re.M)


def expected_failure(path) -> tuple[Optional[str], Optional[str]]:
    """The ``-- expect: Category (detail)`` directive of a negative file."""
    m = EXPECT.search(Path(path).read_text(encoding="utf-8"))
    return (m.group(1), m.group(2)) if m else (None, None)


def run_negative(module: CheckedModule, path) -> NegativeResult:
    expected, detail = expected_failure(path)
    _, r = check_file(module, path)
    if r.ok:
        return NegativeResult(str(path), expected or "?", None, "accepted", detail)
    d = r.diagnostics[0]
    return NegativeResult(str(path), expected or "?", d.category or d.phase, d.format(), detail)


def _check_parallel(base: CheckedModule, paths: list[Path], jobs: int) -> list[tuple[CheckedModule, FileResult]]:
    if jobs <= 1 or len(paths) <= 1:
        return [check_file(base, p) for p in paths]
    old = threading.stack_size()
    threading.stack_size(STACK_BYTES)
    try:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(check_file, base, p) for p in paths]
            return [f.result() for f in futures]
    finally:
        threading.stack_size(old)


def run_corpus(manifest=DEFAULT_MANIFEST, jobs: int = 1, negatives: bool = True) -> CorpusReport:
    """Check the prelude, then the manifest's files, then verify every entry.

    Support files are checked first, in manifest order, into the shared
    module; the remaining files are independent of each other and are checked
    against that module (concurrently when ``jobs > 1``). The report lists
    files and entries in manifest order. Raises ManifestError."""
    manifest = Path(manifest)
    entries = parse_manifest(manifest)
    root = manifest.parent
    report = CorpusReport()

    def body():
        module, report.prelude = check_prelude()
        support = _unique(e.file for e in entries if e.is_support)
        rest = [f for f in _unique(e.file for e in entries) if f not in support]
        by_file: dict[str, tuple[CheckedModule, FileResult]] = {}
        for f in support:
            module, r = check_file(module, root / f, f)
            by_file[f] = (module, r)
        for f, res in zip(rest, _check_parallel(module, [root / f for f in rest], jobs)):
            res[1].path = f
            by_file[f] = res
        report.files = [by_file[f][1] for f in _unique(e.file for e in entries)]
        report.entries = [verify_entry(e, by_file[e.file][1], by_file[e.file][0]) for e in entries]
        report.postulates = (sum(len(r.postulates) for r in report.prelude)
                             + sum(len(r.postulates) for r in report.files))
        neg_dir = root / "neg"
        if negatives and neg_dir.is_dir():
            report.negatives = [run_negative(module, p) for p in sorted(neg_dir.glob("*.hct"))]

    run_with_big_stack(body)
    return report


def _unique(items) -> list:
    out: list = []
    for x in items:
        if x not in out:
            out.append(x)
    return out
