import json

import pytest

from hct.corpus import (DEFAULT_MANIFEST, MANIFEST_HEADER, ManifestError, MissingEntry, expected_failure,
                        parse_manifest, run_corpus, stated_axioms)

from conftest import CORPUS_ROOT

HEADER = "\t".join(MANIFEST_HEADER)

# a tiny corpus: one support file and one result that uses an extensionality hypothesis
SUPPORT = "def idNat : Nat -> Nat := fun n => n;\n"
RESULT = """
def FunextAlias : U1 := Funext;
def uses_funext : FunextAlias -> Id (Nat -> Nat) idNat idNat := fun fe => refl (Nat -> Nat) idNat;
def plain : Id Nat (idNat zero) zero := refl Nat zero;
"""


def write_corpus(tmp_path, rows, files=None):
    files = files if files is not None else {"s/support.hct": SUPPORT, "s/result.hct": RESULT}
    for name, text in files.items():
        (tmp_path / name).parent.mkdir(parents=True, exist_ok=True)
        (tmp_path / name).write_text(text)
    manifest = tmp_path / "MANIFEST.tsv"
    manifest.write_text("\n".join([HEADER] + ["\t".join(r) for r in rows]) + "\n")
    return manifest


GOOD_ROWS = [
    ("support:ids", "s/support.hct", "-", "-"),
    ("res:funext", "s/result.hct", "uses_funext", "Funext"),
    ("res:plain", "s/result.hct", "plain", "-"),
]


# --- the manifest format ---------------------------------------------------------------


def test_shipped_manifest_parses():
    entries = parse_manifest(DEFAULT_MANIFEST)
    assert len(entries) == len({e.result_id for e in entries})
    assert all(e.theorems for e in entries if not e.is_support)
    assert all((CORPUS_ROOT / e.file).is_file() for e in entries)


def test_missing_file_is_a_missing_entry(tmp_path):
    m = write_corpus(tmp_path, GOOD_ROWS + [("res:gone", "s/gone.hct", "x", "-")])
    with pytest.raises(MissingEntry) as exc:
        parse_manifest(m)
    assert "res:gone" in str(exc.value)


@pytest.mark.parametrize("rows, fragment", [
    ([("a", "s/result.hct", "plain")], "columns"),
    ([("a", "s/result.hct", "plain", "-"), ("a", "s/result.hct", "plain", "-")], "duplicate"),
    ([("a", "s/result.hct", "plain", "Choice")], "unknown axiom"),
    ([("a", "s/result.hct", "-", "-")], "names no theorem"),
])
def test_malformed_manifests_are_rejected(tmp_path, rows, fragment):
    with pytest.raises(ManifestError) as exc:
        parse_manifest(write_corpus(tmp_path, rows))
    assert fragment in str(exc.value)


def test_bad_header_is_rejected(tmp_path):
    m = tmp_path / "MANIFEST.tsv"
    m.write_text("id\tfile\n")
    with pytest.raises(ManifestError):
        parse_manifest(m)


# --- verification --------------------------------------------------------------------------


def test_small_corpus_passes(tmp_path):
    report = run_corpus(write_corpus(tmp_path, GOOD_ROWS))
    assert report.ok, report.to_json()
    # FunextAlias hides Funext behind a definition; the closure still sees it
    assert [e.found_axioms for e in report.entries] == [(), ("Funext",), ()]


def test_stated_axioms_of_shipped_results(full_module):
    assert stated_axioms(full_module, "thm_swap10") == ("Funext", "PropExt")
    assert stated_axioms(full_module, "hedbergBool") == ()


@pytest.mark.parametrize("required", ["-", "Funext,PropExt", "Funext0"])
def test_wrong_axiom_list_is_drift(tmp_path, required):
    rows = GOOD_ROWS[:1] + [("res:funext", "s/result.hct", "uses_funext", required)]
    report = run_corpus(write_corpus(tmp_path, rows), negatives=False)
    (_, e) = report.entries
    assert not report.ok and e.category == "AxiomDrift" and "uses_funext" in e.message


def test_postulate_is_drift(tmp_path):
    files = {"s/support.hct": SUPPORT, "s/result.hct": RESULT + "postulate cheat : Id Nat zero (suc zero);\n"}
    report = run_corpus(write_corpus(tmp_path, GOOD_ROWS, files), negatives=False)
    assert report.postulates == 1 and not report.ok
    assert {e.category for e in report.entries[1:]} == {"AxiomDrift"}


def test_missing_theorem_is_reported(tmp_path):
    rows = GOOD_ROWS[:1] + [("res:x", "s/result.hct", "nowhere", "-")]
    (_, e) = run_corpus(write_corpus(tmp_path, rows), negatives=False).entries
    assert e.category == "MissingTheorem"


def test_failing_file_fails_its_entries(tmp_path):
    files = {"s/support.hct": SUPPORT, "s/result.hct": RESULT + "def bad : Nat := true;\n"}
    report = run_corpus(write_corpus(tmp_path, GOOD_ROWS, files), negatives=False)
    assert {e.category for e in report.entries[1:]} == {"CheckFailure"}


def test_negative_files_must_fail_as_announced(tmp_path):
    files = {"s/support.hct": SUPPORT, "s/result.hct": RESULT,
             "neg/wrong.hct": "-- expect: UniverseViolation\ndef x : Nat := true;\n",
             "neg/right.hct": "-- expect: TypeMismatch\ndef x : Nat := true;\n",
             "neg/accepted.hct": "-- expect: TypeMismatch\ndef x : Nat := zero;\n"}
    report = run_corpus(write_corpus(tmp_path, GOOD_ROWS, files))
    by_name = {n.path.rsplit("/", 1)[-1]: n for n in report.negatives}
    assert by_name["right.hct"].ok
    assert not by_name["wrong.hct"].ok and by_name["wrong.hct"].actual == "TypeMismatch"
    assert not by_name["accepted.hct"].ok and by_name["accepted.hct"].actual is None
    assert not report.ok


def test_expect_directive_with_detail(tmp_path):
    p = tmp_path / "n.hct"
    p.write_text("-- a comment\n-- expect: TypeMismatch (is-prop argument)\n")
    assert expected_failure(p) == ("TypeMismatch", "is-prop argument")


# --- the shipped corpus ---------------------------------------------------------------------


@pytest.fixture(scope="module")
def shipped_report():
    return run_corpus()


def test_shipped_corpus_passes(shipped_report):
    assert shipped_report.ok, json.dumps(shipped_report.to_json(), indent=1)[:4000]
    assert shipped_report.postulates == 0


def test_parallel_run_matches_sequential(shipped_report):
    par = run_corpus(jobs=4)

    def strip(j):
        for group in ("prelude", "files"):
            for f in j[group]:
                f.pop("millis")
        return j

    assert strip(par.to_json()) == strip(shipped_report.to_json())


def test_report_json_shape(shipped_report):
    j = json.loads(json.dumps(shipped_report.to_json()))
    assert set(j) == {"status", "postulates", "prelude", "files", "entries", "negatives"}
    assert len(j["entries"]) == len(parse_manifest(DEFAULT_MANIFEST))
    assert {n["expected"] for n in j["negatives"]} >= {"TypeMismatch", "UniverseViolation"}
