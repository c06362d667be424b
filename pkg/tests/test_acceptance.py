"""Acceptance criteria 1-9 at their pinned tolerances.

Criteria 1-8 run the corresponding ``validate`` cases through the CLI and check
both the recorded tolerances and the wall-clock budget.  Criterion 9 reruns every
case into a second directory and compares the files byte for byte.  One
PASS/FAIL line per criterion is printed at the end of the module (also when run
as ``python tests/test_acceptance.py``).
"""
import io as _io
import json
import time
from contextlib import redirect_stdout
from pathlib import Path

import pytest

from eikonal.cli import main

CRITERIA = {
    1: ("semicircle density and edges", ["semicircle"], 5.0),
    2: ("Pastur residual", ["pastur-residual"], 10.0),
    3: ("Ginibre fields and Monte-Carlo", ["ginibre-fields", "ginibre-radial", "ginibre-overlap"],
        180.0),
    4: ("elliptic axes and invariants", ["elliptic"], 180.0),
    5: ("unitary diffusion", ["unitary"], 300.0),
    6: ("singular-value duality", ["duality"], None),
    7: ("HCIZ null bridge", ["hciz"], 120.0),
    8: ("bridge endpoints and reversal", ["bridge-endpoints"], None),
}
ALL_CASES = [c for _, cases, _ in CRITERIA.values() for c in cases]
RESULTS = {}


def _validate(case, out):
    buf = _io.StringIO()
    start = time.perf_counter()
    with redirect_stdout(buf):
        code = main(["validate", "--case", case, "--out", str(out)])
    elapsed = time.perf_counter() - start
    return code, json.loads(buf.getvalue().strip().splitlines()[-1]), elapsed


@pytest.fixture(scope="module")
def first_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("validate_a")
    runs = {case: _validate(case, out) for case in ALL_CASES}
    return out, runs


@pytest.fixture(scope="module", autouse=True)
def report(request):
    yield
    lines = [f"criterion {k}: {'PASS' if RESULTS.get(k, (False,))[0] else 'FAIL'}  "
             f"{CRITERIA[k][0] if k in CRITERIA else 'determinism'}  {RESULTS.get(k, (0, ''))[1]}"
             for k in range(1, 10)]
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_line("")
        for line in lines:
            reporter.write_line(line)
    else:
        print("\n".join(lines))


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, first_run):
    out, runs = first_run
    _, cases, budget = CRITERIA[number]
    failed, total = [], 0.0
    for case in cases:
        code, line, elapsed = runs[case]
        total += elapsed
        summary = json.loads((out / f"{case}.json").read_text())
        failed += [f"{case}: {c['label']} = {c['value']:.3e} (limit {c['limit']:.1e})"
                   for c in summary["checks"] if not c["ok"]]
        if code != 0:
            failed.append(f"{case}: exit {code}")
    if budget is not None and total > budget:
        failed.append(f"runtime {total:.1f}s over {budget:.0f}s")
    RESULTS[number] = (not failed, f"{total:.1f}s")
    assert not failed, "; ".join(failed)


def test_criterion_9_determinism(first_run, tmp_path):
    out_a, _ = first_run
    for case in ALL_CASES:
        _validate(case, tmp_path)
    files_a = sorted(p.relative_to(out_a) for p in out_a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(tmp_path) for p in tmp_path.rglob("*") if p.is_file())
    differ = [str(p) for p in files_a if (out_a / p).read_bytes() != (tmp_path / p).read_bytes()]
    ok = files_a == files_b and bool(files_a) and not differ
    RESULTS[9] = (ok, f"{len(files_a)} files")
    assert files_a == files_b and files_a
    assert not differ, differ


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
