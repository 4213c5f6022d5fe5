# Copyright 2026 The ProbPol Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
# End-to-end smoke test for the probpol CLI. Usage:
#   python3 cli_smoke.py <probpol-binary> <corpus-dir>

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

BINARY = Path(sys.argv[1])
CORPUS = Path(sys.argv[2])

failures = []


def run(*args, stdin=None):
    return subprocess.run(
        [str(BINARY), *map(str, args)],
        capture_output=True,
        text=True,
        input=stdin,
    )


def check(label, ok, detail=""):
    print(("PASS " if ok else "FAIL ") + label + (f" -- {detail}" if detail else ""))
    if not ok:
        failures.append(label)


def main():
    tmp = Path(tempfile.mkdtemp(prefix="probpol_cli_"))
    listing = CORPUS / "listing1.srdsl"
    tests_file = CORPUS / "keyword_tests.srdsl"

    # check: warnings alone keep exit 0; --strict flips it.
    r = run("check", listing)
    check("check exits 0 on a warning-only file", r.returncode == 0)
    check("check prints the guard warning", "PP301" in r.stdout)

    r = run("check", "--strict", listing)
    check("check --strict fails on warnings", r.returncode == 1)

    r = run("check", "--format", "json", listing)
    diags = json.loads(r.stdout)
    check(
        "check --format json emits structured diagnostics",
        r.returncode == 0
        and isinstance(diags, list)
        and any(d["code"] == "PP301" and "fix" in d for d in diags),
    )

    # check --fix on a scratch copy: guard inserted, then clean under --strict.
    scratch = tmp / "listing1.srdsl"
    shutil.copy(listing, scratch)
    r = run("check", "--fix", scratch)
    fixed_text = scratch.read_text()
    check(
        "check --fix inserts the missing guard",
        r.returncode == 0 and 'AND NOT domain("math")' in fixed_text,
    )
    r = run("check", "--strict", scratch)
    check("fixed file passes --strict", r.returncode == 0)

    # Errors exit 1 with a diagnostic.
    bad = tmp / "bad.srdsl"
    bad.write_text('ROUTE r { PRIORITY 1 WHEN domain("ghost") MODEL "m" }\n')
    r = run("check", bad)
    check("check exits 1 on reference errors", r.returncode == 1 and "PP101" in r.stdout)
    r = run("check", tmp / "missing.srdsl")
    check("check exits 2 on unreadable input", r.returncode == 2)

    # compile -> decompile -> compile is a fixed point.
    cfg = tmp / "listing1.json"
    r = run("compile", listing, "--out", cfg)
    doc = json.loads(cfg.read_text())
    check("compile writes a version-1 config", r.returncode == 0 and doc["version"] == 1)

    dsl2 = tmp / "roundtrip.srdsl"
    r = run("decompile", cfg, "--out", dsl2)
    check("decompile reconstructs DSL source", r.returncode == 0 and "ROUTE" in dsl2.read_text())
    r = run("compile", dsl2)
    check(
        "recompiled config is byte-identical",
        r.returncode == 0 and r.stdout == cfg.read_text(),
    )
    r = run("decompile", bad)
    check("decompile rejects non-JSON input", r.returncode == 1)

    # test: TAP output, and exit 2 when no TEST blocks exist.
    r = run("test", tests_file)
    lines = r.stdout.splitlines()
    check(
        "test emits passing TAP output",
        r.returncode == 0
        and lines
        and lines[0].startswith("1..")
        and all(l.startswith("ok ") for l in lines[1:]),
        r.stdout.replace("\n", " | "),
    )
    r = run("test", listing)
    check("test exits 2 when no TEST blocks exist", r.returncode == 2)

    # conflicts: clean file passes; engineered shadowing pair fails.
    r = run("conflicts", listing)
    check("conflicts exits 0 on a clean file", r.returncode == 0)

    shadowed = tmp / "shadowed.srdsl"
    shadowed.write_text(
        'SIGNAL keyword k { terms: ["x"] }\n'
        'ROUTE wide { PRIORITY 20 WHEN keyword("k") OR NOT keyword("k") MODEL "a" }\n'
        'ROUTE narrow { PRIORITY 10 WHEN keyword("k") MODEL "b" }\n'
    )
    r = run("conflicts", "--format", "json", shadowed)
    reports = json.loads(r.stdout)
    check(
        "conflicts reports shadowing with exit 1",
        r.returncode == 1 and any(rep["kind"] == "shadowing" for rep in reports),
    )

    # simulate: both modes produce a histogram covering every query.
    trace = tmp / "trace.txt"
    trace.write_text("integrate x squared\nphotosynthesis in plants\nhello there\n" * 5)
    for mode in ("independent", "voronoi"):
        r = run("simulate", "--mode", mode, listing, trace)
        summary = json.loads(r.stdout)
        check(
            f"simulate --mode {mode} accounts for every query",
            r.returncode == 0
            and summary["query_count"] == 15
            and sum(summary["route_histogram"].values()) == 15,
        )

    # explain: per-signal table plus a decision line.
    gate = CORPUS / "authz_gate.srdsl"
    r = run("explain", gate, "please drop table users", "--attrs",
            '{"admin_user": 1, "on_corp_network": 1}')
    check(
        "explain honors --attrs and prints a decision",
        r.returncode == 0
        and "FIRED" in r.stdout
        and r.stdout.strip().endswith("decision: admin_console"),
        r.stdout.splitlines()[-1] if r.stdout else "",
    )
    r = run("explain", gate, "please drop table users")
    check(
        "explain without attrs falls through to the block route",
        r.returncode == 0 and r.stdout.strip().endswith("decision: blocked_destructive"),
    )

    shutil.rmtree(tmp)
    if failures:
        print(f"{len(failures)} smoke checks failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
