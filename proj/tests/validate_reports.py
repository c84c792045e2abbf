#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Validate entropik JSON reports against schema/report.schema.json.

Usage: validate_reports.py <entropik binary>   (run from the source root)
"""
import copy
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

COMMANDS = [
    ["analyze", "models/gas1d.epk"],
    ["analyze", "models/gas1d.epk", "--method", "mueller-liu"],
    ["analyze", "models/fluid2d.epk"],
    ["compare", "models/fluid2d.epk"],
    ["compare", "models/nonsimple2d.epk"],
    ["split", "models/fluid2d.epk", "--depth", "2"],
    ["split", "models/fluid2d.epk", "--assume", "deta/dtheta = 0", "--assume", "deta/dtheta != 0"],
    ["verify", "models/gas1d.epk", "--trials", "20", "--bindings", "models/bindings/gas1d-ideal.bind"],
    ["verify", "models/fluid2d.epk", "--trials", "20"],
    ["check", "models/gas1d.epk", "models/bindings/gas1d-gamma3.bind"],
    ["check", "models/nonsimple2d.epk", "models/bindings/nonsimple2d-admissible.bind"],
]


def main() -> int:
    binary = sys.argv[1]
    schema = json.loads(pathlib.Path("schema/report.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0

    def validate(label, report):
        nonlocal failures
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        status = "ok" if not errors else "INVALID"
        print(f"{status:8} {label}")
        for e in errors[:5]:
            print(f"         {'/'.join(map(str, e.path))}: {e.message}")
        failures += bool(errors)

    reports = []
    for args in COMMANDS:
        for timings in ([], ["--no-timings"]):
            proc = subprocess.run([binary, *args, "--output", "json", *timings], capture_output=True, text=True)
            label = " ".join(args + timings)
            if proc.returncode != 0:
                print(f"FAILED   {label}: exit {proc.returncode}\n{proc.stderr}")
                failures += 1
                continue
            report = json.loads(proc.stdout)
            reports.append(report)
            validate(label, report)

    # Engine errors still produce a report, with exit code 2.
    with tempfile.NamedTemporaryFile("w", suffix=".bind", delete=False) as f:
        f.write("bind p = rho\nbind q1 = 0\nbind Phi1 = 0\n")
    proc = subprocess.run([binary, "check", "models/gas1d.epk", f.name, "--output", "json"],
                          capture_output=True, text=True)
    pathlib.Path(f.name).unlink()
    if proc.returncode != 2:
        print(f"FAILED   engine error report: exit {proc.returncode}")
        failures += 1
    else:
        validate("engine error report", json.loads(proc.stdout))

    for golden in sorted(pathlib.Path("tests/golden").glob("*.json")):
        validate(str(golden), json.loads(golden.read_text()))

    # The schema must reject malformed reports.
    base = reports[0]
    mutations = {
        "unknown top-level field": lambda r: r.update(extra=1),
        "bad fingerprint": lambda r: r.update(fingerprint="md5:abc"),
        "unknown command": lambda r: r.update(command="solve"),
        "missing errors": lambda r: r.pop("errors"),
        "expression without latex": lambda r: r["constraints"]["residual"].pop("latex"),
    }
    for label, mutate in mutations.items():
        bad = copy.deepcopy(base)
        mutate(bad)
        rejected = not validator.is_valid(bad)
        print(f"{'ok' if rejected else 'ACCEPTED':8} rejects {label}")
        failures += not rejected

    print(f"{failures} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
