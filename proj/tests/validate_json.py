#!/usr/bin/env python3
"""Runs the CLI on the samples and validates every JSON document against schemas/."""

import json
import pathlib
import subprocess
import sys
import tempfile

from jsonschema import Draft202012Validator
from referencing import Registry, Resource


def main() -> int:
    if len(sys.argv) != 3:
        print("usage: validate_json.py <datanet> <source-dir>", file=sys.stderr)
        return 64
    exe, root = sys.argv[1], pathlib.Path(sys.argv[2])
    samples, schemas = root / "samples", root / "schemas"

    registry = Registry()
    loaded = {}
    for path in schemas.glob("*.schema.json"):
        doc = json.loads(path.read_text())
        loaded[path.name] = doc
        registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))

    tmp = pathlib.Path(tempfile.mkdtemp(prefix="dnets_schema_"))
    s = lambda name: str(samples / name)
    cases = [
        ("trace.schema.json", ["simulate", s("fig1.dnet"), "--seed", "3", "--steps", "4", "--json"], 0),
        ("trace.schema.json", ["simulate", s("fig1.dnet"), "--script", "0,1", "--json"], 0),
        ("tree.schema.json", ["simulate", s("fig1.dnet"), "--exhaustive", "--depth", "1", "--json"], 0),
        ("tree.schema.json", ["simulate", s("fig1.dnet"), "--exhaustive", "--depth", "0", "--json"], 0),
        ("verdict.schema.json", ["analyze", s("consumer.dnet"), "--problem", "termination", "--json"], 0),
        ("verdict.schema.json", ["analyze", s("consumer.dnet"), "--problem", "boundedness", "--json"], 0),
        ("verdict.schema.json", ["analyze", s("pump.dnet"), "--problem", "termination", "--json"], 1),
        ("verdict.schema.json", ["analyze", s("pump.dnet"), "--problem", "boundedness", "--json"], 1),
        ("verdict.schema.json",
         ["analyze", s("consumer.dnet"), "--problem", "coverability", "--target", "p>=4", "--json"], 1),
        ("verdict.schema.json",
         ["analyze", s("fig1.dnet"), "--problem", "coverability", "--target", "p2>=3", "--json"], 0),
        ("compile.schema.json", ["compile-mm", s("add.mm"), "-o", str(tmp / "add.dnet"), "--json"], 0),
        ("verdict.schema.json",
         ["analyze", str(tmp / "add.dnet"), "--problem", "coverability", "--target", "qh>=1", "--json"], 0),
        ("verdict.schema.json",
         ["analyze", str(tmp / "add.dnet"), "--problem", "termination", "--json"], 0),
        ("case_report.schema.json", ["classify", "grid", "--json"], 0),
        ("case_report.schema.json", ["classify", "nested", "--strong", "--json"], 0),
        ("case_report.schema.json", ["classify", "striped", "3", "C1", "--json"], 0),
        ("case_report.schema.json", ["classify", "forbidden", s("triangle_free.pat"), "--json"], 0),
        ("amalgam.schema.json", ["amalgam", "grid", "--strong", "--json"], 1),
        ("amalgam.schema.json", ["amalgam", "grid", "--json"], 0),
        ("wqo_check.schema.json", ["wqo-check", "grid", "--json"], 1),
        ("wqo_check.schema.json", ["wqo-check", "nested", "--json"], 0),
    ]

    failures = 0
    for schema_name, args, want in cases:
        proc = subprocess.run([exe, *args], capture_output=True, text=True, timeout=300)
        label = " ".join(args)
        if proc.returncode != want:
            print(f"FAIL {label}: exit {proc.returncode}, expected {want}\n{proc.stderr}")
            failures += 1
            continue
        try:
            doc = json.loads(proc.stdout)
        except json.JSONDecodeError as e:
            print(f"FAIL {label}: not JSON ({e})")
            failures += 1
            continue
        validator = Draft202012Validator(loaded[schema_name], registry=registry)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        if errors:
            print(f"FAIL {label}: {errors[0].message} at {list(errors[0].path)}")
            failures += 1
        else:
            print(f"ok   {label}")
    print(f"{len(cases) - failures}/{len(cases)} documents valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
