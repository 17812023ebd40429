#!/usr/bin/env python3
"""Validate report JSON files against schemas/report.schema.json."""
import argparse
import json
import sys
from pathlib import Path

import jsonschema


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("schema", type=Path)
    parser.add_argument("reports", type=Path, nargs="+")
    args = parser.parse_args()

    schema = json.loads(args.schema.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failed = 0
    for path in args.reports:
        errors = sorted(validator.iter_errors(json.loads(path.read_text())), key=str)
        if errors:
            failed += 1
            print(f"FAIL {path}")
            for e in errors[:5]:
                print(f"  {'/'.join(map(str, e.absolute_path))}: {e.message}")
        else:
            print(f"ok   {path}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
