#!/usr/bin/env python3
"""Regenerate the shipped AGV sample case directory.

Usage: python scripts/build_sample_case.py [target-dir]

The builder is deterministic apart from file timestamps: the trace is
re-simulated from the scenario document and the attestation log is
rewritten from the fixed commissioning records.
"""

import shutil
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from safecase.sample_case import write_sample_case  # noqa: E402


def main() -> int:
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "sample-case"
    )
    if target.exists():
        shutil.rmtree(target)
    write_sample_case(target)
    print(f"sample case written to {target}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
