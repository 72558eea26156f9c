"""Run both built-in presets through the command line entry point.

Usage: python scripts/run_presets.py [out_root]
"""

from __future__ import annotations

import sys
from pathlib import Path

from frachum.cli import PRESETS, main


def run(root: Path) -> int:
    worst = 0
    for name in sorted(PRESETS):
        out = root / name
        code = main(["--preset", name, "--out-dir", str(out)])
        print(f"{name}: exit {code}, files in {out}")
        for line in (out / "report.txt").read_text().splitlines():
            if line.strip().startswith(("status:", "relative residual:", "energy J(u*):")):
                print("   ", line.strip())
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    # exit 2 on the obstructed preset is the expected outcome, not an error
    sys.exit(1 if run(root) == 1 else 0)
