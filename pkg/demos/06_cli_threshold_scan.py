"""Command-line tour: classification scan and a one-dimensional report.

Run: python demos/06_cli_threshold_scan.py
"""
import json
import tempfile
from pathlib import Path

from halfspace_nls.cli import main

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp)
    code = main(["threshold-scan", "--p", "3", "--out", str(out / "scan")])
    print(f"threshold-scan exit code {code}")
    print((out / "scan" / "scan.csv").read_text())

    code = main(["oned", "--p", "3", "--c", "1", "--out", str(out / "oned")])
    result = json.loads((out / "oned" / "report.json").read_text())["result"]
    print(f"oned exit code {code}: {result['class']} with shift {result['t_shift']:.6f}")

    # above the threshold the 2D solver refuses with exit code 1
    code = main(["solve", "--c", "1.5", "--out", str(out / "solve")])
    print(f"solve at c = 1.5 exit code {code}")
