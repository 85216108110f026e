"""
Writing the figure bundle from Python
=====================================

The command-line presets are ordinary functions.  This writes the panel (a)
CSV files into a scratch directory and prints the comparison summary.
"""

import tempfile
from pathlib import Path

from zenotransfer.cli import cmd_fig2, main

out = Path(tempfile.mkdtemp(prefix="fig2_"))
files, summary = cmd_fig2("a", out_dir=out, gnuplot=True)
print("\n".join(summary))
for (x, label), path in sorted(files.items()):
    print(f"x = {x:5g} {label:16s} -> {path.name}")

# the same through the argument parser; exit code 0 on success
print("exit code:", main(["fig2", "b", "--x-list", "0.2", "--out", str(out)]))
