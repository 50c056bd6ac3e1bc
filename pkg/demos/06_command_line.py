"""The ``ricci-qc`` command line, driven from Python.

Writes a JSON scenario, runs ``flow``, ``qc`` and ``dim`` on it and lists the
files produced.  The same commands work from a shell, e.g.

    ricci-qc qc --class A3 --k 1 --init 1,2,5,1 --init-bar 2,1,5,7 --out run/

Run:  python3 demos/06_command_line.py
"""

import json
import tempfile
from pathlib import Path

from ricci_qc.cli import main

out = Path(tempfile.mkdtemp(prefix="ricci_qc_demo_"))
scenario = {
    "class": "A5",
    "init": [2, 3, 1, 1],
    "init_bar": [3, 2, 1, 4],
    "integrator": {"t_end": 100},
    "qc": {"epsilon": 0.01},
}
path = out / "scenario.json"
path.write_text(json.dumps(scenario, indent=2))

for argv in (["flow", "--config", str(path), "--out", str(out / "flow")],
             ["qc", "--config", str(path), "--out", str(out / "qc")],
             ["dim", "--config", str(path)]):
    print("$ ricci-qc", " ".join(argv))
    code = main(argv)
    print(f"exit code {code}\n")

for f in sorted(out.rglob("*")):
    if f.is_file():
        print(f.relative_to(out), f.stat().st_size, "bytes")
print((out / "flow" / "conserved.csv").read_text().splitlines()[:3])
