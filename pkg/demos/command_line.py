"""
The command line
================

Every capability is also reachable through the ``extlab`` command.  This
script drives it through click's test runner on the sample inputs in
``demos/data``.
"""

import json
from pathlib import Path

from click.testing import CliRunner

from extlab.cli import main

DATA = Path(__file__).resolve().parent / "data"
runner = CliRunner()


def run(*args):
    r = runner.invoke(main, [str(a) for a in args])
    print("$ extlab", " ".join(str(a) for a in args), "->", r.exit_code)
    return r


print(json.loads(run("group", "validate", "Q8").output)["aut_order"])
print(json.loads(run("cohomology", "compute", DATA / "c3_inverted_by_c2.json", "--degree", "1").output))
rep = json.loads(run("ext", "classify", DATA / "c2_by_c2.json").output)
print([c["identified_as"] for c in rep["classes"]])
run("sixterm", "run", DATA / "z8_instance.json", "--out", "/tmp/z8_cert.json")
print(json.loads(run("sixterm", "replay", "/tmp/z8_cert.json").output))

# invalid inputs exit with status 2
print(run("group", "validate", DATA / "not_associative.json").stderr.strip())
