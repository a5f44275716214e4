#!/usr/bin/env python3
"""End-to-end tests for the sdq command line tool.

Usage: run_cli_tests.py <path-to-sdq-binary>

Each scenario checks the exit code and (where a golden file exists) the exact
stdout, after normalizing the timing field. Prints one line per scenario and
exits nonzero if any scenario fails.
"""

import difflib
import json
import pathlib
import re
import subprocess
import sys
import tempfile

HERE = pathlib.Path(__file__).resolve().parent
GOLDEN = HERE / "golden"


def normalize(text: str) -> str:
    return re.sub(r'"elapsed_ms": [0-9.eE+-]+', '"elapsed_ms": 0', text)


class Runner:
    def __init__(self, binary: str):
        self.binary = binary
        self.failures = 0

    def run(self, args, stdin_text=None):
        return subprocess.run(
            [self.binary] + args,
            input=stdin_text,
            capture_output=True,
            text=True,
            timeout=300,
        )

    def report(self, name: str, ok: bool, detail: str = ""):
        print(f"[{'ok' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
        if not ok:
            self.failures += 1

    def expect(self, name, args, exit_code, stdin_text=None, golden=None,
               stdout_json=None, stderr_prefix=None):
        try:
            proc = self.run(args, stdin_text)
        except Exception as exc:  # noqa: BLE001 - report any launch failure
            self.report(name, False, f"could not run: {exc}")
            return None
        if proc.returncode != exit_code:
            self.report(name, False,
                        f"exit {proc.returncode}, wanted {exit_code}; "
                        f"stderr: {proc.stderr.strip()[:200]}")
            return proc
        if golden is not None:
            want = normalize((GOLDEN / golden).read_text())
            got = normalize(proc.stdout)
            if want != got:
                diff = "\n".join(difflib.unified_diff(
                    want.splitlines(), got.splitlines(),
                    fromfile=golden, tofile="stdout", lineterm=""))
                self.report(name, False, "output differs\n" + diff)
                return proc
        if stdout_json is not None:
            try:
                doc = json.loads(proc.stdout)
            except json.JSONDecodeError as exc:
                self.report(name, False, f"stdout is not JSON: {exc}")
                return proc
            err = stdout_json(doc)
            if err:
                self.report(name, False, err)
                return proc
        if stderr_prefix is not None and not proc.stderr.startswith(stderr_prefix):
            self.report(name, False,
                        f"stderr {proc.stderr.strip()[:120]!r} lacks prefix "
                        f"{stderr_prefix!r}")
            return proc
        self.report(name, True)
        return proc


def check_names(*names):
    def inspect(doc):
        got = [c["name"] for c in doc["checks"]]
        missing = [n for n in names if n not in got]
        if missing:
            return f"missing checks {missing} in {got}"
        bad = [c["name"] for c in doc["checks"] if c["status"] not in ("true", "pass")]
        if bad:
            return f"failing checks {bad}"
        return None
    return inspect


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: run_cli_tests.py <sdq-binary>", file=sys.stderr)
        return 2
    r = Runner(sys.argv[1])

    r.expect("check d1 matches golden output",
             ["check", "d1", "--props",
              "quasigroup,idempotent,distributive,medial"],
             exit_code=1, golden="check_d1.json")

    build = r.expect("build d1 emits a table", ["build", "d1"], exit_code=0)
    if build is not None and build.returncode == 0:
        r.expect("check reads a table from stdin",
                 ["check", "-", "--props", "quasigroup,idempotent"],
                 exit_code=0, stdin_text=build.stdout,
                 stdout_json=check_names("quasigroup", "idempotent"))

    r.expect("normal reports the non-normal line",
             ["normal", "d1", "--gens", "0,1"], exit_code=1,
             stdout_json=lambda doc: None if [
                 c for c in doc["checks"]
                 if c["name"] == "normal" and c["status"] == "false"
             ] else "expected a false 'normal' check")

    r.expect("hamiltonian on the commutative example",
             ["hamiltonian", "example-810vi"], exit_code=0,
             stdout_json=check_names("hamiltonian"))

    r.expect("iso finds the identity route", ["iso", "d1", "d1"], exit_code=0,
             stdout_json=check_names("isomorphism"))

    with tempfile.TemporaryDirectory() as tmp:
        mod = pathlib.Path(tmp) / "p2.mod"
        r.expect("build pm writes a module file",
                 ["build", "pm", "--p", "3", "--m", "2", "-o", str(mod)],
                 exit_code=0)
        if mod.exists():
            r.expect("socle of the written module",
                     ["socle", str(mod)], exit_code=0,
                     stdout_json=check_names("S_1", "S_2", "radical"))

    r.expect("verify-paper section3 passes",
             ["verify-paper", "--suite", "section3"], exit_code=0,
             stdout_json=lambda doc: None if len(doc["checks"]) == 6
             else f"expected 6 checks, got {len(doc['checks'])}")

    r.expect("missing file is a usage error",
             ["check", "no-such-file.tbl", "--props", "quasigroup"],
             exit_code=2, stderr_prefix="error:")

    r.expect("unknown property is a usage error",
             ["check", "d1", "--props", "nosuchlaw"],
             exit_code=2, stderr_prefix="error:")

    if r.failures:
        print(f"{r.failures} scenario(s) failed")
        return 1
    print("all scenarios pass")
    return 0


if __name__ == "__main__":
    sys.exit(main())
