#!/usr/bin/env python3
"""End-to-end checks of the dls command-line tool."""

import subprocess
import sys
import tempfile
import os

BIN = sys.argv[1]
failures = []


def run(*args, stdin=None):
    proc = subprocess.run([BIN, *args], capture_output=True, text=True,
                          input=stdin, timeout=120)
    return proc.returncode, proc.stdout, proc.stderr


def expect(name, cond, context=""):
    if cond:
        print(f"ok   {name}")
    else:
        print(f"FAIL {name}  {context}")
        failures.append(name)


def write_tmp(text, suffix=".txt"):
    fd, path = tempfile.mkstemp(suffix=suffix)
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    return path


model = write_tmp("bound 2\nagent i 0 0\nagent j 1 1\natom p 0 0\n")

# check -----------------------------------------------------------------
code, out, _ = run("check", "-m", model, "-f", "[R*]~p", "--at", "1,0")
expect("check true", code == 0 and out.strip() == "true", out)

code, out, _ = run("check", "-m", model, "-f", "p", "--at", "1,0")
expect("check false still exits 0", code == 0 and out.strip() == "false", out)

code, out, err = run("check", "-m", model, "-f", "[(R;R)*]p")
expect("compound star is unsupported (exit 3)", code == 3, f"{code} {err}")

code, out, err = run("check", "-m", model, "-f", "(p &")
expect("parse error exits 2", code == 2, f"{code} {err}")

code, out, err = run("check", "-m", "/no/such/file", "-f", "p")
expect("missing model exits 2", code == 2, f"{code} {err}")

code, out, err = run("check", "-m", model, "-f", "S(i,1)p")
expect("perception note on stderr", code == 0 and "finitized" in err, err)

# sat + witness re-check through the CLI ---------------------------------
for formula, fragment in [("(p & [R]~p)", "starfree"),
                          ("(here(i) & <U>here(j))", "starfree"),
                          ("<R*>here(i)", "positions"),
                          ("(<R*>here(i) & <R*><R*>here(j))", "positions")]:
    code, out, err = run("sat", "--fragment", fragment, formula)
    lines = out.splitlines()
    expect(f"sat '{formula}' is SAT", code == 0 and lines and lines[0] == "SAT",
           out + err)
    witness = write_tmp("\n".join(lines[1:]) + "\n")
    pos = "0,0"
    for token in err.split():
        if "," in token and token.replace(",", "").replace("-", "").isdigit():
            pos = token
            break
    code, out, _ = run("check", "-m", witness, "-f", formula, "--at", pos)
    expect(f"witness of '{formula}' re-checks true",
           code == 0 and out.strip() == "true", out)

code, out, _ = run("sat", "--fragment", "starfree", "(here(i) & [U]here(i))")
expect("nominal instance is UNSAT", code == 0 and out.strip() == "UNSAT", out)

code, out, _ = run("sat", "--fragment", "positions",
                   "(<R><R*>here(i) & <U><U*>here(i))")
expect("positions conflict is UNSAT", code == 0 and out.strip() == "UNSAT", out)

code, out, err = run("sat", "--fragment", "starfree", "p", "--budget-candidates", "1")
expect("budget exhaustion exits 4",
       code == 4 and out.strip().startswith("INCONCLUSIVE"), out + err)

code, out, err = run("sat", "--fragment", "positions", "(p & here(i))")
expect("atoms in the position fragment exit 3", code == 3, f"{code} {err}")

code, out, err = run("sat", "--fragment", "starfree", "S(i,1)p")
expect("perception formulas are outside sat (exit 3)", code == 3, f"{code} {err}")

# valid ------------------------------------------------------------------
code, out, _ = run("valid", "(p -> [U]<D>p)")
expect("return axiom is valid", code == 0 and out.strip() == "valid", out)

code, out, _ = run("valid", "p")
expect("an atom is invalid", code == 0 and out.strip() == "invalid", out)

code, out, _ = run("valid", "--fragment", "positions", "(here(i) -> <R*>here(i))")
expect("position-fragment validity", code == 0 and out.strip() == "valid", out)

formula_file = write_tmp("(p -> [U]<D>p)\n")
code, out, _ = run("valid", "-f", "@" + formula_file)
expect("formula from @path", code == 0 and out.strip() == "valid", out)

# reduce -----------------------------------------------------------------
code, out, _ = run("reduce", "[{i:up}][R]here(i)")
expect("reduce pushes the action inwards",
       code == 0 and out.strip() == "[R][D]here(i)", out)

code, out, _ = run("reduce", "[U;R]p")
expect("reduce flattens programs", code == 0 and out.strip() == "[U][R]p", out)

code, out, err = run("reduce", "[R*]p")
expect("reduce rejects iteration", code == 3, f"{code} {err}")

# simulate ---------------------------------------------------------------
code, out, _ = run("simulate", "-m", model, "-p", "{i:up};{i:up}",
                   "-f", "here(i)", "--at", "0,2")
expect("simulate traces positions and verdicts",
       code == 0 and "after {i:up,j:stay}: i=(0,1)" in out
       and out.strip().endswith("formula=true"), out)

code, out, _ = run("simulate", "-m", model, "-p", "{i:up};(here(i)?)")
expect("simulate reports blocked tests",
       code == 0 and out.strip().endswith("blocked: test failed: here(i)"), out)

code, out, _ = run("simulate", "-m", model, "-p", "{i:stay}")
expect("all-stay program is the identity",
       code == 0 and "after {i:stay,j:stay}: i=(0,0) j=(1,1)" in out, out)

# bisim ------------------------------------------------------------------
m1 = write_tmp("bound 1\nagent i 0 0\natom p 0 1\n")
m2 = write_tmp("bound 1\nagent i 0 0\n")
code, out, _ = run("bisim", "-m", m1, "--model2", m2, "--depth", "0")
expect("depth-0 bisimilar", code == 0 and out.strip() == "bisimilar", out)
code, out, _ = run("bisim", "-m", m1, "--model2", m2, "--depth", "1")
expect("depth-1 distinguishes (exit 1)",
       code == 1 and out.strip() == "not bisimilar", out)

# probe ------------------------------------------------------------------
code, out, _ = run("probe", "--schema", "functionality", "--trials", "50",
                   "--seed", "7")
expect("probe of a sound schema succeeds",
       code == 0 and "counterexamples 0" in out, out)
code2, out2, _ = run("probe", "--schema", "functionality", "--trials", "50",
                     "--seed", "7")
expect("probe output is deterministic", out == out2 and code == code2)

code, out, _ = run("probe", "--list")
expect("schema listing", code == 0 and "commutation" in out.split(), out)

code, out, err = run("probe", "--schema", "no-such", "--trials", "5")
expect("unknown schema exits 2", code == 2, f"{code} {err}")

print()
if failures:
    print(f"{len(failures)} CLI checks failed: {failures}")
    sys.exit(1)
print("all CLI checks passed")
