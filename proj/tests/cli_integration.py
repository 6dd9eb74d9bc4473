#!/usr/bin/env python3
"""End-to-end checks for the celearn command line binary.

ctest points CELEARN_CLI at the built binary; everything here runs inside a
throwaway temporary directory and exits nonzero if any check fails.
"""

import json
import os
import pathlib
import subprocess
import sys
import tempfile

CLI = os.environ.get("CELEARN_CLI", "")

tmp = pathlib.Path(".")
failures = []


def run(*args, expect=0):
    cmd = [CLI] + [str(a) for a in args]
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=300)
    if proc.returncode != expect:
        raise AssertionError(
            "%s: exit %d, expected %d\nstdout: %s\nstderr: %s"
            % (" ".join(cmd[1:]), proc.returncode, expect, proc.stdout,
               proc.stderr))
    return proc


def check(name, fn):
    try:
        fn()
    except Exception as exc:
        failures.append(name)
        print("[FAIL] %s: %s" % (name, exc))
    else:
        print("[ ok ] %s" % name)


def welfare_line(stdout):
    line = stdout.splitlines()[0]
    assert line.startswith("welfare "), stdout
    return float(line.split()[1])


def allocation_line(stdout):
    line = stdout.splitlines()[1]
    assert line.startswith("allocation"), stdout
    return [int(cell) for cell in line.split()[1:]]


def generate_files():
    """Deterministic generation, CSV shape, and the dense JSON expansion."""
    args = ("--seed", 11, "generate", "--dist", "preferred-good", "--n", 4,
            "--m", 3, "--out", tmp / "ud.csv", "--market-out",
            tmp / "market.json")
    run(*args)
    csv_bytes = (tmp / "ud.csv").read_bytes()
    market_bytes = (tmp / "market.json").read_bytes()
    run(*args)
    assert (tmp / "ud.csv").read_bytes() == csv_bytes, "CSV not reproducible"
    assert (tmp / "market.json").read_bytes() == market_bytes, \
        "market JSON not reproducible"

    rows = csv_bytes.decode().strip().splitlines()
    assert len(rows) == 4, rows
    for row in rows:
        cells = row.split(",")
        assert len(cells) == 3, row
        for cell in cells:
            assert float(cell) >= 0.0

    market = json.loads(market_bytes)
    assert market["buyers"] == 4 and market["goods"] == 3

    stdout = run("--seed", 11, "generate", "--n", 2, "--m", 2).stdout
    lines = stdout.strip().splitlines()
    assert len(lines) == 2 and all(len(l.split(",")) == 2 for l in lines)


def welfare_agreement():
    """The unit-demand solver and the dense solver agree on the value."""
    ud = run("solve-welfare", "--unit-demand", tmp / "ud.csv").stdout
    dense = run("solve-welfare", "--market", tmp / "market.json").stdout
    assert abs(welfare_line(ud) - welfare_line(dense)) <= 1e-9, (ud, dense)
    alloc = allocation_line(dense)
    assert len(alloc) == 4
    used = 0
    for bundle in alloc:
        assert used & bundle == 0, "overlapping bundles: %s" % alloc
        used |= bundle


def prices_and_um_loss():
    """CE prices for the optimum give zero UM-loss in the truth market."""
    dense = run("solve-welfare", "--market", tmp / "market.json").stdout
    alloc = ",".join(str(b) for b in allocation_line(dense))
    stdout = run("solve-prices", "--market", tmp / "market.json",
                 "--allocation", alloc, "--objective", "min-rev", "--out",
                 tmp / "outcome.json").stdout
    lines = stdout.splitlines()
    assert lines[0].startswith("prices ") or lines[0] == "prices", stdout
    assert len(lines[0].split()) == 1 + 3, stdout
    slack = float(lines[1].split()[1])
    assert lines[1].startswith("total_slack"), stdout
    assert slack <= 1e-7, stdout

    report = json.loads(run("um-loss", "--truth", tmp / "market.json",
                            "--outcome", tmp / "outcome.json").stdout)
    assert len(report["um_loss_per_buyer"]) == 4
    assert report["um_loss_market"] <= 1e-6, report


def run_ea_outputs():
    out_dir = tmp / "ea-out"
    stdout = run("--seed", 3, "--out-dir", out_dir, "run-ea",
                 "--unit-demand", tmp / "ud.csv", "--eps", 0.5, "--delta",
                 0.1, "--c", 11).stdout
    assert stdout.lstrip().startswith("{"), stdout
    assert "wrote" in stdout

    result = json.loads((out_dir / "learn_result.json").read_text())
    assert result["iterations"] == 1
    assert 0.0 < result["eps_hat"] <= 0.5, result
    assert result["active_pairs"] == 12 and result["pruned_pairs"] == 0

    rows = (out_dir / "estimates.csv").read_text().strip().splitlines()
    assert rows[0] == "buyer,bundle,mean,radius,status,samples"
    assert len(rows) == 1 + 12, rows
    for row in rows[1:]:
        assert row.split(",")[4] == "Active", row


def run_eap_outputs():
    args = ("run-eap", "--unit-demand", tmp / "ud.csv", "--schedule",
            "50,100,200", "--deltas", "0.02,0.03,0.05", "--budgets", "u,u,u",
            "--c", 11)
    run("--seed", 3, "--out-dir", tmp / "eap-a", *args)
    run("--seed", 3, "--out-dir", tmp / "eap-b", *args)
    for name in ("learn_result.json", "estimates.csv"):
        assert (tmp / "eap-a" / name).read_bytes() == \
            (tmp / "eap-b" / name).read_bytes(), "%s not reproducible" % name

    result = json.loads((tmp / "eap-a" / "learn_result.json").read_text())
    assert 1 <= result["iterations"] <= 3, result
    assert result["active_pairs"] + result["pruned_pairs"] == 12, result
    spent = [0.02, 0.05, 0.10][result["iterations"] - 1]
    assert abs(result["delta_spent"] - spent) <= 1e-12, result
    assert abs(result["delta_budget"] - 0.1) <= 1e-12, result

    rows = (tmp / "eap-a" / "estimates.csv").read_text().strip().splitlines()
    assert len(rows) == 1 + 12
    for row in rows[1:]:
        assert row.split(",")[4] in ("Active", "Pruned"), row


def error_exits():
    run("no-such-command", expect=1)
    run("solve-welfare", expect=1)

    (tmp / "big.json").write_text('{"buyers": 1, "goods": 21}\n')
    proc = run("solve-welfare", "--market", tmp / "big.json", expect=2)
    assert "error:" in proc.stderr, proc.stderr

    (tmp / "broken.json").write_text("{nope\n")
    run("solve-welfare", "--market", tmp / "broken.json", expect=1)
    run("um-loss", "--truth", tmp / "missing.json", "--outcome",
        tmp / "missing.json", expect=1)
    run("run-eap", "--unit-demand", tmp / "ud.csv", "--schedule", "50,100",
        "--deltas", "0.1", "--budgets", "u,u", "--c", 11, expect=1)


def main():
    global tmp
    if not CLI or not pathlib.Path(CLI).exists():
        print("CELEARN_CLI does not point at the built binary",
              file=sys.stderr)
        return 2
    with tempfile.TemporaryDirectory(prefix="celearn-cli-") as d:
        tmp = pathlib.Path(d)
        check("generate files", generate_files)
        check("welfare agreement", welfare_agreement)
        check("prices and um-loss", prices_and_um_loss)
        check("run-ea outputs", run_ea_outputs)
        check("run-eap outputs", run_eap_outputs)
        check("error exits", error_exits)
    print("%d of %d checks passed" % (6 - len(failures), 6))
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
