"""Machine-readable check reports, from the library and from the CLI.

Every check returns a CheckReport that serializes to JSON (and to a fixed
five-column CSV for convergence tables). The command-line front end wraps
the same checks; its exit code is 0 for pass, 1 for a definite failure,
2 for an inconclusive run, 64 for usage errors. main() is callable
in-process, which is how this script drives it.
"""

import json
import tempfile

import numpy as np

from dilatlab import (check_A0_A1, check_A2, euclidean, halving_schedule,
                      report_to_json)
from dilatlab.cli import main


def example_report_serialization():
    ds = euclidean(2)
    rng = np.random.default_rng(8)
    pairs = [(0.6 * rng.standard_normal(2), 0.6 * rng.standard_normal(2))
             for _ in range(10)]
    pairs = [(x, x + 0.5 * (y - x)) for x, y in pairs]
    reports = [
        check_A0_A1(ds, pairs, halving_schedule(0.5, 8)),
        check_A2(ds, pairs, [(0.5, 0.5), (0.7, 0.2)]),
    ]
    text = report_to_json(reports, {"meta": {"structure": "euclidean2"}})
    doc = json.loads(text)
    print("report schema %d with %d checks:" % (doc["schema"], len(doc["checks"])))
    for c in doc["checks"]:
        print("  %-6s passed=%s  max_residual=%.2e" %
              (c["check"], c["passed"], c["max_residual"]))


def example_cli_verify():
    with tempfile.NamedTemporaryFile(suffix=".json", mode="r") as f:
        rc = main(["verify", "--structure", "euclidean2",
                   "--checks", "a0a1,a2", "--samples", "10",
                   "--out", f.name])
        doc = json.load(open(f.name))
    print("verify euclidean2: exit code %d, checks %s"
          % (rc, [c["check"] for c in doc["checks"]]))


def example_cli_csv():
    with tempfile.NamedTemporaryFile(suffix=".csv", mode="r") as f:
        rc = main(["verify", "--structure", "euclidean2", "--checks", "a2",
                   "--format", "csv", "--out", f.name])
        head = open(f.name).read().splitlines()[:3]
    print("csv export (exit %d):" % rc)
    for line in head:
        print("  " + line)


def example_cli_exit_codes():
    # stricter-than-float tolerance forces a reported failure (exit 1 or 2),
    # bad flags are usage errors (exit 64)
    rc_fail = main(["verify", "--structure", "euclidean2", "--checks", "a3",
                    "--tol.a3", "1e-300", "--out", "/dev/null"])
    rc_usage = main(["verify", "--structure", "no-such-structure"])
    print("impossible tolerance -> exit %d, unknown structure -> exit %d"
          % (rc_fail, rc_usage))


def example_cli_tangent():
    with tempfile.NamedTemporaryFile(suffix=".json", mode="r") as f:
        rc = main(["tangent", "--structure", "euclidean2",
                   "--point", "0.3,-0.2", "--out", f.name])
        doc = json.load(open(f.name))
    print("tangent at (0.3, -0.2): exit %d, converged %s"
          % (rc, doc["converged"]))
    print("  probe difference %s" % np.round(doc["difference"], 9))
    print("  probe sum        %s" % np.round(doc["sum"], 9))
    print("  consistency residual %.1e" % doc["consistency"])


if __name__ == "__main__":
    example_report_serialization()
    print()
    example_cli_verify()
    print()
    example_cli_csv()
    print()
    example_cli_exit_codes()
    print()
    example_cli_tangent()
