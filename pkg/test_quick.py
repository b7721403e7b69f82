"""Quick check that lamtransfer is installed and the bundled example runs."""

import sys

from lamtransfer.pipeline import EXIT_OK, RunConfig, run_command
from lamtransfer.report import render_text


def test_basic():
    """Transfer lambda from 19a1 to 817b1 over Q(sqrt -51) at p = 5"""
    print("Checking lamtransfer on the bundled example\n")
    config = RunConfig(command="transfer", inputs=("19a1", "817b1"), p=5, D=51, offline=True)
    dossier = run_command(config)
    print(render_text(dossier))
    assert dossier["exit_code"] == EXIT_OK, dossier["violations"]
    assert dossier["result"]["lambda_f2"] == 2
    print("OK: λ(817b1) = 2")


if __name__ == "__main__":
    try:
        test_basic()
    except AssertionError as e:
        print(f"FAILED: {e}")
        sys.exit(1)
