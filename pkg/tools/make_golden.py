"""Regenerate the golden report files used by the CLI determinism test.

Run only after the oracle-equivalence suite passes; the goldens freeze the
oracle-validated engine's output on the bundled dataset.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "tests"))

from pibgen.cli import main
from test_acceptance import GOLDEN, GOLDEN_ARGS


def run():
    GOLDEN.mkdir(exist_ok=True)
    for fmt in ("json", "md"):
        target = GOLDEN / f"analyze.{fmt}"
        code = main(["analyze", *GOLDEN_ARGS, "--format", fmt, "--out", str(target)])
        if code != 0:
            raise SystemExit(f"analyze exited {code}")
        print(f"wrote {target}")


if __name__ == "__main__":
    run()
