"""Write the named reference states as state files for the CLI ``--input`` flag.

    python3 scripts/make_state_files.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from monogamy.linalg import projector
from monogamy.statefile import write_state
from monogamy.states import bell_bell, bell_phi_plus, ghz, w_state, zeros

STATES = {
    "ghz3": ghz(3),
    "w3": w_state(3),
    "zero3": zeros(3),
    "bell_bell": bell_bell(),
    "zero4": zeros(4),
    "ghz_000_mixture": (projector(ghz(3)) + projector(zeros(3))) / 2,
    "werner_0.5": 0.5 * projector(bell_phi_plus()) + 0.5 * np.eye(4) / 4,
}


def main() -> int:
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "states")
    out.mkdir(parents=True, exist_ok=True)
    for name, state in STATES.items():
        write_state(out / f"{name}.json", state)
        print(out / f"{name}.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
