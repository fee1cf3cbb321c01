"""Bundled synthetic dataset shaped like a small statewide school trial:
1029 schools, 56 self-selected into the experiment (34 treated, 22 control),
binary pass/fail outcome, business-as-usual outcomes observed population-wide."""

from importlib import resources


def synthetic_path() -> str:
    """Filesystem path of the bundled synthetic CSV."""
    return str(resources.files(__package__).joinpath("statewide_synthetic.csv"))
