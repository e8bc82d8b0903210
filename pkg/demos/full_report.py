"""
End-to-end verification report
===============================

All checks for the four built-in parameter sets. The same runs are
available from the command line as ``choquard-singular verify --preset NAME``.
"""

from choquard_singular import run_pipeline, validate_params
from choquard_singular.cli import PRESETS

for name, vals in PRESETS.items():
    P = validate_params(*(vals[k] for k in ("N", "m", "p", "q", "alpha", "beta")))
    rep = run_pipeline(P, gamma=vals.get("gamma"))
    print(f"== {name}")
    print(rep.summary())
