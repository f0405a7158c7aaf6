"""Day-ahead demand-reduction scheduling for three-phase low-voltage feeders."""

from ._core import (
    ac_check,
    generate,
    presets,
    run_sweep,
    solve,
    tighten,
    verify,
)

__all__ = ["ac_check", "generate", "presets", "run_sweep", "solve", "tighten", "verify"]
