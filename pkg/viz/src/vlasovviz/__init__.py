"""Batch figure scripts for the kinetic solver's file artifacts.

Reads only the documented text formats (phase-space snapshots, diagnostic
time-series CSVs, convergence tables) so the plotting side never links
against the solver.  Output is deterministic: fixed figure geometry, no
timestamps, byte-stable across repeated invocations on one host.
"""

from .parsing import Snapshot, VizError, read_convergence, read_snapshot, read_timeseries

__all__ = ["Snapshot", "VizError", "read_convergence", "read_snapshot",
           "read_timeseries"]
__version__ = "0.1.0"
