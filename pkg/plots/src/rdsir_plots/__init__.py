"""Figure rendering for rdsir simulation outputs.

Consumes only the simulator's documented file formats (manifest.json,
series.csv, snapshot CSVs); no code is shared with the simulator.
"""

from .extract import (
    argmax_path,
    closest_approach,
    initial_decline,
    local_maxima,
    local_minima,
    terminal_value,
)
from .figures import FigureSpec, render_snapshot_grid, render_timeseries
from .readers import Manifest, SchemaError, Snapshot, read_manifest, read_series, read_snapshot

__version__ = "0.1.0"
