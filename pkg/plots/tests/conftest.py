"""Shared fixtures: real run outputs produced through the simulator CLI.

The runs are reduced-resolution versions of the bundled regimes (48 or 64
cells per side instead of 128) so the whole session stays under a minute;
the qualitative features the figures assert survive the coarsening.
"""

import subprocess
import sys
import pytest

# regime name -> (scenario text, approximate runtime)
SCENARIOS = {
    "fig1": (
        "preset = fig1\n"
        "grid.nx = 64\ngrid.ny = 64\n"
        "stepper.dt = 0.02\n"
        # dense snapshots through the origin-crossing window plus the
        # late near-origin concentration, for the peak-path extraction
        "stepper.snapshot_times = 0 25 50 60 62.5 65 67.5 70 72.5 75 "
        "100 102.5 105 107.5 110 170 200\n"
    ),
    "fig3": "preset = fig3\ngrid.nx = 48\ngrid.ny = 48\nstepper.dt = 0.025\n",
    "fig4": "preset = fig4\ngrid.nx = 48\ngrid.ny = 48\nstepper.dt = 0.01\n",
    "fig5": "preset = fig5\ngrid.nx = 48\ngrid.ny = 48\nstepper.dt = 0.025\n",
    "fig6": "preset = fig6\ngrid.nx = 48\ngrid.ny = 48\nstepper.dt = 0.025\n",
    "basic_sir": "preset = basic_sir\ngrid.nx = 48\ngrid.ny = 48\nstepper.dt = 0.025\n",
}


@pytest.fixture(scope="session")
def manifests(tmp_path_factory):
    """Manifest paths of fresh reduced-scale runs of every bundled regime."""
    root = tmp_path_factory.mktemp("runs")
    paths = {}
    for name, entry in SCENARIOS.items():
        text = entry if isinstance(entry, str) else entry[0]
        scenario = root / f"{name}.cfg"
        scenario.write_text(text)
        out_dir = root / name
        result = subprocess.run(
            [sys.executable, "-m", "rdsir.cli", "run",
             "--scenario", str(scenario), "--out", str(out_dir)],
            capture_output=True, text=True,
        )
        assert result.returncode == 0, (
            f"simulator run for {name} failed:\n{result.stderr}"
        )
        paths[name] = out_dir / "manifest.json"
    return paths
