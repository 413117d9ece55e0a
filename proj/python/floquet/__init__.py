"""Topological indices of periodically driven lattice systems."""

import json

from ._core import (
    ConfigError,
    DriveProtocol,
    GapDescriptor,
    HoppingModel,
    IndexReport,
    LatticeGeometry,
    LatticeOperator,
    RelativeGapResult,
    RestrictionMap,
    __version__,
    add_onsite_disorder,
    centered_torus,
    chern_insulator,
    five_step_drive,
    full_coupling,
    half_plane_map,
    quasi_energy_phases,
    relative_gap_indices,
    static_drive,
)
from . import _core


def _as_text(config):
    return config if isinstance(config, str) else json.dumps(config)


def run(config):
    """Runs every (L, epsilon) cell of a config (dict or JSON text); returns the report dict."""
    return json.loads(_core.run_config(_as_text(config)))


def verify(config, full=False):
    return json.loads(_core.verify_config(_as_text(config), full))


def sweep(config, sizes):
    return json.loads(_core.sweep_config(_as_text(config), list(sizes)))


__all__ = [
    "ConfigError",
    "DriveProtocol",
    "GapDescriptor",
    "HoppingModel",
    "IndexReport",
    "LatticeGeometry",
    "LatticeOperator",
    "RelativeGapResult",
    "RestrictionMap",
    "__version__",
    "add_onsite_disorder",
    "centered_torus",
    "chern_insulator",
    "five_step_drive",
    "full_coupling",
    "half_plane_map",
    "quasi_energy_phases",
    "relative_gap_indices",
    "run",
    "static_drive",
    "sweep",
    "verify",
]
