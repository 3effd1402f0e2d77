"""Localization observables of a free Klein-Gordon particle."""

import json

from ._core import (
    ConfigError,
    Frame,
    MissingFile,
    MomentumGrid,
    Region,
    Slice,
    State,
    almost_localized,
    boost,
    bump,
    cli,
    cone_expand,
    default_config,
    gaussian,
    inner_product,
    m_probability,
    mantle_flux,
    moments,
    nw_centroid,
    nw_probability,
    nw_project,
    set_verbosity,
    suite_names,
    terno_probability,
    terno_probability_energy_form,
    translate,
    velocity,
)
from ._core import run_suite_json as _run_suite_json


def run_suite(name, config=""):
    """Run one suite; returns the verdict as a dict (same layout as report.json entries)."""
    return json.loads(_run_suite_json(name, config))


__all__ = [n for n in dir() if not n.startswith("_")]
