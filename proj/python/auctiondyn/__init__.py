"""Repeated truthful auctions against mean-based learning bidders.

Thin wrappers around the C++ core: mechanisms (second-price with reserve,
staircase, softmax, mixtures), exact incentive verification, discrete virtual
values / Myerson reserves, the repeated-auction simulation engine, and the
experiment presets.
"""

import json as _json

from ._core import (  # noqa: F401
    BidGrid,
    ConfigError,
    ContractError,
    Mechanism,
    ParseError,
    ResourceError,
    characterize_deterministic,
    default_eta,
    default_mean_based_delta,
    fit_scaling_exponent,
    is_regular,
    make_softmax,
    make_spa,
    make_staircase,
    mix,
    myerson_reserve,
    payment_from_allocation,
    preset_ids,
    strictify,
    uniform_pmf,
    verify_ic,
    virtual_values,
)
from . import _core as _c

__all__ = [
    "BidGrid", "Mechanism", "make_spa", "make_staircase", "make_softmax", "mix",
    "strictify", "verify_ic", "characterize_deterministic", "payment_from_allocation",
    "virtual_values", "is_regular", "myerson_reserve", "uniform_pmf", "default_eta",
    "default_mean_based_delta", "simulate", "simulate_to_dir", "metagame_gain",
    "fit_scaling_exponent", "run_preset", "preset_ids",
    "ConfigError", "ContractError", "ResourceError", "ParseError",
]


def _as_json(config):
    return config if isinstance(config, str) else _json.dumps(config)


def simulate(config, trials=1, jobs=1, benchmark_reserve=0):
    """Runs a simulation config (dict or JSON string); returns the summary dict."""
    return _json.loads(_c.simulate_json(_as_json(config), trials, jobs, benchmark_reserve))


def simulate_to_dir(config, out_dir, trials=1, jobs=1, benchmark_reserve=0):
    """Like simulate, but also writes revenue.csv / snapshots.csv / summary.json."""
    return _json.loads(
        _c.simulate_outputs_json(_as_json(config), str(out_dir), trials, jobs, benchmark_reserve)
    )


def metagame_gain(config, bidder, jobs=1):
    """Final-round true-utility gain of every report relative to the truthful one."""
    return _c.metagame_gain_json(_as_json(config), bidder, jobs)


def run_preset(preset_id, jobs=1):
    """Runs a named experiment preset; returns its report as a dict."""
    return _json.loads(_c.run_preset_json(preset_id, jobs))
