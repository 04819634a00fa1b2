"""Python interface to the usclab capacity expansion solver."""

from ._core import (
    CalibrationError,
    ConfigError,
    CyclingType,
    PolicyKind,
    PolicySpec,
    RunResult,
    Scenario,
    Slcr,
    Storage,
    SweepError,
    TechClass,
    Technology,
    Variant,
    all_variants,
    calibrate,
    decompose_cycling,
    default_scenario,
    factor_separation,
    load_config,
    loss_coverage_factor,
    oracle_solve,
    parse_variant,
    solve,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]


def renewable_share(scenario, variant, phi):
    """Copy of ``scenario`` under a renewable share policy given as e.g. ``"1c"``."""
    v = parse_variant(variant) if isinstance(variant, str) else variant
    s = Scenario()
    for attr in ("horizon", "demand", "technologies", "storages", "wrap_storage_level",
                 "hours_per_year"):
        setattr(s, attr, getattr(scenario, attr))
    s.policy = PolicySpec.renewable_share(v.family, v.slcr, phi)
    return s
