"""Scenario files: schema, parsing and canonical emission."""

from irsdetect.scenario.loader import (
    bundled_scenario_path,
    dbm_to_watts,
    dump_scenario,
    load_scenario,
    parse_scenario,
    save_scenario,
    scenario_hash,
    watts_to_dbm,
)

__all__ = [
    "bundled_scenario_path",
    "dbm_to_watts",
    "dump_scenario",
    "load_scenario",
    "parse_scenario",
    "save_scenario",
    "scenario_hash",
    "watts_to_dbm",
]
