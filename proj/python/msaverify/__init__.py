"""Python bindings for the msaverify C++ core.

Verdicts and repair plans are returned as plain dicts with the same field
names as the CLI's JSON reports.
"""

import json

from ._msaverify import (
    ConfigError,
    Error,
    ParseError,
    SystemModel,
    e_parents,
    export_smtlib,
    generate,
    load_model,
    parse_dsl,
    parse_model_json,
)
from . import _msaverify as _core

__all__ = [
    "ConfigError",
    "Error",
    "ParseError",
    "SystemModel",
    "brute_force_repair",
    "e_parents",
    "export_smtlib",
    "generate",
    "load_model",
    "parse_dsl",
    "parse_model_json",
    "repair",
    "verify",
]


def verify(model, concerns=("architecture",), tau=None, hub_strict=False):
    return json.loads(_core.verify_json(model, list(concerns), tau, hub_strict))


def repair(model, concerns=("architecture",), tau=None, hub_strict=False, budget=None,
           freeze_edges=False, freeze_roles=False):
    return json.loads(_core.repair_json(model, list(concerns), tau, hub_strict, budget,
                                        freeze_edges, freeze_roles))


def brute_force_repair(model, concerns=("architecture",), tau=None, hub_strict=False,
                       freeze_edges=False, freeze_roles=False):
    return json.loads(_core.brute_force_repair_json(model, list(concerns), tau, hub_strict,
                                                    freeze_edges, freeze_roles))
