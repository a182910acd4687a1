"""Environment map toolkit: Python surface over the native core.

Structured results cross the native boundary as JSON text; this wrapper
decodes them into plain dicts/lists.
"""

import json

from ._envmap import (  # noqa: F401
    filter_accessibility_tree,
    normalize_url,
)
from . import _envmap


def build_map(trace_texts, out_dir, env_name, base_url, created_at="", rules_file=""):
    """Run the five-phase pipeline and serialize the map; returns statistics."""
    return json.loads(
        _envmap.build_map(list(trace_texts), str(out_dir), env_name, base_url,
                          created_at, rules_file)
    )


def merge_maps(map_dir_a, map_dir_b, out_dir, rules_file=""):
    """Merge two serialized maps of the same environment; returns the map id."""
    return _envmap.merge_maps(str(map_dir_a), str(map_dir_b), str(out_dir), rules_file)


def resolve_context(map_dir, url, rules_file=""):
    """Context record matching a URL, or None."""
    return json.loads(_envmap.resolve_context(str(map_dir), url, rules_file))


def list_actions(map_dir, context_id, filter="all"):
    """Action records of a context, filtered by instance kind."""
    return json.loads(_envmap.list_actions(str(map_dir), context_id, filter))


def find_workflows(map_dir, keywords):
    """Workflows ranked by keyword frequency over step text."""
    return json.loads(_envmap.find_workflows(str(map_dir), list(keywords)))


def lookup_term(map_dir, term):
    """Definitions whose term matches case-insensitively."""
    return json.loads(_envmap.lookup_term(str(map_dir), term))


def compute_metrics(har_text, rules_file=""):
    """Navigation metrics (page visits, backtracking rate) from HAR text."""
    return json.loads(_envmap.compute_metrics(har_text, rules_file))


def export_graph(map_dir, format="dot"):
    """Graph document for a serialized map, as DOT or graph-json text."""
    return _envmap.export_graph(str(map_dir), format)


def map_statistics(map_dir):
    """The statistics block of a serialized map."""
    return json.loads(_envmap.map_statistics(str(map_dir)))


__all__ = [
    "normalize_url",
    "filter_accessibility_tree",
    "build_map",
    "merge_maps",
    "resolve_context",
    "list_actions",
    "find_workflows",
    "lookup_term",
    "compute_metrics",
    "export_graph",
    "map_statistics",
]
