"""Supervisory control of discrete-event systems: synthesis, reduction, and
localization with event reduction."""

from .automata import (
    Generator,
    canonicalize,
    closed_equal,
    is_nonblocking,
    is_normal,
    isomorphic,
    lang_equal,
    marked_equal,
    meet,
    project,
    selfloop,
    state_correspondence,
    sync,
    trim,
)
from .localization import (
    AgentSpec,
    EquivalenceReport,
    LocalController,
    LocalControllerSet,
    event_reduction_report,
    is_ecc,
    localize_agent,
    localize_all,
    strip_selflooped,
    verify_control_equivalence,
)
from .reduction import StatePartition, control_consistent, induce, merge_closure, supreduce
from .synthesis import ControlData, condat_table, control_data, supcon

__version__ = "0.1.0"
