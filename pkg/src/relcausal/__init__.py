"""Exact causal-model checks for relativistic causality, jamming and Bell tasks."""
from __future__ import annotations

from .correlations import (
    PR_BOX,
    BellBehavior,
    JammingVerdict,
    LocalityVerdict,
    LocalModelWitness,
    behavior_from_model,
    chsh_value,
    chsh_values,
    is_local,
    jamming_conditions,
    local_decomposition,
)
from .graph import OBSERVED, UNOBSERVED, CausalStructure, CyclicGraphError, GraphError, d_separated
from .intervention import (
    AffectsRelation,
    affects,
    do_surgery,
    enumerate_affects,
    is_irreducible,
    post_intervention_distribution,
)
from .model import (
    ClassicalCausalModel,
    ExogenousDistribution,
    JointDistribution,
    Mechanism,
    ModelError,
    conditionally_independent,
    joint_distribution,
    verify_dsep_property,
)
from .scenarios import BUILTIN_NAMES, ScenarioSpec, SlideFamily, builtin, slide_outputs, timing
from .spacetime import (
    MINKOWSKI,
    Embedding,
    FinitePoset,
    MinkowskiPoint,
    Ordering,
    check_nsc,
    check_nss,
    joint_future,
    precedes,
)
from .sweep import SweepConfig, SweepReport, nsc_allowed_edges, sweep

__version__ = "0.1.0"
