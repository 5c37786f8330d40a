"""Actual achievement causes, regression and knowledge over action narratives."""

from .causation import CausalChain, CausalSetting, CauseEntry, causal_chain, derivation, is_cause
from .dsl import load_scenario, parse_action, parse_formula, parse_narrative, parse_scenario
from .epistemic import k_accessible, know, knows_causal_chain
from .errors import ParseError, SitCauseError
from .narrative import Situation, holds
from .regression import regress_all, rho

__all__ = [
    "CausalChain", "CausalSetting", "CauseEntry", "ParseError", "SitCauseError", "Situation",
    "causal_chain", "derivation", "holds", "is_cause", "k_accessible", "know", "knows_causal_chain",
    "load_scenario", "parse_action", "parse_formula", "parse_narrative", "parse_scenario",
    "regress_all", "rho",
]
