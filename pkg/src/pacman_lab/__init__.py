"""Planner-actor-critic laboratory.

Symbolic plans over policy-sampled action sets, refined by tabular
actor-critic updates from environmental reward and human feedback.
"""

__version__ = "0.1.0"
