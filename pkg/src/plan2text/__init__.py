"""Plan-based data-to-text pipeline toolkit.

Stages: fact-graph ingestion, text planning (exhaustive or linear-time
transition planner), template/k-best realization, entity-sequence output
verification with plan fallback, and referring-expression generation.
"""

__version__ = "0.1.0"
