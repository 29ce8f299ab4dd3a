"""Chess endgames as a discrete dynamical system: exact tablebases, trajectory
divergence experiments and static-evaluator audits."""

__version__ = "0.1.0"
