from . import distortions, evaluations, scores

__all__ = ["distortions", "evaluations", "scores"]
