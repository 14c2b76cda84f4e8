"""Figure rendering for bouquet CSV/JSON artifacts."""

from .figures import AbortedInputError, FigureJob, KINDS, render

__all__ = ["AbortedInputError", "FigureJob", "KINDS", "render"]
