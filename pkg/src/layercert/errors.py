"""Exception taxonomy for the layercert toolkit.

Every failure mode that callers are expected to branch on gets its own class;
generic misuse (wrong types, violated preconditions) stays with the builtin
exceptions.
"""

from __future__ import annotations


class LayercertError(Exception):
    """Base class for all domain errors raised by this package."""


class DegenerateChart(LayercertError):
    """Ruled chart cannot be brought to gauge: vanishing ruling or directrix
    speed, or the first form degenerates on the requested domain."""


class ThicknessViolation(LayercertError):
    """Layer half-thickness too large: a*sup||shape|| exceeds the declared
    flatness bound, or the layer volume density is nonpositive somewhere."""


class UnstableWindow(LayercertError):
    """Polynomial degrees vary across the window and no stable sub-window of
    the required width exists."""


class QuadratureFailure(LayercertError):
    """Composite quadrature did not meet the error target within budget."""


class InconclusiveFit(LayercertError):
    """Growth fit matches neither a sublinear profile nor a clean power law."""


class NonconvergentTail(LayercertError):
    """Truncated integrals keep growing: no finite limit to extrapolate."""


class NotParabolicNumerically(LayercertError):
    """Capacity energy did not decay below target within the radius budget."""


class SupportViolation(LayercertError):
    """Window support is not contained in the plateau region of the radial
    profile function."""


class SearchExhausted(LayercertError):
    """Certificate search budget exhausted without a definite verdict."""


class NoConvergence(LayercertError):
    """Iterative eigensolver failed to converge to the requested tolerance."""


class ConfigError(LayercertError):
    """Invalid run configuration. Carries all diagnostics, not just the first.

    Each diagnostic is a (code, location, message) triple; location is
    'section.key' when known.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = [f"[{code}] {where}: {msg}" for code, where, msg in self.diagnostics]
        super().__init__("invalid configuration:\n" + "\n".join(lines))
