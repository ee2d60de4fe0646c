"""Exception types shared across the package."""


class CutLocusError(ValueError):
    """Logarithm requested at or beyond the injectivity radius."""


class FiberMismatchError(ValueError):
    """Fiberwise operation applied to elements over different base points."""


class ShapeError(ValueError):
    """Discrete maps with incompatible grids or targets."""


class EvaluationError(RuntimeError):
    """A functional or path returned a non-finite value.

    When raised inside a descent loop, the partial trace accumulated so
    far is attached as the ``trace`` attribute.
    """

    trace = None


class ConfigError(ValueError):
    """Malformed run configuration; message carries file/line/field info."""
