"""Exception types raised across the toolkit."""


class JetMismatchError(ValueError):
    """Jets with different expansion points or orders were combined."""


class OutsideChartError(ValueError):
    """A parameter value or segment leaves the chart rectangle."""


class DegenerateChartError(ValueError):
    """g_w vanishes (or nearly so) on the chart: umbilic or branch point."""


class NonCanonicalError(ValueError):
    """An operation that needs canonical data f = e^{i theta0} / (2 g_w) got something else."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not converge within its refinement budget."""


class DegenerateCurveError(ValueError):
    """Curvature vanishes, so torsion or a Frenet quantity is undefined."""


class PatchError(ValueError):
    """Input is not a minimal principal patch."""
