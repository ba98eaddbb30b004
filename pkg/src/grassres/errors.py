"""Exception types shared by all grassres modules.

Each error carries a short machine-readable ``code`` so the CLI can map
failures onto exit statuses without string matching.
"""


class GrassresError(Exception):
    code = "error"


class InvalidParameters(GrassresError, ValueError):
    code = "invalid-parameters"


class InvalidEntry(GrassresError, ValueError):
    code = "invalid-entry"


class NotPrimary(GrassresError, ValueError):
    code = "not-primary"


class DomainError(GrassresError, ValueError):
    code = "domain-error"


class DivisionError(GrassresError, ArithmeticError):
    code = "division-error"


class ResourceLimit(GrassresError):
    code = "resource-limit"


class InvalidChart(GrassresError, ValueError):
    code = "invalid-chart"


class NonterminationError(GrassresError):
    code = "nontermination-error"


class InsufficientSampling(GrassresError):
    code = "insufficient-sampling"


class NotAMatroid(GrassresError, ValueError):
    code = "not-a-matroid"


class InvalidChartForMatroid(GrassresError, ValueError):
    code = "invalid-chart-for-matroid"
