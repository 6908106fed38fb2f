"""Exception types shared across the toolkit."""


class VolentropyError(Exception):
    """Base class for all toolkit errors."""


class DocumentError(VolentropyError):
    """Malformed input document (bad syntax, missing or unknown fields)."""


class GraphError(VolentropyError):
    """Invalid graph data or violated operation precondition."""


class ConvergenceError(VolentropyError):
    """Numerical iteration failed to converge within its configured caps."""
