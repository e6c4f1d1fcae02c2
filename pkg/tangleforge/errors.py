class TangleForgeError(Exception):
    pass


class ConfigError(TangleForgeError):
    pass


class InvalidArgument(TangleForgeError, ValueError):
    pass


class GraphParseError(TangleForgeError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class NotASeparationError(TangleForgeError):
    def __init__(self, message, edge=None):
        self.edge = edge
        super().__init__(message)


class StarAxiomError(TangleForgeError):
    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)


class StructureError(TangleForgeError):
    pass


class GluingError(StructureError):
    def __init__(self, message, node=None, separation=None):
        self.node = node
        self.separation = separation
        super().__init__(message)


class Refusal(TangleForgeError):
    """A precondition or search bound was not met; nothing was proved wrong."""

    def __init__(self, reason, status="refused", details=None):
        self.reason = reason
        self.status = status
        self.details = details or {}
        super().__init__(reason)


class SoundnessError(TangleForgeError):
    """Two computations that must agree did not. Always a bug."""


class CertificateError(TangleForgeError):
    def __init__(self, clause):
        self.clause = clause
        super().__init__(clause)
