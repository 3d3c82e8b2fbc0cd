"""Exception hierarchy shared by every module."""


class GammaForgeError(Exception):
    """Base class for all library errors."""


class InvalidParameter(GammaForgeError, ValueError):
    pass


class NotGenerating(GammaForgeError, ValueError):
    """A set of elements does not generate the required group."""


class InvalidTransition(GammaForgeError, ValueError):
    pass


class PreconditionError(GammaForgeError):
    """An operation's mathematical precondition does not hold."""


class QualifyingCircuitExists(PreconditionError):
    """Raised with a witness circuit when an edge-block cannot be relabeled."""

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class MalformedImmersion(GammaForgeError, ValueError):
    pass


class InvalidCertificate(GammaForgeError, ValueError):
    def __init__(self, message, clause):
        super().__init__(message)
        self.clause = clause


class NoProperSubgroup(GammaForgeError, ValueError):
    pass


class BudgetExceeded(GammaForgeError):
    """A bounded search ran out of node expansions before reaching an answer."""


class RichFlowerFound(GammaForgeError):
    """The structure pipeline found a rich flower immersion instead of a certificate.

    This is a legitimate mathematical outcome: the host graph does not forbid the
    rich flower, so the structure theorem's hypothesis fails.
    """

    def __init__(self, message, pattern, immersion):
        super().__init__(message)
        self.pattern = pattern
        self.immersion = immersion


class ParseError(GammaForgeError, ValueError):
    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location
