"""Exception types raised across the package.

Every error carries the name of the module that raised it so the CLI can
report it in a machine-readable error document.
"""

from __future__ import annotations


class NLSDualError(Exception):
    module = "nlsdual"


class InvalidParameters(NLSDualError, ValueError):
    module = "params"

    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(f"{v.field}: {v.message}" for v in self.violations)
        super().__init__(msg or "invalid parameters")


class NonRealAmplitude(NLSDualError, ArithmeticError):
    module = "params"


class DomainError(NLSDualError, ValueError):
    module = "special"


class AmbiguousClustering(NLSDualError, ArithmeticError):
    module = "quartic"


class UnsupportedPattern(NLSDualError, ValueError):
    module = "families"


class NotDegenerate(NLSDualError, ValueError):
    module = "families"


class SingularPoint(NLSDualError, ArithmeticError):
    module = "families"

    def __init__(self, location, message=None):
        self.location = location
        super().__init__(message or f"singular point at eta={location!r}")


class AllPointsSingular(NLSDualError, ArithmeticError):
    module = "verify"


class StiffnessFailure(NLSDualError, ArithmeticError):
    module = "verify"


class ConfigError(NLSDualError, ValueError):
    module = "cli"
