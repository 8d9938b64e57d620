"""Exception types. Each carries a short machine-readable ``code``."""


class SimError(Exception):
    code = "sim_error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context

    def one_line(self):
        extra = " ".join(f"{k}={v}" for k, v in sorted(self.context.items()))
        return f"error={self.code} message={str(self).replace(chr(10), ' ')!r}" + (f" {extra}" if extra else "")


class DomainError(SimError, ValueError):
    code = "domain_error"


class ContactDivergence(DomainError):
    code = "contact_divergence"


class BeyondRWA(SimError, ValueError):
    code = "beyond_rwa"


class NonIdenticalAtoms(SimError, ValueError):
    code = "non_identical_atoms"


class StiffFailure(SimError, RuntimeError):
    code = "stiff_failure"


class NonUniqueSteadyState(SimError, RuntimeError):
    code = "non_unique_steady_state"


class NotConverged(SimError, RuntimeError):
    code = "not_converged"


class AliasingRisk(SimError, ValueError):
    code = "aliasing_risk"


class ConfigError(SimError, ValueError):
    code = "bad_config"


class UnknownPreset(ConfigError):
    code = "unknown_preset"
