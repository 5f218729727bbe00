"""Exception types raised by the estimation pipeline."""


class MagnonMetrologyError(Exception):
    pass


class ConfigError(MagnonMetrologyError, ValueError):
    """Unknown parameter id, malformed value or grid."""


class SingularDrift(MagnonMetrologyError):
    """Drift matrix numerically singular; the operating point sits on a stability boundary."""


class NotHurwitz(MagnonMetrologyError):
    pass


class IllConditioned(MagnonMetrologyError):
    pass


class StepFailure(MagnonMetrologyError):
    pass


class UnstablePerturbation(MagnonMetrologyError):
    pass


class StabilityInconsistency(MagnonMetrologyError):
    """Routh-Hurwitz verdict and eigenvalue signs disagree outside the marginal band."""


class NonPhysicalState(MagnonMetrologyError):
    pass


class SingularGamma(MagnonMetrologyError):
    """2C + i Omega is (near-)singular, i.e. the state is (near-)pure and the RLD QFIM diverges."""

    def __init__(self, message, singular_value=None):
        super().__init__(message)
        self.singular_value = singular_value


class SingularQfim(MagnonMetrologyError):
    pass


class TruncationLeak(MagnonMetrologyError):
    pass


class RankDeficient(MagnonMetrologyError):
    pass
