"""Exception hierarchy shared by all fedgen modules."""


class FedgenError(Exception):
    """Base class for all errors raised by this package."""


class NonDivisibleError(FedgenError):
    """The number of rounds does not divide the per-client dataset size."""


class IndexOutOfRangeError(FedgenError):
    """A 1-based sample or client index is outside its valid range."""


class VariantMismatchError(FedgenError):
    """A sample's variant (location vs. regression) or dimension does not match."""


class DimensionMismatchError(FedgenError):
    """Vector dimensions of models, samples or datasets are inconsistent."""


class EmptyListError(FedgenError):
    """An operation that needs at least one element received none."""


class NonFiniteIterateError(FedgenError):
    """An SGD iterate left the finite range (divergent learning rate)."""


class RetentionInsufficientError(FedgenError):
    """The trajectory does not retain the iterates required by the operation."""


class NoClosedFormError(FedgenError):
    """Exact population risk was requested but the distribution has no closed form."""


class FamilyMismatchError(FedgenError):
    """The data distribution is incompatible with the requested loss family."""


class TooLargeError(FedgenError):
    """The enumeration would exceed the brute-force size guard."""


class WrongShapeError(FedgenError):
    """The setup shape (R, n, K, variant) does not fit the requested check."""


class WrongRError(FedgenError):
    """The operation is only defined for a specific number of rounds."""


class NoisyRunUnsupportedError(FedgenError):
    """The bound evaluator does not cover noisy local updates (sigma_xi > 0)."""


class DomainError(FedgenError):
    """An input lies outside the mathematical domain of the function."""


class ParseError(FedgenError):
    """A config file line could not be parsed."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(FedgenError):
    """A config key has an invalid or inconsistent value."""

    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason


class TooFewRowsError(FedgenError):
    """The results table has too few rows for the requested output."""
