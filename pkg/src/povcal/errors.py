"""Exception hierarchy."""


class PovcalError(Exception):
    pass


class InputError(PovcalError, ValueError):
    """Malformed or out-of-domain input data."""


class DimMismatch(InputError):
    pass


class BackendMismatch(InputError):
    pass


class NonHermitian(InputError):
    pass


class InvalidEffect(InputError):
    pass


InvalidAtom = InvalidEffect


class InvalidState(InputError):
    pass


class NotFaithful(InputError):
    pass


class NotComparable(InputError):
    pass


class NotNormalized(InputError):
    pass


class DuplicateLabel(InputError):
    pass


class PartialFunction(InputError):
    pass


class InvalidKernel(InputError):
    pass


class MaskViolation(InputError):
    pass


class UnknownGenerator(InputError, KeyError):
    pass


class EmptyFamily(InputError):
    pass


class NotDeterministicKernel(InputError):
    pass


class NotASmearing(InputError):
    pass


class NotCommuting(PovcalError):
    """The operators do not pairwise commute."""


class DegeneracyResolutionFailed(PovcalError):
    pass


class NumericalFailure(PovcalError, ArithmeticError):
    """A numerical routine could not reach a trustworthy verdict."""


class MonotonicityViolation(PovcalError, ArithmeticError):
    pass
