"""Exception hierarchy shared by all modules."""


class NanotrapError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class DatasetError(NanotrapError):
    """Malformed or physically invalid transition table."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResonanceError(NanotrapError):
    """Drive frequency lies inside the guard band of an atomic line."""


class CutoffError(NanotrapError):
    """No guided HE11 solution found in the propagation-constant bracket."""


class NoSignChangeError(NanotrapError):
    """Magic-wavelength bracket contains no crossing."""


class MultipleRootsError(NanotrapError):
    """More than one crossing in a bracket; ``roots`` holds all of them."""

    def __init__(self, roots):
        self.roots = list(roots)
        joined = ", ".join(f"{r:.4f}" for r in self.roots)
        super().__init__(f"multiple crossings in bracket: {joined} nm")


class NoMinimumError(NanotrapError):
    """Radial curve has no interior minimum in the search window."""
