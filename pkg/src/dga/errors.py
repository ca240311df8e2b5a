"""Exception hierarchy shared by every module of the toolkit."""


class DGAError(Exception):
    """Base class for all errors raised by :mod:`dga`."""


class InvalidInputError(DGAError, ValueError):
    """Malformed graph, automaton, formula or mapping."""


class AlphabetMismatchError(InvalidInputError):
    """Two objects over different universes were combined."""


class InvalidAutomatonError(InvalidInputError):
    """An automaton violates the level discipline or references unknown names.

    The individual findings are kept in ``diagnostics``.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        text = "; ".join(f"{d.code}: {d.message}" for d in self.diagnostics)
        super().__init__(text or "invalid automaton")


class ContractError(DGAError):
    """A construction was applied to an input outside its domain."""


class UndecidableError(ContractError):
    """The requested question has no decision procedure for this input class."""


class ResourceLimitError(DGAError):
    """A configured cap on positions, graphs or subsets was exceeded."""


class SyntaxErrorAt(InvalidInputError):
    """Parse failure with the character offset where it was detected."""

    def __init__(self, message, text, pos):
        self.text = text
        self.pos = pos
        pointer = f"\n  {text}\n  {' ' * pos}^" if text is not None else ""
        super().__init__(f"{message} at offset {pos}{pointer}")
