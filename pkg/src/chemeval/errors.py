"""Exception types shared across the toolkit."""

from __future__ import annotations


class ChemEvalError(Exception):
    """Base class for every error raised by this package."""


class SmilesSyntaxError(ChemEvalError, ValueError):
    """A SMILES string could not be parsed.

    Attributes:
        kind: Machine-readable failure class. One of ``invalid_syntax``,
            ``mismatched_brackets``, ``ring_closure_error``,
            ``unknown_element``, ``invalid_isotope``, ``dangling_bond``,
            ``unsupported_feature``.
        position: Character offset at which the problem was detected.
    """

    KINDS = (
        "invalid_syntax",
        "mismatched_brackets",
        "ring_closure_error",
        "unknown_element",
        "invalid_isotope",
        "dangling_bond",
        "unsupported_feature",
    )

    def __init__(self, kind: str, position: int, message: str):
        if kind not in self.KINDS:
            raise ValueError(f"unknown syntax error kind {kind!r}")
        self.kind = kind
        self.position = position
        self.message = message
        super().__init__(f"{message} (position {position})")


class ReactionSyntaxError(SmilesSyntaxError):
    """A reaction SMILES failed to parse; ``component`` says where."""

    def __init__(self, kind: str, position: int, message: str, component: tuple[str, int] | None = None):
        super().__init__(kind, position, message)
        self.component = component


class AromaticityError(ChemEvalError):
    """A ring declared aromatic cannot be kekulized or fails the 4n+2 rule."""

    def __init__(self, message: str, atoms: tuple[int, ...] = ()):
        super().__init__(message)
        self.atoms = atoms


class StandardizationConflict(ChemEvalError):
    pass


class EmptyCorpus(ChemEvalError, ValueError):
    pass


class DomainError(ChemEvalError, ValueError):
    pass


class InsufficientData(ChemEvalError, ValueError):
    pass


class ZeroVariance(ChemEvalError, ValueError):
    pass


class RatioError(ChemEvalError, ValueError):
    pass


class RuleTableMissing(ChemEvalError):
    pass


class CatalogMissing(ChemEvalError):
    pass


class RankError(ChemEvalError, ValueError):
    pass


class ShapeError(ChemEvalError, ValueError):
    pass


class ConfigError(ChemEvalError, ValueError):
    pass


class MetadataMissing(ChemEvalError):
    pass
