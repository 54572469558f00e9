"""Exception types shared across the toolkit."""


class KgvecError(Exception):
    """Base class for all toolkit errors."""


class EmptyCorpus(KgvecError):
    """No triples to work with."""


class NumericalDivergence(KgvecError):
    """Non-finite value produced during training (learning rate too high?)."""


class VocabularyTooLarge(KgvecError):
    """Exact softmax requested on a vocabulary above the enumeration guard."""


class FormatError(KgvecError):
    """Malformed model or scorer file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyPredicate(KgvecError):
    """Analogy score requested for a predicate with no triples."""


class DegenerateVocabulary(KgvecError):
    """Vocabulary lacks the entities/relations needed to sample negatives."""


class InsufficientCandidates(KgvecError):
    """Fewer candidate entities than requested neighbours."""


class DegenerateSplit(KgvecError):
    """Train/test split left no usable test triples."""


class SkippedTriple(KgvecError):
    """Test triple cannot be ranked (token without a vector); counted, not fatal."""


class FlagError(KgvecError):
    """Invalid flag combination or value."""
