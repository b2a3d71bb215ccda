"""Exception hierarchy shared by all pipeline stages."""


class ExpertFindError(Exception):
    """Base class for all errors raised by this package."""


class AllDocumentsEmpty(ExpertFindError):
    """Every document was emptied by preprocessing/filtering."""


class TooFewInitiatives(ExpertFindError):
    """Corpus has fewer than two initiatives; cannot partition."""


class EmptyCorpus(ExpertFindError):
    pass


class InvalidK(ExpertFindError):
    pass


class NoKnownTerms(ExpertFindError):
    """Document shares no terms with the model vocabulary."""


class DegenerateDistribution(ExpertFindError):
    """All probabilities are zero; no topic can be selected."""


class ZeroDenominator(ExpertFindError):
    pass


class EmptyInput(ExpertFindError):
    pass


class DuplicateSubprofile(ExpertFindError):
    pass


class ZeroVector(ExpertFindError):
    pass


class UndefinedForEmptyQrel(ExpertFindError):
    pass


class EmptyQuery(ExpertFindError):
    """Nothing survived query preprocessing."""


class SingleCategory(ExpertFindError):
    """Normalized entropy needs at least two categories."""


class InvalidSpec(ExpertFindError):
    pass


class MissingArtifact(ExpertFindError):
    pass


class MalformedConfig(ExpertFindError):
    pass
