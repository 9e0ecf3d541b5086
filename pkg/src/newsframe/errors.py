"""Exception types shared across the package.

Errors that signal bad caller input subclass ValueError so generic
handling keeps working; operational failures (network, convergence)
subclass RuntimeError.
"""


class NewsframeError(Exception):
    """Base class for all package-specific errors."""


# --- input / contract violations -------------------------------------------

class EmptyVocabulary(NewsframeError, ValueError):
    """No n-gram met the document-frequency cutoff."""


class EmptyCorpus(NewsframeError, ValueError):
    """An operation required a nonempty corpus."""


class MissingField(NewsframeError, ValueError):
    def __init__(self, name):
        super().__init__(f"required field missing: {name}")
        self.name = name


class BadDate(NewsframeError, ValueError):
    """A publication date could not be parsed."""


class ParseError(NewsframeError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SingleClass(NewsframeError, ValueError):
    """Training labels contained only one class."""


class DimensionMismatch(NewsframeError, ValueError):
    """A vector's length did not match the trained vocabulary."""


class IndexOutOfRange(NewsframeError, IndexError):
    """An n-gram column index fell outside the matrix."""


class OutOfVocabulary(NewsframeError, KeyError):
    def __init__(self, token):
        super().__init__(f"token not in embedding vocabulary: {token!r}")
        self.token = token


class NegativeDistance(NewsframeError, ValueError):
    """similarity() requires a non-negative distance."""


class EmptyReport(NewsframeError, ValueError):
    """A keyword distance report with no pairs cannot be scored."""


class DegenerateScores(NewsframeError, ValueError):
    """All calibration scores are equal; a two-component fit is undefined."""


class LengthMismatch(NewsframeError, ValueError):
    """Paired sequences had different lengths."""


class ZeroVariance(NewsframeError, ValueError):
    """Pearson correlation is undefined for a constant vector."""


class TooFewArticles(NewsframeError, ValueError):
    """Pairwise correlation needs at least two usable articles."""


class TooFewYears(NewsframeError, ValueError):
    """Annual differencing needs at least two years."""


class YearNotInSeries(NewsframeError, ValueError):
    """The requested year is not covered by the feature series."""


class NoQuiescentYears(NewsframeError, ValueError):
    """Every year publishes at the same level; no quiet period exists."""


class NoTrainingPairs(NewsframeError, ValueError):
    """No consecutive feature-change pairs were available for fitting."""


class EmptyRow(NewsframeError, ValueError):
    """A joint-table row has zero mass (only possible with alpha=0)."""


class EmptyCounts(NewsframeError, ValueError):
    """Accuracy is undefined on an empty confusion table."""


# --- operational failures ---------------------------------------------------

class AuthError(NewsframeError, RuntimeError):
    """API key missing from the environment or rejected by the server."""


class RateLimited(NewsframeError, RuntimeError):
    def __init__(self, retry_after=None):
        suffix = f" (retry after {retry_after}s)" if retry_after else ""
        super().__init__(f"rate limited by the article API{suffix}")
        self.retry_after = retry_after


class NetworkError(NewsframeError, RuntimeError):
    """The article API was unreachable or returned a server error."""


class ConvergenceFailure(NewsframeError, RuntimeError):
    """The iterative singular-value solver exhausted its budget."""


class NoConvergence(NewsframeError, RuntimeError):
    """The mixture fit failed to reach its likelihood tolerance."""
