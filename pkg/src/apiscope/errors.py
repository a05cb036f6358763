"""Exception taxonomy for the analysis pipeline.

Every error type carries a distinct exit code so shell callers can tell
which stage rejected its input. Code 0 is success, 1 is an unexpected
failure, 2 is reserved for command-line usage errors.
"""

from __future__ import annotations


class PipelineError(Exception):
    """Base class for every stage-level failure raised by this package."""

    exit_code = 1


class ParseError(PipelineError):
    """A document is not syntactically well-formed."""

    exit_code = 10

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        suffix = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{suffix}")
        self.line = line
        self.column = column


class SchemaError(PipelineError):
    """A document parsed but violates the expected shape or a data invariant."""

    exit_code = 11


class UnknownClass(PipelineError):
    """A class name was looked up that the loaded bundle does not contain."""

    exit_code = 12


class VendorMismatch(PipelineError):
    """Two catalogs being diffed belong to different vendors."""

    exit_code = 13


class NoImplementationsFound(PipelineError):
    """No documented API name could be anchored to any class."""

    exit_code = 20


class NoInvariantsFound(PipelineError):
    """None of the four facets is uniform across the documented implementations."""

    exit_code = 21


class NoHandler(PipelineError):
    """Parameter extraction was asked for a class without a handler method."""

    exit_code = 22


class ManualCaseUnknownApi(PipelineError):
    """A manually supplied test case names an API with no matching candidate."""

    exit_code = 23


class NoDocumentedApis(PipelineError):
    """The runtime under observation exposes no documented API to trace."""

    exit_code = 30


class NoChainFound(PipelineError):
    """A trace contains no event carrying the invoked API's name."""

    exit_code = 31


class AmbiguousBridge(PipelineError):
    """Observations disagree on the chain-tail function; carries the per-trace evidence."""

    exit_code = 32

    def __init__(self, message: str, evidence: tuple = ()) -> None:
        super().__init__(message)
        self.evidence = tuple(evidence)


class CalibrationFailed(PipelineError):
    """The documented exemplar probe did not produce a clean success."""

    exit_code = 40


class MissingTestCases(PipelineError):
    """A candidate reached classification without a single test case."""

    exit_code = 41


class EmptyCorpus(PipelineError):
    """The scanned corpus directory contains no packages."""

    exit_code = 50


class SingleVersion(PipelineError):
    """Evolution analysis needs at least two catalog versions."""

    exit_code = 51


class IncompleteRun(PipelineError):
    """A report was requested over a run directory missing a stage output."""

    exit_code = 60

    def __init__(self, stage: str) -> None:
        super().__init__(f"run directory is missing the output of stage '{stage}'")
        self.stage = stage
