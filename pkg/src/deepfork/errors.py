"""Exception types shared across the pipeline stages."""


class DeepforkError(Exception):
    """Base class for all pipeline errors."""


class MalformedLine(DeepforkError):
    """A JSONL record could not be decoded or violates a field invariant."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class DanglingReference(DeepforkError):
    """An event references a user or repo id with no loaded profile."""


class UnknownNode(DeepforkError):
    """A graph query named a node that is not part of the graph."""


class UnknownId(DeepforkError):
    """A triplet references an id with no profile or graph node."""


class NegativeAge(DeepforkError):
    """A profile creation timestamp lies after the reference time."""


class NoPositives(DeepforkError):
    """Negative balancing needs at least one positive triplet."""


class TooFewSamples(DeepforkError):
    """A stratified split needs at least two samples per class."""


class BadDim(DeepforkError):
    """Unsupported input dimension for a network preset."""


class BadShape(DeepforkError):
    """Batch shape does not match the network input dimension."""


class TrainBatchTooSmall(DeepforkError):
    """Batch statistics need at least two rows in training mode."""


class BadStep(DeepforkError):
    """Adam step index must be >= 1."""


class DegenerateData(DeepforkError):
    """Training data contains only one class."""


class BadHyperparam(DeepforkError):
    """A classifier hyperparameter is out of range."""


class NotFitted(DeepforkError):
    """predict/predict_proba called before fit."""


class EmptyInput(DeepforkError):
    """Metrics requested for an empty evaluation set."""


class OneClassOnly(DeepforkError):
    """ROC/AUC is undefined when only one class is present."""


class BadConfig(DeepforkError):
    """A generator or CLI configuration value is out of range."""
