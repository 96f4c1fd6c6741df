"""Exception hierarchy shared by all pipeline stages."""


class SigtypeError(Exception):
    """Base class for every error raised deliberately by this package."""


class DataError(SigtypeError):
    """Input data is missing, malformed or insufficient."""


class MissingFile(DataError, FileNotFoundError):
    pass


class DuplicateProjectId(DataError):
    pass


class MalformedManifest(DataError):
    pass


class ParseFailure(DataError):
    """A source file could not be parsed as Python 3."""

    def __init__(self, project_id, relative_path, reason):
        super().__init__(f"{project_id}:{relative_path}: {reason}")
        self.project_id = project_id
        self.relative_path = relative_path
        self.reason = reason


class EmptyDataset(DataError):
    pass


class EmptyVocabulary(DataError):
    pass


class EmptyTestSet(DataError):
    pass


class VocabHashMismatch(DataError):
    pass


class MalformedFile(DataError):
    """A binary or text artifact does not match its declared layout."""


class ShapeMismatch(SigtypeError, ValueError):
    pass


class NumericError(SigtypeError):
    pass


class NonFiniteLoss(NumericError):
    def __init__(self, epoch, batch, value):
        super().__init__(f"non-finite loss {value!r} at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch
        self.value = value
