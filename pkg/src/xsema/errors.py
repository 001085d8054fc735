"""Exception hierarchy shared across the toolkit."""


class XsemaError(Exception):
    """Base class for all toolkit errors."""


# --- core / validation ---

class MalformedAddressError(XsemaError):
    pass


class MetadataValidationError(XsemaError):
    """Raised on field-missing, kind-mismatch, or malformed-value problems."""


# --- ingest ---

class DatasetError(XsemaError):
    pass


class ParseError(DatasetError):
    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class DuplicateHashError(DatasetError):
    def __init__(self, tx_hash):
        self.tx_hash = tx_hash
        super().__init__(f"duplicate transaction hash: {tx_hash}")


class ConflictingLabelError(DatasetError):
    def __init__(self, tx_hash):
        self.tx_hash = tx_hash
        super().__init__(f"conflicting labels for hash: {tx_hash}")


class MissingDefaultError(DatasetError):
    """Unlabeled items remain and the default-NT flag was not given."""


class FetchError(XsemaError):
    pass


class TxNotFoundError(FetchError):
    pass


class TraceUnsupportedError(FetchError):
    pass


class RateLimitedError(FetchError):
    pass


class NetworkError(FetchError):
    pass


# --- graph / motif ---

class GraphTooLargeError(XsemaError):
    def __init__(self, n_nodes, cap):
        super().__init__(f"graph has {n_nodes} nodes, cap is {cap}")


class UnsupportedCatalogError(XsemaError):
    """The fast census only supports the default catalog."""


# --- encoder / fuse / classify ---

class DimensionMismatchError(XsemaError):
    pass


class MissingClassError(XsemaError):
    pass


class NonFiniteInputError(XsemaError):
    pass


class DivergenceError(XsemaError):
    def __init__(self, last_stable_epoch):
        self.last_stable_epoch = last_stable_epoch
        super().__init__(f"loss became non-finite; last stable epoch {last_stable_epoch}")


class RemoteEncoderError(XsemaError):
    pass


class ServerError(RemoteEncoderError):
    def __init__(self, status, message=""):
        self.status = status
        super().__init__(f"embedding server returned {status}: {message}")


class EmptyTrainError(XsemaError):
    pass


class UnfittedScalerError(XsemaError):
    pass


class SingleClassError(XsemaError):
    pass


# --- bundles ---

class BundleError(XsemaError):
    pass


class VersionMismatchError(BundleError):
    pass


class CorruptBundleError(BundleError):
    pass


# --- evaluation / synth / cli ---

class SplitError(XsemaError):
    pass


class BridgeOverlapError(SplitError):
    pass


class ConfigError(XsemaError):
    pass


class UnrealizableMotifError(XsemaError):
    pass
