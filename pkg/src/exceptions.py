class CommunityDetectionError(Exception):
    """Base exception"""

class GraphFormatError(CommunityDetectionError):
    """Input file does not parse under the named format"""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)

class EmptyGraphError(CommunityDetectionError):
    """Graph has no edges, so modularity is undefined"""

class InvalidMoveError(CommunityDetectionError):
    """Requested move is not to a neighboring community"""

class PartitionMismatchError(CommunityDetectionError):
    """Two assignments do not cover the same vertex set"""

class ConfigError(CommunityDetectionError):
    """Run configuration failed validation"""

class OracleLimitError(CommunityDetectionError):
    """Input too large for a quadratic test oracle"""

class ConsistencyCheckError(CommunityDetectionError):
    """Tracked modularity disagrees with a full recomputation"""
