from typing import Optional


class FastOnnError(Exception):
    """Base exception for every simulator error"""
    def __init__(self, detail="Simulator error"):
        super().__init__(detail)
        self.detail = detail


class ConfigError(FastOnnError):
    """Exception for invalid or unreadable configuration"""
    def __init__(self, detail="Invalid configuration"):
        super().__init__(detail)


class DimensionError(FastOnnError, ValueError):
    """Exception for array shapes that do not match the configured geometry"""
    def __init__(self, detail="Dimension mismatch"):
        super().__init__(detail)


class DomainError(FastOnnError, ValueError):
    """Exception for arguments outside a function's domain"""
    def __init__(self, detail="Argument outside domain"):
        super().__init__(detail)


class InfeasibleError(FastOnnError):
    """Exception for targets the noise model cannot reach"""
    def __init__(self, detail="Target is infeasible", plateau_bits: Optional[float] = None):
        super().__init__(detail)
        self.plateau_bits = plateau_bits


class CalibrationRangeError(FastOnnError):
    """Exception for calibration sweeps with too little dynamic range"""
    def __init__(self, detail="Insufficient calibration range"):
        super().__init__(detail)


class DeadChannelError(FastOnnError):
    """Exception for a fanout channel that returns no light"""
    def __init__(self, channel: int, detail: Optional[str] = None):
        super().__init__(detail or f"Channel {channel} has zero response")
        self.channel = channel


class FormatError(FastOnnError, ValueError):
    """Exception for files with an unexpected binary layout"""
    def __init__(self, detail="Unrecognised file format"):
        super().__init__(detail)


class LengthError(FastOnnError, ValueError):
    """Exception for truncated payloads"""
    def __init__(self, detail="Payload is truncated"):
        super().__init__(detail)


class PairingError(FastOnnError, ValueError):
    """Exception for image and label files that do not pair up"""
    def __init__(self, detail="Image and label counts differ"):
        super().__init__(detail)


class GeometryError(FastOnnError, ValueError):
    """Exception for kernel/stride settings that do not tile an image"""
    def __init__(self, detail="Kernel and stride do not tile the input"):
        super().__init__(detail)


class LabelError(FastOnnError, ValueError):
    """Exception for class labels outside 0..9"""
    def __init__(self, detail="Label out of range"):
        super().__init__(detail)


class EmptyDatasetError(FastOnnError, ValueError):
    """Exception for operations that need at least one sample"""
    def __init__(self, detail="Dataset is empty"):
        super().__init__(detail)


class InternalError(FastOnnError):
    """Exception for broken internal invariants"""
    def __init__(self, detail="Internal error"):
        super().__init__(detail)
