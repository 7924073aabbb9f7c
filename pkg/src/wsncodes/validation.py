"""Input checks shared by the codec estimators."""
import numpy as np

SAMPLE_MAX = 255


def check_sample(value) -> int:
    v = int(value)
    if v != value or not 0 <= v <= SAMPLE_MAX:
        raise ValueError(f"sample {value!r} outside 0..{SAMPLE_MAX}")
    return v


def check_samples(X) -> np.ndarray:
    """Coerce ``X`` into a 1-D int64 array of 8-bit samples.

    A single-column 2-D array is flattened, as sklearn transformers
    commonly receive ``(n_samples, 1)`` input.
    """
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected 1-D samples, got shape {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.mod(arr, 1) == 0):
            raise ValueError("samples must be integers")
    arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() > SAMPLE_MAX):
        raise ValueError(f"samples must lie in 0..{SAMPLE_MAX}")
    return arr


def check_pairs(X) -> np.ndarray:
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected (n_samples, 2) pairs, got shape {arr.shape}")
    cols = [check_samples(arr[:, i]) for i in range(2)]
    return np.column_stack(cols) if arr.shape[0] else np.zeros((0, 2), dtype=np.int64)


def check_coded(C, width: int) -> np.ndarray:
    arr = np.asarray(C, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != width:
        raise ValueError(f"expected coded array with {width} columns, got shape {arr.shape}")
    return arr
