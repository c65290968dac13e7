"""
File operation utilities.

Path helpers shared by the dataset loader and the command-line tools.
"""

from pathlib import Path

DENSE_EXTENSIONS = {'.csv', '.txt'}
SPARSE_EXTENSIONS = {'.svm', '.libsvm', '.svmlight'}
TRUTH_SUFFIX = '.truth.json'


def ensure_directory(path: str | Path) -> Path:
    """
    Ensure a directory exists, creating it if necessary.

    Args:
        path: Directory path.

    Returns:
        Path object for the directory.
    """
    dir_path = Path(path)
    dir_path.mkdir(parents=True, exist_ok=True)
    return dir_path


def ensure_parent(path: str | Path) -> Path:
    """Create the parent directory of a file path and return the path."""
    file_path = Path(path)
    if file_path.parent != Path(''):
        file_path.parent.mkdir(parents=True, exist_ok=True)
    return file_path


def file_exists(path: str | Path) -> bool:
    """
    Check if a regular file exists.

    Args:
        path: File path to check.

    Returns:
        True if the file exists, False otherwise.
    """
    return Path(path).is_file()


def detect_format(path: str | Path) -> str:
    """
    Guess the dataset format from the file extension.

    Args:
        path: Dataset path.

    Returns:
        'sparse' for LIBSVM extensions, 'dense' otherwise.
    """
    suffix = Path(path).suffix.lower()
    return 'sparse' if suffix in SPARSE_EXTENSIONS else 'dense'


def truth_sidecar_path(dataset_path: str | Path) -> Path:
    """
    Path of the planted-truth JSON written next to a dataset.

    "data/p.csv" maps to "data/p.truth.json".
    """
    dataset_path = Path(dataset_path)
    return dataset_path.with_name(dataset_path.stem + TRUTH_SUFFIX)
