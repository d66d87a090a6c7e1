"""
Safe file system operations with error handling.
"""
import os


def safe_makedirs(dirpath: str, exist_ok: bool = True) -> bool:
    """
    Safely create directory with proper error handling.
    Returns True if directory was created or already exists, False on error.
    """
    try:
        os.makedirs(dirpath, exist_ok=exist_ok)
        return True
    except (PermissionError, OSError) as e:
        print(f"Error: Failed to create directory {dirpath}: {e}")
        return False


def safe_read_text(filepath: str):
    """
    Read a UTF-8 text file.
    Returns the content, or None if the file is missing or unreadable.
    """
    try:
        with open(filepath, "r", encoding="utf-8") as f:
            return f.read()
    except (FileNotFoundError, PermissionError, IsADirectoryError, UnicodeDecodeError, OSError):
        return None


def safe_write_text(filepath: str, text: str) -> bool:
    """
    Write text to filepath, creating parent directories.
    Returns True on success.
    """
    parent = os.path.dirname(os.path.abspath(filepath))
    if not safe_makedirs(parent):
        return False
    try:
        with open(filepath, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        return True
    except (PermissionError, IsADirectoryError, OSError) as e:
        print(f"Error: Failed to write {filepath}: {e}")
        return False
