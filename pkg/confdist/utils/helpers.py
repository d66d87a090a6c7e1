"""
Generic helper functions.
"""


def format_seconds(seconds) -> str:
    """
    Format a duration in seconds for status lines.

    Returns "N/A" for missing input, milliseconds below one second.
    """
    if seconds is None:
        return "N/A"
    if seconds < 1:
        return f"{seconds * 1000:.1f}ms"
    minutes = int(seconds // 60)
    if minutes:
        return f"{minutes}m{seconds % 60:04.1f}s"
    return f"{seconds:.2f}s"


def format_stack(names) -> str:
    return "[" + ",".join(names) + "]"
