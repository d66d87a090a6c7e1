"""
Coloured console logging to stderr with an in-memory buffer.
"""
import sys
from datetime import datetime

from colorama import Fore, Style

from confdist.core.constants import MAX_LOGS
from confdist.core.state import console_logs

LEVEL_COLORS = {
    "info": Fore.CYAN,
    "success": Fore.GREEN,
    "warning": Fore.YELLOW,
    "error": Fore.RED,
}


def log_console(message: str, level: str = "info") -> None:
    """Add message to console logs and echo it on stderr."""
    console_logs.append({
        "message": message,
        "level": level,
        "time": datetime.now().isoformat()
    })
    if len(console_logs) > MAX_LOGS:
        console_logs.pop(0)
    color = LEVEL_COLORS.get(level, "")
    print(f"{color}{message}{Style.RESET_ALL}", file=sys.stderr)
