"""Shared console and filesystem helpers for groupspike."""

from __future__ import annotations

import sys
from contextlib import nullcontext
from pathlib import Path
from typing import Any, ContextManager

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn

from .icons import icon_check, icon_cross, icon_info, icon_warning

# Progress and status go to stderr so stdout stays machine-readable.
if sys.platform == "win32":
    console = Console(stderr=True, legacy_windows=True, force_terminal=True)
else:
    console = Console(stderr=True)


def get_home_config_dir() -> Path:
    """Get the configuration directory for groupspike."""
    home = Path.home()
    config_dir = home / ".groupspike"
    config_dir.mkdir(exist_ok=True)
    return config_dir


def print_success(message: str) -> None:
    """Print a success message."""
    console.print(f"[green]{icon_check()} {message}[/green]")


def print_error(message: str) -> None:
    """Print an error message."""
    console.print(f"[red]{icon_cross()} {message}[/red]")


def print_warning(message: str) -> None:
    """Print a warning message."""
    console.print(f"[yellow]{icon_warning()}  {message}[/yellow]")


def print_info(message: str) -> None:
    """Print an info message."""
    console.print(f"[blue]{icon_info()}  {message}[/blue]")


def with_progress(transient: bool = True) -> Progress:
    """Progress bar for replication sweeps."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        console=console,
        transient=transient,
    )


def status_message(message: str) -> ContextManager[Any]:
    """Return a status context that falls back safely on non-UTF8 Windows consoles."""
    encoding = (getattr(sys.stderr, "encoding", "") or "").lower()
    if sys.platform == "win32" and encoding != "utf-8":
        plain_message = message.replace("[bold green]", "").replace("[/bold green]", "")
        print_info(plain_message)
        return nullcontext()
    return console.status(message)


def format_seconds(seconds: float) -> str:
    """Format a duration for console output."""
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes, rest = divmod(seconds, 60)
    return f"{int(minutes)}m{rest:04.1f}s"
