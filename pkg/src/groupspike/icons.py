"""ASCII status markers for console output.

Plain brackets render on every terminal, including legacy Windows consoles
and CI logs captured without UTF-8.
"""

from typing import Dict

_ICONS: Dict[str, str] = {
    "check": "[OK]",
    "cross": "[X]",
    "warning": "[!]",
    "info": "[i]",
    "chain": "[MCMC]",
    "table": "[TABLE]",
}


def icon_check() -> str:
    return _ICONS["check"]


def icon_cross() -> str:
    return _ICONS["cross"]


def icon_warning() -> str:
    return _ICONS["warning"]


def icon_info() -> str:
    return _ICONS["info"]


def icon_chain() -> str:
    """Marker for sampler output."""
    return _ICONS["chain"]


def icon_table() -> str:
    """Marker for summary tables."""
    return _ICONS["table"]
