import os


def _debug_flag_enabled(flag: str) -> bool:
    flag_value = os.getenv(flag)
    return flag_value is not None and (flag_value == "1" or flag_value.lower() == "true")


VERBOSE_STDOUT_LOGS = _debug_flag_enabled("APTREE_VERBOSE_STDOUT_LOGS")
"""Attach a DEBUG-level stdout handler to the library logger when the CLI starts."""

DISABLE_TRACING = _debug_flag_enabled("APTREE_DISABLE_TRACING")
"""Disable trace and span creation globally. Spans become no-ops."""
