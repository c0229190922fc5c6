"""
Tagged stderr logging for fundsol.

Levels and colors:
  DEBUG = dim grey
  INFO  = white/default
  WARN  = yellow
  ERROR = red

Every line reads "[Tag] message". Color is only used when stderr is a
terminal. stdout is reserved for JSON/CSV reports, so nothing here ever
writes to it. The threshold starts at INFO, or at FUNDSOL_LOG_LEVEL when
that is set, and the CLI moves it with --quiet / --verbose.
"""

import os
import sys

_RESET = "\033[0m"
_COLORS = {
    "debug": "\033[90m",
    "info": "\033[97m",
    "warn": "\033[93m",
    "error": "\033[91m",
}
_RANK = {"debug": 0, "info": 1, "warn": 2, "error": 3}

_threshold = _RANK.get(os.environ.get("FUNDSOL_LOG_LEVEL", "info").lower(), _RANK["info"])


def set_level(name):
    """Drop messages below `name` (debug, info, warn or error)."""
    global _threshold
    if name not in _RANK:
        raise ValueError("unknown log level %r" % name)
    _threshold = _RANK[name]


def enabled(level):
    return _RANK[level] >= _threshold


def _emit(level, tag, msg):
    if not enabled(level):
        return
    marker = "! " if level == "warn" else ""
    line = "[%s] %s%s" % (tag, marker, msg)
    if hasattr(sys.stderr, "isatty") and sys.stderr.isatty():
        line = _COLORS[level] + line + _RESET
    print(line, file=sys.stderr, flush=True)


def debug(tag, msg):
    _emit("debug", tag, msg)


def info(tag, msg):
    _emit("info", tag, msg)


def warn(tag, msg):
    _emit("warn", tag, msg)


def error(tag, msg):
    _emit("error", tag, msg)
