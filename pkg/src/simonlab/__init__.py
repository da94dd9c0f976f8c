"""Exact computational laboratory for the linear Simon's problem over F_p^n."""

__version__ = "0.1.0"
