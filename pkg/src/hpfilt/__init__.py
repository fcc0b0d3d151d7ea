"""Hodrick-Prescott trend filters with an incremental O(l^2) algorithm."""
from .filters import (Decomposition, FilterConfig, IncrementalHpState,
                      SohpResult, TraceCache, bhp, build_trace_cache,
                      cycle_moments, hp_direct, hp_incremental, incr_init,
                      incr_step, ohp, si_value, sohp)

__version__ = "0.1.0"
