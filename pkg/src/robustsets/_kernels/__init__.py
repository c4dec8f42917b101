"""Hot-loop kernels: compiled extension when available, numpy fallback otherwise.

Set ROBUSTSETS_PURE=1 to force the fallback lane (used by the benchmark
and the cross-lane tests).
"""
import os

_FORCE_PURE = os.environ.get("ROBUSTSETS_PURE", "") not in ("", "0")

if _FORCE_PURE:
    from . import _fallback as _impl
    HAVE_COMPILED = False
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        HAVE_COMPILED = True
    except ImportError:
        from . import _fallback as _impl
        HAVE_COMPILED = False

mwu_table_loop = _impl.mwu_table_loop
knapsack_min_size_dp = _impl.knapsack_min_size_dp
cardinality_min_size_dp = _impl.cardinality_min_size_dp


def implementation_name() -> str:
    return "compiled" if HAVE_COMPILED else "pure"
