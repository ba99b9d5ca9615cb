"""Select the compiled kernel module when it is importable.

Set ``SEMIKERNEL_PURE=1`` in the environment to force the numpy fallback.
"""
import os

from . import _numeric

_CONSTS = {
    name: getattr(_numeric, name)
    for name in (
        "AI0",
        "AIP0",
        "SERIES_MAX",
        "TABLE_LO",
        "TABLE_HI",
        "TABLE_STEP",
        "TAYLOR_TERMS",
        "ASYM_TERMS",
        "BESSEL_SERIES_MAX",
        "BESSEL_ASYM_MIN",
        "AIRY_PAIR_DIAG_TOL",
    )
}


def _load_compiled():
    if os.environ.get("SEMIKERNEL_PURE", "").strip() not in ("", "0"):
        return None
    try:
        from . import _ckernels
    except ImportError:
        return None
    _ckernels.configure(
        _CONSTS,
        _numeric.TABLE_NODES,
        _numeric.TABLE_AI,
        _numeric.TABLE_AIP,
        _numeric.ASYM_U,
        _numeric.ASYM_V,
    )
    return _ckernels


_compiled = _load_compiled()

if _compiled is not None:
    BACKEND = "compiled"
    airy = _compiled.airy
    bessel_j01 = _compiled.bessel_j01
    airy_pair_tail = _compiled.airy_pair_tail
else:
    BACKEND = "numpy"
    airy = _numeric.airy
    bessel_j01 = _numeric.bessel_j01
    airy_pair_tail = _numeric.airy_pair_tail
