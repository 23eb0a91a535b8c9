"""Backend selection: compiled extension when available, numpy otherwise."""

from fracfield import _slowkern

try:
    from fracfield import _fastkern as _impl

    BACKEND = "compiled"
except ImportError:  # extension not built on this install
    _impl = _slowkern
    BACKEND = "python"

dwt_analyze_level = _impl.dwt_analyze_level
dwt_synthesize_level = _impl.dwt_synthesize_level
graph_energy_1d = _impl.graph_energy_1d
