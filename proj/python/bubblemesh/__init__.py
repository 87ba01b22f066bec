"""Bubble packing meshes of plates and parametric surfaces."""

from pathlib import Path

from ._bubblemesh import (
    BubbleMeshError,
    compare_qc,
    g_of_eps,
    load_mesh,
    quality,
    report,
    run_plane,
    run_surface,
)

__all__ = [
    "BubbleMeshError",
    "compare_qc",
    "g_of_eps",
    "load_mesh",
    "quality",
    "report",
    "run_plane",
    "run_surface",
    "run_config_file",
]


def run_config_file(path, out=""):
    """Run the pipeline named by the file's ``mode`` key (plane or surface)."""
    path = Path(path)
    text = path.read_text()
    mode = "plane"
    for line in text.splitlines():
        key, _, value = line.split("#", 1)[0].partition("=")
        if key.strip() == "mode":
            mode = value.strip()
    runners = {"plane": run_plane, "surface": run_surface, "compare-qc": compare_qc}
    if mode not in runners:
        raise ValueError(f"unsupported mode {mode!r}")
    return runners[mode](text, str(out), str(path.parent))
