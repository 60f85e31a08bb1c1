"""Joint trajectory maps: skeleton sequences rendered as color images."""

from ._core import (
    JtmError,
    brightness,
    decode_png,
    default_view_grid,
    encode_png,
    fuse,
    generate_synthetic,
    hue_position,
    orthogonal_view_grid,
    parse_scores_csv,
    parse_sequence,
    read_sequence,
    render,
    render_view,
    rotate_point,
    run_ablation,
    saturation,
    write_scores_csv,
    write_sequence,
)

__all__ = [
    "JtmError",
    "brightness",
    "decode_png",
    "default_view_grid",
    "encode_png",
    "fuse",
    "generate_synthetic",
    "hue_position",
    "orthogonal_view_grid",
    "parse_scores_csv",
    "parse_sequence",
    "read_sequence",
    "render",
    "render_view",
    "rotate_point",
    "run_ablation",
    "saturation",
    "write_scores_csv",
    "write_sequence",
]
