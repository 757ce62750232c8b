"""Serialization round-trips: .flo files, flow colorization, 8-bit PNGs.

The .flo fixture bytes are packed by hand with struct so the reader is
checked against the wire layout, not against the writer.
"""

from __future__ import annotations

import struct

import numpy as np
import pytest

from motionfield import (
    FormatError,
    ImageFrame,
    RegionMask,
    ShapeError,
    decode_png,
    encode_flo,
    encode_png,
    flow_to_color,
    read_flo,
    read_png,
    write_flo,
    write_png,
)
from motionfield.images import decode_mask_png, encode_mask_png, read_mask_png, write_mask_png


def _flo_bytes(width, height, *values) -> bytes:
    return (
        struct.pack("<f", 202021.25)
        + struct.pack("<ii", width, height)
        + struct.pack(f"<{len(values)}f", *values)
    )


def test_read_flo_hand_packed_fixture(tmp_path):
    path = tmp_path / "tiny.flo"
    path.write_bytes(_flo_bytes(2, 1, 1.0, -2.0, 0.5, 0.0))
    flow = read_flo(path)
    assert flow.shape == (1, 2, 2)
    assert flow.dtype == np.float32
    assert np.array_equal(flow, [[[1.0, -2.0], [0.5, 0.0]]])


def test_encode_flo_matches_wire_layout():
    flow = np.array([[[1.0, -2.0], [0.5, 0.0]]], dtype=np.float32)
    assert encode_flo(flow) == _flo_bytes(2, 1, 1.0, -2.0, 0.5, 0.0)


def test_flo_round_trip_is_bit_exact_for_float32(tmp_path):
    rng = np.random.default_rng(80)
    flow = rng.normal(0, 5, (7, 5, 2)).astype(np.float32)
    path = tmp_path / "flow.flo"
    write_flo(path, flow)
    assert np.array_equal(read_flo(path), flow)


def test_flo_write_quantizes_float64_to_float32(tmp_path):
    flow = np.full((2, 2, 2), 1.0 / 3.0)
    path = tmp_path / "flow.flo"
    write_flo(path, flow)
    assert np.array_equal(read_flo(path), flow.astype(np.float32))


def test_encode_flo_rejects_bad_shapes():
    with pytest.raises(ShapeError):
        encode_flo(np.zeros((4, 4, 3)))
    with pytest.raises(ShapeError):
        encode_flo(np.zeros((4, 4)))


def test_read_flo_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.flo"
    path.write_bytes(struct.pack("<f", 123.0) + struct.pack("<ii", 1, 1) + struct.pack("<ff", 0, 0))
    with pytest.raises(FormatError, match="magic"):
        read_flo(path)


def test_read_flo_rejects_truncation(tmp_path):
    good = _flo_bytes(2, 2, *([0.0] * 8))
    for cut in (2, 8, len(good) - 4):
        path = tmp_path / f"cut{cut}.flo"
        path.write_bytes(good[:cut])
        with pytest.raises(FormatError):
            read_flo(path)


def test_read_flo_rejects_trailing_bytes(tmp_path):
    path = tmp_path / "trailing.flo"
    path.write_bytes(_flo_bytes(1, 1, 0.0, 0.0) + b"x")
    with pytest.raises(FormatError, match="trailing"):
        read_flo(path)


def test_read_flo_rejects_nonpositive_dims(tmp_path):
    path = tmp_path / "dims.flo"
    path.write_bytes(struct.pack("<f", 202021.25) + struct.pack("<ii", 0, 4))
    with pytest.raises(FormatError, match="dims"):
        read_flo(path)


def test_flow_color_shape_and_range():
    rng = np.random.default_rng(81)
    rgb = flow_to_color(rng.normal(0, 3, (5, 6, 2)))
    assert rgb.shape == (5, 6, 3)
    assert rgb.min() >= 0.0
    assert rgb.max() <= 1.0


def test_zero_flow_renders_white():
    rgb = flow_to_color(np.zeros((3, 3, 2)))
    assert np.array_equal(rgb, np.ones((3, 3, 3)))


def test_flow_color_direction_literals():
    flow = np.array([[[2.0, 0.0], [-2.0, 0.0], [0.0, 2.0], [0.0, -2.0]]])
    rgb = flow_to_color(flow)
    assert np.allclose(rgb[0, 0], [1.0, 0.0, 0.0])  # +x is red
    assert np.allclose(rgb[0, 1], [0.0, 1.0, 1.0])  # -x is cyan
    assert np.allclose(rgb[0, 2], [0.5, 1.0, 0.0])  # +y (downward)
    assert np.allclose(rgb[0, 3], [0.5, 0.0, 1.0])  # -y (upward)


def test_flow_color_saturation_tracks_magnitude():
    flow = np.array([[[2.0, 0.0], [1.0, 0.0]]])
    rgb = flow_to_color(flow)
    assert np.allclose(rgb[0, 0], [1.0, 0.0, 0.0])
    assert np.allclose(rgb[0, 1], [1.0, 0.5, 0.5])


def test_flow_color_fixed_scale_spans_frames():
    frame = np.array([[[1.0, 0.0]]])
    rgb = flow_to_color(frame, max_magnitude=2.0)
    assert np.allclose(rgb[0, 0], [1.0, 0.5, 0.5])


def test_flow_color_rejects_bad_shape():
    with pytest.raises(ShapeError):
        flow_to_color(np.zeros((4, 4)))


@pytest.mark.parametrize("channels", [1, 3, 4])
def test_png_round_trip_exact_for_quantized_values(channels, tmp_path):
    rng = np.random.default_rng(82 + channels)
    data = rng.integers(0, 256, (6, 5, channels)).astype(np.float64) / 255.0
    image = ImageFrame(data)
    path = tmp_path / "img.png"
    write_png(path, image)
    loaded = read_png(path)
    assert loaded.data.shape == (6, 5, channels)
    assert np.array_equal(loaded.data, data)


def test_png_quantizes_to_nearest_255th():
    image = ImageFrame(np.full((2, 2, 1), 0.5))
    loaded = decode_png(encode_png(image))
    assert np.allclose(loaded.data, 128.0 / 255.0)


def test_decode_png_rejects_garbage():
    with pytest.raises(FormatError):
        decode_png(b"definitely not a png")


def test_mask_png_round_trip(tmp_path):
    rng = np.random.default_rng(83)
    grid = (rng.uniform(0, 1, (9, 4)) > 0.5).astype(np.uint8)
    mask = RegionMask(grid=grid)
    blob = encode_mask_png(mask)
    assert np.array_equal(decode_mask_png(blob).grid, grid)
    path = tmp_path / "mask.png"
    write_mask_png(path, mask)
    assert np.array_equal(read_mask_png(path).grid, grid)


def test_decode_mask_rejects_color_images():
    rgb = ImageFrame(np.zeros((4, 4, 3)))
    with pytest.raises(ShapeError):
        decode_mask_png(encode_png(rgb))
