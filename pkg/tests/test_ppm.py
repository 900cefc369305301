import numpy as np
import pytest

from tanfamily.ppm import WHITE, IoFailure, default_palette, period_color, render, write_ppm
from tanfamily.scan import CELL_DTYPE, ClassifiedGrid, GridSpec


def grid_of(ids, steps=None):
    ids = np.asarray(ids, dtype=np.uint8)
    cells = np.zeros(ids.shape, dtype=CELL_DTYPE)
    cells["class_id"] = ids
    if steps is not None:
        cells["steps"] = steps
    rows, cols = ids.shape
    return ClassifiedGrid(GridSpec(0, 1, 1, cols, rows), cells)


def test_one_pixel(tmp_path):
    path = tmp_path / "one.ppm"
    write_ppm(grid_of([[0]]), default_palette(), path)
    data = path.read_bytes()
    # 11 header bytes and one RGB triple
    assert len(data) == 14
    assert data[:11] == b"P6\n1 1\n255\n"
    assert data[11:] == bytes(WHITE)


def test_layout_rows_top_to_bottom(tmp_path):
    path = tmp_path / "g.ppm"
    pal = {0: (1, 2, 3), 254: (9, 8, 7)}
    write_ppm(grid_of([[0, 254, 0], [254, 254, 0]]), pal, path)
    data = path.read_bytes()
    head = b"P6\n3 2\n255\n"
    assert data.startswith(head)
    assert data[len(head):] == bytes([1, 2, 3, 9, 8, 7, 1, 2, 3, 9, 8, 7, 9, 8, 7, 1, 2, 3])


def test_byte_identical(tmp_path):
    g = grid_of(np.arange(12).reshape(3, 4) % 3, steps=np.arange(12).reshape(3, 4))
    a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
    write_ppm(g, None, a, shade=True)
    write_ppm(g, None, b, shade=True)
    assert a.read_bytes() == b.read_bytes()


def test_missing_class_writes_nothing(tmp_path):
    path = tmp_path / "x.ppm"
    with pytest.raises(IoFailure):
        write_ppm(grid_of([[0, 7]]), {0: (0, 0, 0)}, path)
    assert not path.exists()


def test_unwritable(tmp_path):
    with pytest.raises(IoFailure):
        write_ppm(grid_of([[0]]), None, tmp_path / "no" / "such" / "dir.ppm")


def test_default_palette():
    pal = default_palette()
    assert pal[0] == (255, 255, 255)
    assert pal[254] == (0, 0, 0)
    assert pal[255] == (128, 128, 128)
    assert len({pal[p] for p in range(1, 9)}) == 8
    assert period_color(3) == pal[3]


def test_shading_darkens_slow_pixels():
    g = grid_of([[0, 0, 0, 0]], steps=[[3, 3, 3, 40]])
    img = render(g, None, shade=True)
    assert tuple(img[0, 0]) == (255, 255, 255)
    assert img[0, 3].max() < 255
    assert np.array_equal(render(g, None, shade=False)[0, 3], [255, 255, 255])
