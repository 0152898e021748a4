import os

import numpy as np
import pytest

from services.imaging.layers import emit_reconstructions, spectrum_csv
from services.imaging.pgm import ImageMatrix, binarize, parse_pgm, to_image, write_pgm
from services.imaging.testimage import synthetic_image, synthetic_matrix, synthetic_pattern
from services.svd.errors import (
    InputError,
    MalformedHeader,
    MatrixFormatError,
    TruncatedPixels,
    UnsupportedMagic,
)
from services.svd.matrix_core import DataMatrix
from services.svd.spectrum import SpectrumResult, oracle_spectrum


def test_parse_ascii_pgm():
    img = parse_pgm(b"P2\n2 2\n255\n0 255 255 0\n")
    assert (img.width, img.height, img.maxval) == (2, 2, 255)
    np.testing.assert_array_equal(img.pixels, [[0, 255], [255, 0]])


def test_parse_skips_comments():
    img = parse_pgm(b"P2\n1 1\n255\n# c\n0\n")
    np.testing.assert_array_equal(img.pixels, [[0]])
    img = parse_pgm(b"P2 # size follows\n2 1 # w h\n7\n3 4")
    np.testing.assert_array_equal(img.pixels, [[3, 4]])


def test_parse_binary_pgm():
    img = parse_pgm(b"P5\n3 1\n255\n" + bytes([0, 10, 255]))
    np.testing.assert_array_equal(img.pixels, [[0, 10, 255]])
    wide = parse_pgm(b"P5\n2 1\n1000\n" + bytes([0x03, 0xE8, 0x00, 0x01]))
    np.testing.assert_array_equal(wide.pixels, [[1000, 1]])


def test_parse_errors():
    with pytest.raises(UnsupportedMagic):
        parse_pgm(b"P7\n1 1\n255\n0\n")
    with pytest.raises(MalformedHeader):
        parse_pgm(b"P2\n2 x\n255\n0 0\n")
    with pytest.raises(MalformedHeader):
        parse_pgm(b"P2\n2 2\n")
    with pytest.raises(MalformedHeader):
        parse_pgm(b"P2\n1 1\n70000\n0\n")
    with pytest.raises(TruncatedPixels) as err:
        parse_pgm(b"P2\n2 2\n255\n0 1 2\n")
    assert (err.value.expected, err.value.found) == (4, 3)
    with pytest.raises(TruncatedPixels):
        parse_pgm(b"P5\n2 2\n255\n" + bytes([1, 2]))
    with pytest.raises(MatrixFormatError):
        parse_pgm(b"P2\n1 1\n255\n300\n")


@pytest.mark.parametrize("binary", [True, False])
@pytest.mark.parametrize("maxval", [255, 4095])
def test_pgm_round_trip(binary, maxval):
    rng = np.random.default_rng(maxval)
    img = ImageMatrix(5, 3, maxval, rng.integers(0, maxval + 1, size=(3, 5)))
    back = parse_pgm(write_pgm(img, binary=binary))
    assert (back.width, back.height, back.maxval) == (5, 3, maxval)
    np.testing.assert_array_equal(back.pixels, img.pixels)


def test_binarize():
    img = ImageMatrix(2, 2, 255, [[0, 255], [255, 0]])
    np.testing.assert_array_equal(binarize(img).values, [[-1, 1], [1, -1]])
    np.testing.assert_array_equal(binarize(img, threshold=0).values, np.ones((2, 2)))
    dark = ImageMatrix(3, 2, 255, np.zeros((2, 3)))
    np.testing.assert_array_equal(binarize(dark).values, -np.ones((2, 3)))


def test_to_image_rescales():
    img = to_image(np.array([[-1.0, 0.0], [1.0, 1.0]]))
    np.testing.assert_array_equal(img.pixels, [[0, 128], [255, 255]])
    np.testing.assert_array_equal(to_image(np.full((2, 2), 3.0)).pixels, 255)
    np.testing.assert_array_equal(to_image(np.zeros((2, 2))).pixels, 0)


def test_synthetic_pattern():
    base = synthetic_pattern()
    assert base.shape == (64, 64)
    assert set(np.unique(base)) == {-1.0, 1.0}
    big = synthetic_pattern(128)
    np.testing.assert_array_equal(big[::2, ::2], base)
    with pytest.raises(InputError):
        synthetic_pattern(100)


def test_synthetic_image_binarizes_back():
    img = synthetic_image()
    np.testing.assert_array_equal(binarize(img).values, synthetic_matrix().values)


def _checkerboard(n):
    s = np.where(np.arange(n) % 2, -1.0, 1.0)
    return DataMatrix(np.outer(s, s))


def test_emit_rank_one_reconstruction(tmp_path):
    a = _checkerboard(8)
    result = oracle_spectrum(a, 1)
    written = emit_reconstructions(a, result, str(tmp_path))
    names = sorted(os.path.basename(p) for p in written)
    assert names == ["component_0.pgm", "partial_0.pgm", "spectrum.csv"]
    partial = parse_pgm((tmp_path / "partial_0.pgm").read_bytes())
    np.testing.assert_array_equal(binarize(partial).values, a.values)


def test_emit_ascii_output(tmp_path):
    a = _checkerboard(4)
    emit_reconstructions(a, oracle_spectrum(a, 1), str(tmp_path), binary=False)
    assert (tmp_path / "component_0.pgm").read_bytes().startswith(b"P2\n4 4\n255\n")


def test_emit_empty_result(tmp_path):
    out = tmp_path / "layers"
    with pytest.raises(InputError):
        emit_reconstructions(_checkerboard(4), SpectrumResult([]), str(out))
    assert not out.exists()


def test_synthetic_spectrum_csv_decreases():
    a = synthetic_matrix()
    lines = spectrum_csv(oracle_spectrum(a, 8)).splitlines()
    assert lines[0] == "j,lambda,sigma"
    lambdas = [float(line.split(",")[1]) for line in lines[1:]]
    assert len(lambdas) == 8
    assert all(x > y for x, y in zip(lambdas, lambdas[1:]))
