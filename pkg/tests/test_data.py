"""CSV parsing, encoding, normalization, folds, projections, blobs."""

import numpy as np
import pytest

from preval.data import (
    decode_labels,
    encode_labels,
    load_csv,
    load_image_grid,
    make_blobs,
    median_center,
    random_conv_projection,
    save_image_grid,
    stratified_kfold,
    zscore_fit_apply,
)
from preval.errors import DataError


@pytest.fixture
def csv_file(tmp_path):
    def write(text, name="data.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write


class TestLoadCsv:
    def test_basic(self, csv_file):
        path = csv_file("a,b,y\n1,2,x\n3,4,x\n5,6,z\n")
        raw = load_csv(path, "y")
        assert raw.X.shape == (3, 2)
        np.testing.assert_array_equal(raw.X[:, 0], [1.0, 3.0, 5.0])
        assert list(raw.labels) == ["x", "x", "z"]
        assert raw.feature_names == ["a", "b"]

    def test_categorical_expansion(self, csv_file):
        path = csv_file("color,y\nred,0\ngreen,1\nblue,0\nred,1\n")
        raw = load_csv(path, "y")
        assert raw.X.shape == (4, 3)
        assert raw.feature_names == ["color=blue", "color=green", "color=red"]
        np.testing.assert_array_equal(raw.X.sum(axis=1), np.ones(4))

    def test_missing_label_column(self, csv_file):
        path = csv_file("a,b\n1,2\n")
        with pytest.raises(DataError, match="label"):
            load_csv(path, "y")

    def test_empty_cell_reports_position(self, csv_file):
        path = csv_file("a,b,y\n1,,x\n")
        with pytest.raises(DataError, match="row 0.*'b'"):
            load_csv(path, "y")

    def test_forced_categorical(self, csv_file):
        path = csv_file("code,y\n1,a\n2,b\n1,a\n")
        raw = load_csv(path, "y", categorical_columns=["code"])
        assert raw.feature_names == ["code=1", "code=2"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_csv(tmp_path / "nope.csv", "y")

    def test_ragged_row(self, csv_file):
        path = csv_file("a,b,y\n1,2,x\n1,2\n")
        with pytest.raises(DataError, match="row 1"):
            load_csv(path, "y")


class TestEncodeLabels:
    def test_one_vs_rest_shape(self):
        Y, classes = encode_labels(["b", "a", "b", "c"])
        assert list(classes) == ["a", "b", "c"]
        np.testing.assert_array_equal(Y[0], [-1.0, 1.0, -1.0])
        assert np.all((Y == 1.0).sum(axis=1) == 1)
        assert np.all((Y == -1.0).sum(axis=1) == 2)

    def test_appearance_order(self):
        _, classes = encode_labels(["b", "a", "c", "a"], order="appearance")
        assert list(classes) == ["b", "a", "c"]

    def test_roundtrip(self):
        rng = np.random.default_rng(0)
        labels = rng.choice(["u", "v", "w"], size=30)
        labels[:3] = ["u", "v", "w"]
        Y, classes = encode_labels(labels)
        np.testing.assert_array_equal(decode_labels(Y, classes), labels)

    def test_single_class_rejected(self):
        with pytest.raises(DataError):
            encode_labels(["a", "a", "a"])


class TestZscore:
    def test_constant_feature_floors(self):
        train = np.ones((4, 2))
        train[:, 1] = [1.0, 2.0, 3.0, 4.0]
        tr, ev = zscore_fit_apply(train, train)
        np.testing.assert_array_equal(tr[:, 0], np.zeros(4))

    def test_train_statistics_exact(self):
        rng = np.random.default_rng(1)
        train = rng.standard_normal((50, 3)) * 5.0 + 2.0
        tr, _ = zscore_fit_apply(train, train[:5])
        np.testing.assert_allclose(tr.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(tr.std(axis=0), 1.0, atol=1e-12)

    def test_eval_uses_train_statistics(self):
        rng = np.random.default_rng(2)
        train = rng.standard_normal((20, 2))
        ev = rng.standard_normal((10, 2)) + 100.0
        tr_a, ev_a = zscore_fit_apply(train, ev)
        # perturbing the eval rows must not move anything train-derived
        tr_b, ev_b = zscore_fit_apply(train, ev * 3.0 - 7.0)
        np.testing.assert_array_equal(tr_a, tr_b)
        np.testing.assert_array_equal(ev_b, (ev * 3.0 - 7.0 - train.mean(0)) / train.std(0))
        # eval rows keep their offset: statistics came from train only
        assert ev_a.mean() > 10.0


class TestMedianCenter:
    def test_odd_count(self):
        train = np.array([[1.0], [2.0], [9.0]])
        tr, _ = median_center(train, train)
        np.testing.assert_array_equal(tr[:, 0], [-1.0, 0.0, 7.0])

    def test_even_count_midpoint(self):
        train = np.array([[1.0], [3.0], [7.0], [9.0]])
        tr, _ = median_center(train, train)
        np.testing.assert_array_equal(tr[:, 0], [-4.0, -2.0, 2.0, 4.0])

    def test_eval_uses_train_median(self):
        train = np.array([[1.0], [2.0], [3.0]])
        ev = np.array([[10.0]])
        _, ev_c = median_center(train, ev)
        np.testing.assert_array_equal(ev_c, [[8.0]])


class TestStratifiedKfold:
    def test_balanced_two_classes(self):
        labels = np.array([0, 1] * 5)
        folds = stratified_kfold(labels, 5, seed=0)
        for f in range(5):
            fold_labels = labels[folds == f]
            assert sorted(fold_labels) == [0, 1]

    def test_deterministic(self):
        labels = np.array([0, 1, 2] * 7)
        np.testing.assert_array_equal(
            stratified_kfold(labels, 3, seed=9), stratified_kfold(labels, 3, seed=9)
        )

    def test_partition(self):
        rng = np.random.default_rng(3)
        labels = rng.integers(0, 3, size=40)
        labels[:15] = np.repeat([0, 1, 2], 5)
        folds = stratified_kfold(labels, 5, seed=1)
        assert set(folds) == set(range(5))
        assert len(folds) == 40

    def test_proportions_within_one(self):
        labels = np.array([0] * 13 + [1] * 7)
        folds = stratified_kfold(labels, 5, seed=2)
        for f in range(5):
            zeros = np.sum((folds == f) & (labels == 0))
            assert abs(zeros - 13 / 5) <= 1.0

    def test_small_class_rejected(self):
        with pytest.raises(DataError):
            stratified_kfold(np.array([0, 0, 0, 1, 1, 1, 1]), 4)


class TestRandomConvProjection:
    def test_zero_image(self):
        feats = random_conv_projection(np.zeros((2, 12, 12)), p=5, seed=0)
        np.testing.assert_array_equal(feats, np.zeros((2, 5)))

    def test_constant_image(self):
        v = 3.0
        feats = random_conv_projection(np.full((1, 11, 11), v), p=4, seed=1)
        rng = np.random.default_rng(1)
        kernels = rng.standard_normal((4, 9, 9))
        expected = np.maximum(0.0, v * kernels.sum(axis=(1, 2)))
        np.testing.assert_allclose(feats[0], expected, atol=1e-10)

    def test_impulse_matches_naive_convolution(self):
        image = np.zeros((1, 11, 11))
        image[0, 5, 5] = 1.0
        p = 3
        feats = random_conv_projection(image, p=p, seed=2)
        rng = np.random.default_rng(2)
        kernels = rng.standard_normal((p, 9, 9))
        out = np.zeros(p)
        for q in range(p):
            acc = 0.0
            for r in range(3):       # 11 - 9 + 1 valid positions
                for c in range(3):
                    val = 0.0
                    for dr in range(9):
                        for dc in range(9):
                            val += image[0, r + dr, c + dc] * kernels[q, dr, dc]
                    acc += max(0.0, val)
            out[q] = acc / 9.0
        np.testing.assert_allclose(feats[0], out, atol=1e-12)

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(4)
        images = rng.random((3, 15, 13))
        a = random_conv_projection(images, p=8, seed=7)
        b = random_conv_projection(images, p=8, seed=7)
        np.testing.assert_array_equal(a, b)
        c = random_conv_projection(images, p=8, seed=8)
        assert np.abs(a - c).max() > 0

    def test_small_image_rejected(self):
        with pytest.raises(DataError):
            random_conv_projection(np.zeros((1, 8, 12)), p=2)


class TestMakeBlobs:
    def test_balanced_counts(self):
        ds = make_blobs(n=31, p=4, k=3, separation=2.0, seed=0)
        counts = np.bincount(ds.labels.astype(int))
        assert counts.max() - counts.min() <= 1

    def test_deterministic(self):
        a = make_blobs(n=20, p=3, k=2, separation=1.0, seed=5)
        b = make_blobs(n=20, p=3, k=2, separation=1.0, seed=5)
        np.testing.assert_array_equal(a.X, b.X)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_zero_separation_centers_coincide(self):
        ds = make_blobs(n=400, p=3, k=2, separation=0.0, seed=1)
        means = [ds.X[ds.labels == c].mean(axis=0) for c in (0, 1)]
        assert np.abs(means[0] - means[1]).max() < 0.5

    def test_encoding_matches_labels(self):
        ds = make_blobs(n=24, p=2, k=4, separation=3.0, seed=2)
        np.testing.assert_array_equal(decode_labels(ds.Y, ds.classes), ds.labels)

    def test_large_separation_is_linearly_separable(self):
        from preval.baselines import fit_lr

        ds = make_blobs(n=40, p=2, k=2, separation=8.0, seed=3)
        model = fit_lr(ds.X, ds.labels, lam=1.0)
        assert np.mean(model.predict(ds.X) != ds.labels) == 0.0


class TestImageGrid:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(6)
        images = rng.random((4, 10, 12))
        path = tmp_path / "grid.bin"
        save_image_grid(path, images)
        loaded = load_image_grid(path)
        np.testing.assert_array_equal(loaded, images)

    def test_header_layout(self, tmp_path):
        import struct

        images = np.arange(2 * 9 * 9, dtype=np.float64).reshape(2, 9, 9)
        path = tmp_path / "grid.bin"
        save_image_grid(path, images)
        raw = path.read_bytes()
        assert struct.unpack_from("<3q", raw) == (2, 9, 9)
        assert len(raw) == 24 + 8 * images.size

    def test_truncated_file_rejected(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"\x01\x00\x00")
        with pytest.raises(DataError):
            load_image_grid(path)

    def test_size_mismatch_rejected(self, tmp_path):
        import struct

        path = tmp_path / "bad.bin"
        path.write_bytes(struct.pack("<3q", 2, 9, 9) + b"\x00" * 16)
        with pytest.raises(DataError, match="mismatch"):
            load_image_grid(path)
