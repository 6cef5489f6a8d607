import numpy as np
import pytest
from hypothesis import given, strategies as st

from hgib.data import (
    Dataset,
    SynthConfig,
    fuse_and_build,
    generate_synthetic,
    load_csv,
    normalize,
)
from hgib.errors import DataError


def write(path, text):
    path.write_text(text)
    return str(path)


class TestLoadCsv:
    def test_happy_path(self, tmp_path):
        f1 = write(tmp_path / "m1.csv", "id,a,b\np1,1,2\np2,3,4\np3,5,6\n")
        f2 = write(tmp_path / "m2.csv", "id,c\np1,0.5\np2,0.1\np3,0.9\n")
        labels = write(tmp_path / "y.csv", "id,label\np1,NC\np2,AD\np3,NC\n")
        ds = load_csv([f1, f2], labels)
        assert ds.n == 3
        assert len(ds.modalities) == 2
        assert ds.modalities[0].shape == (3, 2)
        assert ds.class_names == ["AD", "NC"]
        np.testing.assert_array_equal(ds.labels, [1, 0, 1])

    def test_integer_labels(self, tmp_path):
        f1 = write(tmp_path / "m1.csv", "id,a\np1,1\np2,2\n")
        labels = write(tmp_path / "y.csv", "id,label\np1,0\np2,1\n")
        ds = load_csv([f1], labels)
        np.testing.assert_array_equal(ds.labels, [0, 1])

    def test_mismatched_ids(self, tmp_path):
        f1 = write(tmp_path / "m1.csv", "id,a\np1,1\np2,2\n")
        f2 = write(tmp_path / "m2.csv", "id,a\np1,1\npX,2\n")
        labels = write(tmp_path / "y.csv", "id,label\np1,0\np2,1\n")
        with pytest.raises(DataError, match="pX"):
            load_csv([f1, f2], labels)

    def test_missing_label(self, tmp_path):
        f1 = write(tmp_path / "m1.csv", "id,a\np1,1\np2,2\n")
        labels = write(tmp_path / "y.csv", "id,label\np1,0\n")
        with pytest.raises(DataError, match="p2"):
            load_csv([f1], labels)

    def test_duplicate_id(self, tmp_path):
        f1 = write(tmp_path / "m1.csv", "id,a\np1,1\np1,2\n")
        labels = write(tmp_path / "y.csv", "id,label\np1,0\n")
        with pytest.raises(DataError, match="duplicate"):
            load_csv([f1], labels)

    def test_unparsable_value(self, tmp_path):
        f1 = write(tmp_path / "m1.csv", "id,a\np1,oops\n\n")
        labels = write(tmp_path / "y.csv", "id,label\np1,0\n")
        with pytest.raises(DataError, match="unparsable"):
            load_csv([f1], labels)


class TestNormalize:
    def _wrap(self, column):
        return Dataset(
            modalities=[np.array(column, dtype=float).reshape(-1, 1)],
            labels=np.zeros(len(column), dtype=int) % 1,
            class_names=["only"],
        )

    def test_minmax(self):
        out = normalize(self._wrap([0.0, 5.0, 10.0]))
        np.testing.assert_allclose(out.modalities[0].ravel(), [0.0, 0.5, 1.0])

    def test_constant_column(self):
        out = normalize(self._wrap([7.0, 7.0]))
        np.testing.assert_allclose(out.modalities[0].ravel(), [0.5, 0.5])

    def test_idempotent(self):
        ds = self._wrap([0.0, 0.25, 1.0])
        once = normalize(ds)
        twice = normalize(once)
        np.testing.assert_allclose(
            twice.modalities[0], once.modalities[0], atol=1e-15
        )

    @given(st.lists(st.floats(-100, 100), min_size=2, max_size=20, unique=True))
    def test_order_preserving_and_in_range(self, values):
        out = normalize(self._wrap(values)).modalities[0].ravel()
        assert out.min() >= 0.0 and out.max() <= 1.0
        order = np.argsort(values)
        assert (np.diff(out[order]) >= 0).all()

    def test_nonfinite_rejected(self):
        with pytest.raises(DataError):
            normalize(self._wrap([1.0, np.inf]))


class TestFuseAndBuild:
    def test_single_modality(self):
        rng = np.random.default_rng(0)
        ds = normalize(
            Dataset(
                modalities=[rng.random((10, 3))],
                labels=rng.integers(0, 2, 10),
                class_names=["a", "b"],
            )
        )
        fused, g = fuse_and_build(ds, k=3)
        np.testing.assert_array_equal(fused.data, ds.modalities[0])
        assert g.num_hyperedges == 10

    def test_edge_count_n_times_m(self):
        ds = generate_synthetic(SynthConfig(n=40, dims=(4, 4, 3), seed=1))
        _, g = fuse_and_build(ds, k=5)
        assert g.num_hyperedges == 120

    def test_duplicated_modality_doubles_degrees(self):
        rng = np.random.default_rng(2)
        X = rng.random((8, 3))
        ds = Dataset(
            modalities=[X, X.copy()],
            labels=rng.integers(0, 2, 8),
            class_names=["a", "b"],
        )
        fused, g = fuse_and_build(normalize(ds), k=2)
        single, gs = fuse_and_build(
            normalize(
                Dataset(
                    modalities=[X.copy()],
                    labels=ds.labels,
                    class_names=["a", "b"],
                )
            ),
            k=2,
        )
        np.testing.assert_array_equal(g.vertex_degrees, 2 * gs.vertex_degrees)
        assert fused.shape == (8, 6)

    def test_deterministic_pipeline(self):
        ds = generate_synthetic(SynthConfig(n=30, dims=(4,), seed=3))
        a_fused, a_g = fuse_and_build(ds, k=4)
        b_fused, b_g = fuse_and_build(ds, k=4)
        np.testing.assert_array_equal(a_fused.data, b_fused.data)
        np.testing.assert_array_equal(a_g.incidence, b_g.incidence)


class TestGenerateSynthetic:
    def test_deterministic(self):
        a = generate_synthetic(SynthConfig(seed=5))
        b = generate_synthetic(SynthConfig(seed=5))
        np.testing.assert_array_equal(a.labels, b.labels)
        for ma, mb in zip(a.modalities, b.modalities):
            np.testing.assert_array_equal(ma, mb)

    def test_shapes_and_defaults(self):
        ds = generate_synthetic(SynthConfig(seed=0))
        assert ds.n == 240
        assert [m.shape[1] for m in ds.modalities] == [16, 16, 8]
        assert ds.class_names == ["NC", "MCI", "AD"]
        for m in ds.modalities:
            assert m.min() >= 0.0 and m.max() <= 1.0

    def test_label_noise_count(self):
        clean = generate_synthetic(SynthConfig(seed=4, label_noise=0.0))
        noisy = generate_synthetic(SynthConfig(seed=4, label_noise=0.2))
        flipped = (clean.labels != noisy.labels).sum()
        assert flipped <= round(0.2 * 240)
        assert flipped > 0

    def test_high_separation_purity(self):
        ds = generate_synthetic(
            SynthConfig(n=90, dims=(8,), separation=4.0, label_noise=0.0, seed=6)
        )
        _, g = fuse_and_build(ds, k=5)
        same = 0
        total = 0
        for e in range(g.num_hyperedges):
            members = np.flatnonzero(g.incidence[:, e])
            center_class = ds.labels[e]
            same += (ds.labels[members] == center_class).sum()
            total += members.size
        assert same / total >= 0.9

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SynthConfig(n=4, num_classes=3)
        with pytest.raises(ValueError):
            SynthConfig(label_noise=1.5)
        with pytest.raises(ValueError):
            SynthConfig(separation=-1.0)
