import numpy as np
import pytest

from aerofruit.datakit import (
    AugmentError,
    AugmentParams,
    DatasetSplit,
    ImageRecord,
    augment,
    split_dataset,
)


def ids(n):
    return [f"img_{i:04d}" for i in range(n)]


class TestSplit:
    def test_exact_ratio_with_10(self):
        s = split_dataset(ids(10), seed=0)
        assert (len(s.train), len(s.val), len(s.test)) == (7, 2, 1)

    def test_978_ids(self):
        s = split_dataset(ids(978), seed=1)
        sizes = (len(s.train), len(s.val), len(s.test))
        # floor for val/test, remainder to train
        assert sizes == (686, 195, 97)
        for got, want in zip(sizes, (685, 196, 97)):
            assert abs(got - want) <= 1
        assert sum(sizes) == 978

    def test_deterministic(self):
        a = split_dataset(ids(123), seed=42)
        b = split_dataset(ids(123), seed=42)
        assert a == b
        c = split_dataset(ids(123), seed=43)
        assert a != c

    def test_order_independent(self):
        base = ids(50)
        a = split_dataset(base, seed=5)
        b = split_dataset(list(reversed(base)), seed=5)
        assert a == b

    def test_partition_property(self):
        rng = np.random.default_rng(0)
        for n in rng.integers(1, 400, size=20):
            s = split_dataset(ids(int(n)), seed=int(n))
            buckets = [set(s.train), set(s.val), set(s.test)]
            assert sum(len(b) for b in buckets) == n
            assert set().union(*buckets) == set(ids(int(n)))

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            split_dataset(["a", "b", "a"], seed=0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            split_dataset([], seed=0)

    def test_json_round_trip(self, tmp_path):
        s = split_dataset(ids(30), seed=9)
        s.save(tmp_path / "split.json")
        assert DatasetSplit.load(tmp_path / "split.json") == s


def const_record(value=128, size=64, image_id="rec"):
    return ImageRecord(
        image_id=image_id,
        pixel_size=(size, size),
        pixels=np.full((size, size, 3), value, dtype=np.uint8),
    )


class TestAugment:
    def test_brighten_identity_gain(self):
        params = AugmentParams()
        params.brighten_gain = 1.0
        rec = const_record()
        out = augment(rec, "brighten", seed=0, params=params)
        assert np.array_equal(out.pixels, rec.pixels)
        assert out.provenance == "augmented"

    def test_salt_pepper_zero_probability(self):
        params = AugmentParams()
        params.salt_pepper_p = 0.0
        rec = const_record()
        out = augment(rec, "salt_pepper", seed=0, params=params)
        assert np.array_equal(out.pixels, rec.pixels)

    def test_gaussian_noise_statistics(self):
        # statistical oracle straight from the definition of the noise
        rec = const_record(value=128, size=640)  # 640*640*3 > 1e6 samples
        out = augment(rec, "gaussian_noise", seed=3)
        samples = out.pixels.astype(np.float64)
        assert abs(samples.mean() - 128.0) < 1.0
        assert abs(samples.std() - 10.0) < 1.0

    def test_dimensions_and_annotations_preserved(self):
        from aerofruit.datakit import BoxAnnotation

        rec = ImageRecord(
            image_id="r",
            pixel_size=(32, 32),
            annotations=[BoxAnnotation(0, 0.5, 0.5, 0.2, 0.2)],
            pixels=np.zeros((32, 32, 3), dtype=np.uint8),
        )
        for op in ("gaussian_noise", "salt_pepper", "brighten", "darken"):
            out = augment(rec, op, seed=1)
            assert out.pixel_size == rec.pixel_size
            assert out.annotations == rec.annotations

    def test_darken_scales_down(self):
        out = augment(const_record(200), "darken", seed=0)
        assert np.all(out.pixels == 150)

    def test_unknown_op(self):
        with pytest.raises(AugmentError):
            augment(const_record(), "mosaic", seed=0)

    def test_non_train_member_refused(self):
        split = DatasetSplit(seed=0, train=["a"], val=["b"], test=["c"])
        rec = const_record(image_id="b")
        with pytest.raises(AugmentError):
            augment(rec, "brighten", seed=0, split=split)
        out = augment(const_record(image_id="a"), "brighten", seed=0, split=split)
        assert out.image_id.startswith("a_")

    def test_deterministic_per_seed(self):
        rec = const_record()
        a = augment(rec, "gaussian_noise", seed=5)
        b = augment(rec, "gaussian_noise", seed=5)
        c = augment(rec, "gaussian_noise", seed=6)
        assert np.array_equal(a.pixels, b.pixels)
        assert not np.array_equal(a.pixels, c.pixels)
