"""Dataset container, fvecs/ivecs round trips, generators, and exact kNN."""

import numpy as np
import pytest

from sngraph import dataset
from sngraph.dataset import (
    GroundTruth,
    InconsistentDimensionError,
    MalformedHeaderError,
    TruncatedFileError,
    VectorDataset,
)
from sngraph.vecmath import sq_euclidean


def knn_oracle(base: np.ndarray, queries: np.ndarray, k: int):
    """Independent quadratic scan: outer loop over base points, scalar math,
    explicit (distance, id) tuple sort per query."""
    nq, nb = queries.shape[0], base.shape[0]
    dist = [[0.0] * nb for _ in range(nq)]
    for j in range(nb):  # base-major loop order, unlike the implementation
        bj = base[j].astype(np.float64)
        for i in range(nq):
            diff = queries[i].astype(np.float64) - bj
            dist[i][j] = float(np.dot(diff, diff))
    ids = np.empty((nq, k), dtype=np.int64)
    dd = np.empty((nq, k), dtype=np.float64)
    for i in range(nq):
        order = sorted(range(nb), key=lambda j: (dist[i][j], j))[:k]
        ids[i] = order
        dd[i] = [dist[i][j] for j in order]
    return ids, dd


class TestVectorDataset:
    def test_immutable(self):
        ds = VectorDataset(np.ones((3, 2)))
        with pytest.raises(ValueError):
            ds.data[0, 0] = 5.0

    def test_does_not_alias_input(self):
        arr = np.ones((3, 2), dtype=np.float32)
        ds = VectorDataset(arr)
        arr[0, 0] = 7.0
        assert ds.data[0, 0] == 1.0

    def test_casts_to_float32(self):
        ds = VectorDataset(np.arange(6, dtype=np.float64).reshape(3, 2))
        assert ds.data.dtype == np.float32
        assert ds.n == 3 and ds.dim == 2 and len(ds) == 3

    def test_rejects_bad_shapes_and_values(self):
        with pytest.raises(ValueError):
            VectorDataset(np.ones(4))
        with pytest.raises(ValueError):
            VectorDataset(np.ones((0, 3)))
        with pytest.raises(ValueError):
            VectorDataset(np.array([[1.0, np.nan]]))
        with pytest.raises(ValueError):
            VectorDataset(np.array([[1.0, np.inf]]))

    def test_data64_matches(self):
        ds = VectorDataset(np.random.default_rng(0).normal(size=(4, 3)))
        np.testing.assert_array_equal(ds.data64, ds.data.astype(np.float64))


class TestVecsFiles:
    def test_fvecs_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        vals = rng.normal(size=(17, 9)).astype(np.float32)
        vals[0, 0] = np.float32(1e-42)  # subnormal survives the round trip
        ds = VectorDataset(vals)
        p = tmp_path / "x.fvecs"
        dataset.write_fvecs(p, ds)
        back = dataset.read_fvecs(p)
        assert back.data.tobytes() == ds.data.tobytes()

    def test_ivecs_minimal_record(self, tmp_path):
        p = tmp_path / "gt.ivecs"
        dataset.write_ivecs(p, [[5, 7]])
        got = dataset.read_ivecs(p)
        assert got.tolist() == [[5, 7]]
        raw = p.read_bytes()
        assert len(raw) == 12
        assert np.frombuffer(raw, dtype="<i4").tolist() == [2, 5, 7]

    def test_ivecs_round_trip(self, tmp_path):
        rows = np.random.default_rng(2).integers(-5, 10**6, size=(8, 4))
        p = tmp_path / "r.ivecs"
        dataset.write_ivecs(p, rows)
        np.testing.assert_array_equal(dataset.read_ivecs(p), rows)

    def test_empty_file_is_malformed_header(self, tmp_path):
        p = tmp_path / "empty.fvecs"
        p.write_bytes(b"")
        with pytest.raises(MalformedHeaderError):
            dataset.read_fvecs(p)

    def test_nonpositive_dimension_is_malformed_header(self, tmp_path):
        p = tmp_path / "bad.fvecs"
        p.write_bytes(np.array([0, 1, 2], dtype="<i4").tobytes())
        with pytest.raises(MalformedHeaderError):
            dataset.read_fvecs(p)
        p.write_bytes(np.array([-3], dtype="<i4").tobytes())
        with pytest.raises(MalformedHeaderError):
            dataset.read_fvecs(p)

    def test_inconsistent_dimension(self, tmp_path):
        p = tmp_path / "mixed.fvecs"
        rec1 = np.array([2], dtype="<i4").tobytes() + np.array([1.0, 2.0], dtype="<f4").tobytes()
        rec2 = np.array([3], dtype="<i4").tobytes() + np.array([1.0, 2.0, 3.0], dtype="<f4").tobytes()
        # pad so total size is a whole number of d=2 records, leaving only the
        # dimension conflict
        p.write_bytes(rec1 + rec2 + np.array([9], dtype="<i4").tobytes())
        with pytest.raises(InconsistentDimensionError):
            dataset.read_fvecs(p)

    def test_truncated_record(self, tmp_path):
        p = tmp_path / "trunc.ivecs"
        p.write_bytes(np.array([2, 5], dtype="<i4").tobytes())  # promises 2 values, has 1
        with pytest.raises(TruncatedFileError):
            dataset.read_ivecs(p)

    def test_truncated_mid_word(self, tmp_path):
        p = tmp_path / "trunc2.fvecs"
        full = np.array([1], dtype="<i4").tobytes() + np.array([3.5], dtype="<f4").tobytes()
        p.write_bytes(full + b"\x01\x02")
        with pytest.raises(TruncatedFileError):
            dataset.read_fvecs(p)


class TestGenerators:
    def test_gen_uniform_deterministic_and_bounded(self):
        a = dataset.gen_uniform(500, 6, 2.0, seed=3)
        b = dataset.gen_uniform(500, 6, 2.0, seed=3)
        np.testing.assert_array_equal(a.data, b.data)
        assert a.data.dtype == np.float32
        assert np.linalg.norm(a.data64, axis=1).max() <= 2.0 + 1e-5

    def test_gen_gmm_deterministic(self):
        a = dataset.gen_gmm(1000, 8, 10, seed=4)
        b = dataset.gen_gmm(1000, 8, 10, seed=4)
        np.testing.assert_array_equal(a.data, b.data)

    def test_gen_gmm_cluster_means(self):
        # sample mean of each cluster concentrates on its generating mean
        n, k, spread = 20_000, 10, 0.05
        ds, means, labels = dataset.gen_gmm(n, 8, k, spread=spread, seed=5, return_components=True)
        tol = 5.0 * spread / np.sqrt(n / k)
        for c in range(k):
            got = ds.data64[labels == c].mean(axis=0)
            assert np.abs(got - means[c]).max() <= tol

    def test_gen_gmm_weights(self):
        ds, _, labels = dataset.gen_gmm(
            9000, 4, 3, seed=6, weights=[1.0, 1.0, 4.0], return_components=True
        )
        counts = np.bincount(labels, minlength=3)
        assert counts[2] > 2 * counts[0]
        assert ds.n == 9000

    def test_gen_gmm_validation(self):
        with pytest.raises(ValueError):
            dataset.gen_gmm(5, 2, 6)
        with pytest.raises(ValueError):
            dataset.gen_gmm(10, 2, 2, spread=0.0)
        with pytest.raises(ValueError):
            dataset.gen_gmm(10, 2, 2, weights=[1.0])

    def test_shuffle_split_partitions(self):
        ds = dataset.gen_uniform(100, 3, 1.0, seed=7)
        base, queries = dataset.shuffle_split(ds, 10, seed=8)
        assert base.n == 90 and queries.n == 10
        merged = np.vstack([base.data, queries.data])
        assert (
            sorted(map(tuple, merged.tolist()))
            == sorted(map(tuple, ds.data.tolist()))
        )
        base2, _ = dataset.shuffle_split(ds, 10, seed=8)
        np.testing.assert_array_equal(base.data, base2.data)

    def test_shuffle_split_validation(self):
        ds = dataset.gen_uniform(10, 2, 1.0, seed=0)
        with pytest.raises(ValueError):
            dataset.shuffle_split(ds, 0, seed=1)
        with pytest.raises(ValueError):
            dataset.shuffle_split(ds, 10, seed=1)


class TestBruteForceKnn:
    def test_matches_independent_oracle(self):
        rng = np.random.default_rng(10)
        base = VectorDataset(rng.normal(size=(300, 5)))
        queries = VectorDataset(rng.normal(size=(40, 5)))
        gt = dataset.brute_force_knn(base, queries, k=7)
        ids, dd = knn_oracle(base.data, queries.data, 7)
        np.testing.assert_array_equal(gt.ids, ids)
        np.testing.assert_allclose(gt.distances, dd, rtol=1e-12)

    def test_ties_break_to_lower_id(self):
        pts = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        base = VectorDataset(pts)
        queries = VectorDataset(np.zeros((1, 2)))
        gt = dataset.brute_force_knn(base, queries, k=4)
        assert gt.ids[0].tolist() == [0, 1, 2, 3]

    def test_stored_distances_recompute(self):
        rng = np.random.default_rng(11)
        base = VectorDataset(rng.normal(size=(50, 4)))
        queries = VectorDataset(rng.normal(size=(6, 4)))
        gt = dataset.brute_force_knn(base, queries, k=5)
        for qi in range(queries.n):
            for col in range(5):
                want = sq_euclidean(queries.data64[qi], base.data64[gt.ids[qi, col]])
                np.testing.assert_allclose(gt.distances[qi, col], want, rtol=1e-12)

    def test_threads_identical(self):
        rng = np.random.default_rng(12)
        base = VectorDataset(rng.normal(size=(200, 6)))
        queries = VectorDataset(rng.normal(size=(33, 6)))
        seq = dataset.brute_force_knn(base, queries, k=9, threads=1)
        par = dataset.brute_force_knn(base, queries, k=9, threads=4)
        np.testing.assert_array_equal(seq.ids, par.ids)
        np.testing.assert_array_equal(seq.distances, par.distances)

    def test_validation(self):
        base = VectorDataset(np.ones((5, 3)))
        q2 = VectorDataset(np.ones((2, 2)))
        with pytest.raises(ValueError):
            dataset.brute_force_knn(base, q2, k=1)
        q3 = VectorDataset(np.ones((2, 3)))
        with pytest.raises(ValueError):
            dataset.brute_force_knn(base, q3, k=6)
        with pytest.raises(ValueError):
            dataset.brute_force_knn(base, q3, k=0)

    def test_groundtruth_validation(self):
        with pytest.raises(ValueError):
            GroundTruth(np.array([[0, 1]]), np.array([[2.0, 1.0]]))
