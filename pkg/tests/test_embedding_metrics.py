import numpy as np
import pytest
import scipy.linalg

from echo_motion.metrics import (
    EmbeddingSet,
    diversity,
    fid,
    fid_from_stats,
    load_embeddings,
    mm_dist,
    r_precision,
    save_embeddings,
)


def test_fid_identical_sets(rng):
    emb = EmbeddingSet(vectors=rng.normal(size=(500, 16)))
    assert fid(emb, emb) < 1e-6


def test_fid_shifted_gaussians(rng):
    mu = np.array([1.0, -2.0, 0.5, 0.0, 0.0, 3.0, 0.0, -1.0])
    a = rng.normal(size=(10000, 8))
    b = rng.normal(size=(10000, 8)) + mu
    value = fid(EmbeddingSet(vectors=a), EmbeddingSet(vectors=b))
    expect = float(mu @ mu)
    assert abs(value - expect) < 0.05 * expect


def test_fid_commuting_covariances():
    # N(0, 4I) vs N(0, I) in 2-D: trace term 4 + 1 - 2*2 = 1 per dim
    value = fid_from_stats(np.zeros(2), 4.0 * np.eye(2), np.zeros(2), np.eye(2))
    assert abs(value - 2.0) < 1e-6


def test_fid_from_stats_matches_scipy(rng):
    for _ in range(20):
        d = 6
        a = rng.normal(size=(40, d))
        b = rng.normal(size=(40, d))
        cov_a = np.cov(a, rowvar=False)
        cov_b = np.cov(b, rowvar=False)
        mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
        sq = scipy.linalg.sqrtm(cov_a @ cov_b)
        if np.iscomplexobj(sq):
            sq = sq.real
        expect = float((mu_a - mu_b) @ (mu_a - mu_b) + np.trace(cov_a + cov_b - 2.0 * sq))
        got = fid_from_stats(mu_a, cov_a, mu_b, cov_b)
        assert abs(got - expect) < 1e-6


def test_fid_never_negative(rng):
    a = rng.normal(size=(50, 4))
    jitter = a + rng.normal(0.0, 1e-9, size=a.shape)
    value = fid(EmbeddingSet(vectors=a), EmbeddingSet(vectors=jitter))
    assert value >= 0.0


def test_fid_symmetry(rng):
    a = EmbeddingSet(vectors=rng.normal(size=(200, 8)))
    b = EmbeddingSet(vectors=rng.normal(size=(200, 8)) + 0.3)
    assert fid(a, b) == pytest.approx(fid(b, a), abs=1e-8)


def test_r_precision_perfect_alignment(rng):
    # motion i sits exactly on text i, far from every other text
    grid = rng.normal(size=(64, 8)) * 10.0
    res = r_precision(EmbeddingSet(vectors=grid, role="motion"),
                      EmbeddingSet(vectors=grid, role="text"), pool_size=32, seed=1)
    assert res.top1 == 1.0
    assert res.top2 == 1.0
    assert res.top3 == 1.0


def test_r_precision_tie_goes_to_true_pair(rng):
    # all texts identical: every candidate ties, the true pair must win
    n = 64
    texts = np.tile(rng.normal(size=(1, 4)), (n, 1))
    motions = rng.normal(size=(n, 4))
    res = r_precision(EmbeddingSet(vectors=motions), EmbeddingSet(vectors=texts),
                      pool_size=32, seed=3)
    assert res.top1 == 1.0


def test_r_precision_brute_force_full_pool(rng):
    # pool == set size means the pool is everything; rank is checkable directly
    n, d = 32, 6
    motions = rng.normal(size=(n, d))
    texts = rng.normal(size=(n, d))
    res = r_precision(EmbeddingSet(vectors=motions), EmbeddingSet(vectors=texts),
                      pool_size=n, seed=0)
    top = np.zeros(3)
    for i in range(n):
        d_all = np.linalg.norm(texts - motions[i], axis=1)
        rank = 1 + int(np.sum(d_all < d_all[i]))
        for k in range(3):
            if rank <= k + 1:
                top[k] += 1
    top /= n
    assert res.top1 == pytest.approx(top[0], abs=1e-12)
    assert res.top2 == pytest.approx(top[1], abs=1e-12)
    assert res.top3 == pytest.approx(top[2], abs=1e-12)


def test_r_precision_deterministic(rng):
    m = EmbeddingSet(vectors=rng.normal(size=(100, 5)))
    t = EmbeddingSet(vectors=rng.normal(size=(100, 5)))
    a = r_precision(m, t, seed=7)
    b = r_precision(m, t, seed=7)
    assert (a.top1, a.top2, a.top3) == (b.top1, b.top2, b.top3)


def test_r_precision_needs_enough_samples(rng):
    m = EmbeddingSet(vectors=rng.normal(size=(10, 5)))
    t = EmbeddingSet(vectors=rng.normal(size=(10, 5)))
    with pytest.raises(ValueError):
        r_precision(m, t, pool_size=32)


def test_diversity_two_points():
    vecs = np.array([[0.0, 0.0], [3.0, 4.0]] * 20)
    emb = EmbeddingSet(vectors=vecs)
    value = diversity(emb, num_pairs=500, seed=0)
    # every cross-pair distance is 0 or 5; with many pairs the mean sits between
    assert 0.0 < value <= 5.0


def test_diversity_identical_vectors():
    emb = EmbeddingSet(vectors=np.ones((40, 3)))
    assert diversity(emb, num_pairs=100, seed=0) == 0.0


def test_mm_dist_paired_mean(rng):
    m = rng.normal(size=(50, 4))
    offsets = rng.normal(size=(50, 4))
    t = m + offsets
    expect = float(np.mean(np.linalg.norm(offsets, axis=1)))
    got = mm_dist(EmbeddingSet(vectors=m), EmbeddingSet(vectors=t))
    assert got == pytest.approx(expect, abs=1e-12)


def test_mm_dist_size_mismatch(rng):
    with pytest.raises(ValueError):
        mm_dist(EmbeddingSet(vectors=rng.normal(size=(5, 4))),
                EmbeddingSet(vectors=rng.normal(size=(6, 4))))


def test_embedding_file_round_trip(tmp_path, rng):
    emb = EmbeddingSet(vectors=rng.normal(size=(17, 9)).astype(np.float32).astype(np.float64),
                       role="motion")
    path = tmp_path / "m.emb"
    save_embeddings(path, emb)
    back = load_embeddings(path)
    assert back.role == "motion"
    assert np.array_equal(back.vectors, emb.vectors)


def test_embedding_csv_load(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("1.0,2.0\n3.0,4.0\n")
    emb = load_embeddings(path)
    assert np.array_equal(emb.vectors, [[1.0, 2.0], [3.0, 4.0]])


def test_embedding_validation(rng):
    with pytest.raises(ValueError):
        EmbeddingSet(vectors=rng.normal(size=(5,)))
    with pytest.raises(ValueError):
        EmbeddingSet(vectors=np.full((3, 2), np.nan))
    with pytest.raises(ValueError):
        EmbeddingSet(vectors=rng.normal(size=(3, 2)), role="banana")
