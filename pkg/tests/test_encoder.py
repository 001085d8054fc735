import json

import numpy as np
import pytest

from xsema.encoder import (HashingEncoderConfig, HashingProvider,
                           ProjectionHead, RemoteEncoderConfig, RemoteProvider,
                           TrainingHyperparams, gradient_check, hashing_embed,
                           remote_embed, train_projection)
from xsema.errors import (DimensionMismatchError, MissingClassError,
                          NetworkError, NonFiniteInputError,
                          RemoteEncoderError, ServerError)
from xsema.eventtext import tokenize


class TestHashingEmbed:
    def test_unit_norm_for_nonempty(self):
        cfg = HashingEncoderConfig()
        vec = hashing_embed(tokenize("Deposit(uint256 amount)"), cfg)
        assert vec.shape == (512,)
        assert np.isclose(np.linalg.norm(vec), 1.0)

    def test_empty_tokens_zero_vector(self):
        vec = hashing_embed([], HashingEncoderConfig())
        assert not vec.any()

    def test_deterministic(self):
        cfg = HashingEncoderConfig(dimension=64, seed=3)
        a = hashing_embed(["deposit", "amount"], cfg)
        b = hashing_embed(["deposit", "amount"], cfg)
        assert np.array_equal(a, b)

    def test_seed_changes_embedding(self):
        toks = ["deposit", "amount", "to", "chain", "id"]
        a = hashing_embed(toks, HashingEncoderConfig(seed=0))
        b = hashing_embed(toks, HashingEncoderConfig(seed=1))
        assert not np.array_equal(a, b)

    def test_provider_batch_shape(self):
        prov = HashingProvider(HashingEncoderConfig(dimension=32))
        out = prov.embed_batch(["Deposit", "", "Withdraw(uint256 amount)"])
        assert out.shape == (3, 32)
        assert prov.describe()["kind"] == "hashing"

    def test_minimum_dimension(self):
        with pytest.raises(ValueError):
            HashingEncoderConfig(dimension=8)


class _FakeResponse:
    def __init__(self, status_code, payload):
        self.status_code = status_code
        self._payload = payload
        self.text = json.dumps(payload)

    def json(self):
        return self._payload


class _FakeSession:
    """Replays canned /info and /embed responses; records request bodies."""

    def __init__(self, dimension=8, model="test-model", embed_status=200,
                 vector_width=None, short_batch=False):
        self.dimension = dimension
        self.model = model
        self.embed_status = embed_status
        self.vector_width = vector_width or dimension
        self.short_batch = short_batch
        self.posts = []

    def get(self, url, timeout=None):
        assert url.endswith("/info")
        return _FakeResponse(200, {"model": self.model,
                                   "dimension": self.dimension})

    def post(self, url, json=None, timeout=None):
        assert url.endswith("/embed")
        self.posts.append(json["texts"])
        texts = json["texts"]
        if self.embed_status != 200:
            return _FakeResponse(self.embed_status, {"error": "boom"})
        n = len(texts) - 1 if self.short_batch else len(texts)
        vecs = [[float(len(t))] * self.vector_width for t in texts[:n]]
        return _FakeResponse(200, {"embeddings": vecs})


class TestRemoteProvider:
    def test_embed_roundtrip_chunked(self):
        session = _FakeSession(dimension=4)
        cfg = RemoteEncoderConfig("http://localhost:9000", batch_size=2)
        out = remote_embed(cfg, ["a", "bb", "ccc", "dddd", "eeeee"],
                           session=session)
        assert out.shape == (5, 4)
        assert [len(batch) for batch in session.posts] == [2, 2, 1]
        assert out[2, 0] == 3.0

    def test_empty_input(self):
        out = remote_embed(RemoteEncoderConfig("http://x"), [],
                           session=_FakeSession(dimension=4))
        assert out.shape == (0, 4)

    def test_provider_info_and_describe(self):
        prov = RemoteProvider(RemoteEncoderConfig("http://x/"),
                              session=_FakeSession(dimension=6, model="m1"))
        assert prov.dimension == 6
        desc = prov.describe()
        assert desc["model"] == "m1" and desc["kind"] == "remote"

    def test_server_error(self):
        with pytest.raises(ServerError):
            remote_embed(RemoteEncoderConfig("http://x"), ["t"],
                         session=_FakeSession(embed_status=500))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            remote_embed(RemoteEncoderConfig("http://x"), ["t"],
                         session=_FakeSession(dimension=8, vector_width=5))

    def test_short_batch_rejected(self):
        with pytest.raises(RemoteEncoderError):
            remote_embed(RemoteEncoderConfig("http://x"), ["t", "u"],
                         session=_FakeSession(short_batch=True))

    def test_network_error(self):
        import requests

        class _Down:
            def get(self, url, timeout=None):
                raise requests.ConnectionError("refused")

        with pytest.raises(NetworkError):
            remote_embed(RemoteEncoderConfig("http://x"), ["t"],
                         session=_Down())


def _blob_data(n_per_class=40, d=24, seed=0):
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for k, center in enumerate(np.eye(3)):
        pts = rng.normal(0.0, 0.12, (n_per_class, d))
        pts[:, :3] += center * 2.0
        xs.append(pts)
        ys.extend(["NT", "DT", "WT"][k] for _ in range(n_per_class))
    return np.vstack(xs), ys


class TestProjectionHead:
    def test_output_dimensions(self):
        head = ProjectionHead(10)
        assert head.project(np.zeros(10)).shape == (16,)
        assert head.project_batch(np.zeros((5, 10))).shape == (5, 16)
        proba = head.predict_proba(np.zeros((4, 10)))
        assert proba.shape == (4, 3)
        assert np.allclose(proba.sum(axis=1), 1.0)

    def test_project_rejects_wrong_width(self):
        with pytest.raises(DimensionMismatchError):
            ProjectionHead(10).project(np.zeros(11))

    def test_serialization_roundtrip(self):
        head = ProjectionHead(12, rng=np.random.default_rng(4))
        clone = ProjectionHead.from_dict(
            json.loads(json.dumps(head.to_dict())))
        x = np.random.default_rng(1).normal(size=(3, 12))
        assert np.allclose(head.project_batch(x), clone.project_batch(x))

    def test_gradient_check_random_batch(self):
        rng = np.random.default_rng(2)
        head = ProjectionHead(20, rng=rng)
        x = rng.normal(size=(16, 20))
        y = rng.integers(0, 3, 16)
        assert gradient_check(head, x, y, n_params=60) < 1e-4

    def test_gradient_check_zero_embedding(self):
        head = ProjectionHead(20, rng=np.random.default_rng(3))
        assert gradient_check(head, np.zeros((4, 20)), [0, 1, 2, 1]) < 1e-4


class TestTrainProjection:
    def test_learns_separable_blobs(self):
        x, y = _blob_data()
        head = train_projection(x, y, TrainingHyperparams(
            learning_rate=0.05, epochs=40, seed=0))
        pred = head.predict_proba(x).argmax(axis=1)
        truth = np.array([["NT", "DT", "WT"].index(v) for v in y])
        assert (pred == truth).mean() >= 0.95

    def test_deterministic_given_seed(self):
        x, y = _blob_data(n_per_class=20)
        hp = TrainingHyperparams(epochs=5, seed=7)
        a = train_projection(x, y, hp)
        b = train_projection(x, y, hp)
        assert np.array_equal(a.w1, b.w1) and np.array_equal(a.w3, b.w3)

    def test_missing_class(self):
        x = np.zeros((4, 8))
        with pytest.raises(MissingClassError):
            train_projection(x, ["NT", "NT", "DT", "DT"])

    def test_non_finite_input(self):
        x = np.zeros((3, 8))
        x[1, 2] = np.nan
        with pytest.raises(NonFiniteInputError):
            train_projection(x, ["NT", "DT", "WT"])

    def test_label_objects_accepted(self):
        from xsema.core import Label
        x, y = _blob_data(n_per_class=10)
        labels = [Label(v, bridge=None if v == "NT" else "Stargate")
                  for v in y]
        head = train_projection(x, labels, TrainingHyperparams(epochs=3))
        assert head.d_in == x.shape[1]
