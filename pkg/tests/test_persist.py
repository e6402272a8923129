import struct

import numpy as np
import pytest

from reviewtox.models import (
    ALGORITHMS,
    FormatError,
    Hyperparams,
    VersionError,
    classify_texts,
    dumps,
    fit_pipeline,
    load_model,
    loads,
    save_model,
)
from reviewtox.models.persist import MAGIC, SUPPORTED_VERSIONS
from reviewtox.preprocess import PreprocessConfig
from reviewtox.synthetic import generate

FAST = {"rf_n_trees": 10, "gbt_n_stages": 20}


@pytest.fixture(scope="module")
def probe():
    return generate(100, seed=99).texts


@pytest.fixture(scope="module", params=ALGORITHMS)
def model(request, bundled):
    cfg = PreprocessConfig(count_profanity=request.param in ("RF", "LR"), split_identifiers=True)
    return fit_pipeline(bundled.texts, bundled.labels, Hyperparams(request.param, **FAST), cfg, min_df=5)


def test_round_trip_bit_identical(model, probe, tmp_path):
    path = tmp_path / "m.rvtx"
    save_model(model, path)
    again = load_model(path)
    a = np.array([p.score for p in classify_texts(model, probe)])
    b = np.array([p.score for p in classify_texts(again, probe)])
    assert a.tobytes() == b.tobytes()
    assert again.vocab == model.vocab
    assert again.preprocess_cfg == model.preprocess_cfg
    assert again.hyperparams == model.hyperparams


def test_serialization_is_deterministic(model, bundled):
    twin = fit_pipeline(bundled.texts, bundled.labels, model.hyperparams, model.preprocess_cfg, min_df=5)
    assert dumps(twin) == dumps(model)
    assert dumps(loads(dumps(model))) == dumps(model)


def test_bad_magic(model):
    data = bytearray(dumps(model))
    data[:8] = b"NOTAMODL"
    with pytest.raises(FormatError, match="magic"):
        loads(bytes(data))


def test_future_version(model):
    data = bytearray(dumps(model))
    struct.pack_into("<I", data, 8, max(SUPPORTED_VERSIONS) + 1)
    with pytest.raises(VersionError) as err:
        loads(bytes(data))
    assert "supported: 1" in str(err.value)


def test_corruption_detected(model):
    data = bytearray(dumps(model))
    data[len(data) // 2] ^= 0xFF
    with pytest.raises(FormatError, match="checksum"):
        loads(bytes(data))


def test_truncated(model):
    with pytest.raises(FormatError):
        loads(MAGIC + b"\x01")
