import random

import pytest

from csdjwt import bn254
from csdjwt import accumulator as acc
from csdjwt.errors import AccumulatorError

rng = random.Random(7)


@pytest.fixture(scope="module")
def keys():
    return acc.keypair_from_seed(b"test-accumulator")


@pytest.fixture(scope="module")
def v0():
    return acc.init_accumulator(rng_seed=b"\x01")


def rand_elements(n):
    return [rng.randrange(acc.R) for _ in range(n)]


def test_setup_defaults():
    params, sk, pk = acc.setup(128)
    assert params.security_level == 128
    assert params.g1_bytes == 32
    assert 1 <= sk.alpha < acc.R
    assert pk.q_tilde == bn254.g2_mul(params.generator_g2, sk.alpha)
    assert acc.setup(128)[1].alpha != sk.alpha


@pytest.mark.parametrize("level", [80, 256, 0])
def test_setup_rejects_other_levels(level):
    with pytest.raises(AccumulatorError):
        acc.setup(level)


def test_init_accumulator_seeding():
    a = acc.init_accumulator(rng_seed=b"\x01")
    assert a == acc.init_accumulator(rng_seed=b"\x01")
    assert a != acc.init_accumulator(rng_seed=b"\x02")
    assert acc.init_accumulator() != acc.init_accumulator()
    assert a.point is not None


def test_key_serialization(keys):
    sk, pk = keys
    assert acc.AccumulatorSecretKey.from_bytes(sk.to_bytes()) == sk
    assert acc.AccumulatorPublicKey.from_bytes(pk.to_bytes()) == pk
    assert len(pk.to_bytes()) == 64


def test_empty_batch_is_identity(keys, v0):
    assert acc.accumulate_batch(v0, [], keys[0]) == v0
    assert acc.compute_witnesses_batch(v0, [], keys[0]) == []


def test_value_size_is_constant(keys, v0):
    for n in (1, 10, 60):
        value = acc.accumulate_batch(v0, rand_elements(n), keys[0])
        assert len(value.to_bytes()) == 32


def test_witnesses_verify(keys, v0):
    sk, pk = keys
    ys = rand_elements(12)
    value = acc.accumulate_batch(v0, ys, sk)
    ws = acc.compute_witnesses_batch(value, ys, sk)
    assert all(len(w.to_bytes()) == 32 for w in ws)
    for y, w in zip(ys[:3], ws[:3]):
        assert acc.verify_witness(value, y, w, pk)
    assert acc.verify_witnesses_batch(value, list(zip(ys, ws)), pk)


def test_batch_verification_catches_one_bad_witness(keys, v0):
    sk, pk = keys
    ys = rand_elements(6)
    value = acc.accumulate_batch(v0, ys, sk)
    ws = acc.compute_witnesses_batch(value, ys, sk)
    ws[3] = ws[2]
    assert not acc.verify_witnesses_batch(value, list(zip(ys, ws)), pk)


def test_wrong_key_and_wrong_value_fail(keys, v0):
    sk, pk = keys
    ys = rand_elements(3)
    value = acc.accumulate_batch(v0, ys, sk)
    w = acc.compute_witnesses_batch(value, ys, sk)[0]
    other_pk = acc.keypair_from_seed(b"other")[1]
    assert not acc.verify_witness(value, ys[0], w, other_pk)
    assert not acc.verify_witness(v0, ys[0], w, pk)
    assert not acc.verify_witness(value, ys[0], acc.Witness(None), pk)


def test_rejects_duplicates_range_and_trapdoor(keys, v0):
    sk, _ = keys
    with pytest.raises(AccumulatorError, match="duplicate"):
        acc.accumulate_batch(v0, [5, 5], sk)
    with pytest.raises(AccumulatorError, match="range"):
        acc.accumulate_batch(v0, [acc.R], sk)
    with pytest.raises(AccumulatorError, match="trapdoor"):
        acc.compute_witnesses_batch(v0, [1, acc.R - sk.alpha], sk)


def test_value_encoding_roundtrip(keys, v0):
    value = acc.accumulate_batch(v0, rand_elements(4), keys[0])
    assert acc.AccumulatorValue.from_bytes(value.to_bytes()) == value
