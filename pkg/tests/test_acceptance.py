"""Acceptance suite: one test per criterion, tolerances pinned.

Each test attaches its measured values with ``record_property``; the
terminal summary prints one PASS/FAIL line per criterion.
"""

import dataclasses
import itertools
import json
import math
import random
import string
import time

import pytest
from py_ecc import bn128 as ref

from conftest import NOW
from csdjwt import accumulator as acc
from csdjwt import bn254, csd, merkle, sdjwt, wire
from csdjwt.bench import BENCH_IAT, BenchConfig, World, bench_storage, disclosed_count, latency_point, vp_size
from csdjwt.claims import Claim, parse_canonical, synthetic_claims
from csdjwt.errors import CsdError, RejectReason
from csdjwt.nonce import NonceStore, new_nonce
from golden import FIXTURE, describe

# pinned tolerances
STORAGE_RATIO_MAX = 0.60
VP_BANDS = {(100, 1): (0.02, 0.12), (100, 100): (0.68, 0.78), (10, 1): (0.28, 0.38), (10, 10): (0.65, 0.75)}
TAMPER_TRIALS = 1000
NON_MEMBER_TRIALS = 1000
ORACLE_INSTANCES = 200
ORACLE_MAX_SET = 8
PERMUTATION_TRIALS = 500
PERMUTATION_MAX_SET = 32
MERKLE_ORACLE_MAX_LEAVES = 16
ROUNDTRIP_OBJECTS = 1000
CSD_ISSUE_N100_MAX_S = 1.0


@pytest.fixture(scope="module")
def world():
    return World(seed=0)


# -- 1 -------------------------------------------------------------------------

def test_criterion_01_storage_ratio(world, record_property):
    t0 = time.perf_counter()
    rows = {(r["mechanism"], r["N"]): r for r in bench_storage(BenchConfig(mechanisms=("csd", "sd"), claim_counts=(100,)))}
    elapsed = time.perf_counter() - t0
    ratio = rows["csd", 100]["credential_bytes"] / rows["sd", 100]["credential_bytes"]
    record_property("csd_bytes", rows["csd", 100]["credential_bytes"])
    record_property("sd_bytes", rows["sd", 100]["credential_bytes"])
    record_property("ratio", round(ratio, 4))
    record_property("seconds", round(elapsed, 2))
    assert ratio <= STORAGE_RATIO_MAX
    assert elapsed < 10


# -- 2 -------------------------------------------------------------------------

def test_criterion_02_vp_size_ratios(world, record_property):
    t0 = time.perf_counter()
    failures = []
    for (n, k), (lo, hi) in VP_BANDS.items():
        ratio = vp_size(world, "csd", n, k).presentation_bytes / vp_size(world, "sd", n, k).presentation_bytes
        record_property(f"N{n}_k{k}", round(ratio, 4))
        if not lo <= ratio <= hi:
            failures.append((n, k, ratio))
    elapsed = time.perf_counter() - t0
    record_property("seconds", round(elapsed, 2))
    assert not failures
    assert elapsed < 30


# -- 3 -------------------------------------------------------------------------

def test_criterion_03_constant_size_presentations(world, record_property):
    nonce = world.nonce("constant-size")
    for k in (1, 3, 10):
        keys = [f"claim_key_{i}" for i in range(1, k + 1)]
        csd_sizes, sd_sizes = [], []
        for total in (k, k + 50, k + 98):
            claims = synthetic_claims(total)
            csd_sizes.append(len(world.present("csd", world.issue("csd", claims), keys, nonce).to_compact()))
            sd_sizes.append(len(world.present("sd", world.issue("sd", claims), keys, nonce).to_compact()))
        record_property(f"k{k}_csd", csd_sizes)
        record_property(f"k{k}_sd", sd_sizes)
        assert len(set(csd_sizes)) == 1
        assert all(a < b for a, b in zip(sd_sizes, sd_sizes[1:]))


# -- 4 -------------------------------------------------------------------------

def _ref_compress(pt) -> bytes:
    """Independent 32-byte encoding of a py_ecc G1 point."""
    x, y = int(pt[0]), int(pt[1])
    out = bytearray(x.to_bytes(32, "big"))
    if y > (bn254.P - 1) // 2:
        out[0] |= 0x80
    return bytes(out)


def test_criterion_04_accumulator_oracle(record_property):
    rng = random.Random(404)
    mismatches = 0
    for _ in range(ORACLE_INSTANCES):
        alpha = rng.randrange(1, acc.R)
        sk = acc.AccumulatorSecretKey(alpha)
        s = rng.randrange(1, acc.R)
        v0 = acc.AccumulatorValue(bn254.g1_mul(bn254.G1_GEN, s))
        ys = []
        while len(ys) < rng.randint(1, ORACLE_MAX_SET):
            y = rng.randrange(acc.R)
            if y not in ys and (y + alpha) % acc.R:
                ys.append(y)
        # direct products with the trapdoor, no inversions
        prod = 1
        for y in ys:
            prod = prod * (y + alpha) % acc.R
        want_value = _ref_compress(ref.multiply(ref.G1, s * prod % acc.R))
        want_witnesses = []
        for i in range(len(ys)):
            p = s
            for j, y in enumerate(ys):
                if j != i:
                    p = p * (y + alpha) % acc.R
            want_witnesses.append(_ref_compress(ref.multiply(ref.G1, p)))
        value = acc.accumulate_batch(v0, ys, sk)
        witnesses = acc.compute_witnesses_batch(value, ys, sk)
        if value.to_bytes() != want_value or [w.to_bytes() for w in witnesses] != want_witnesses:
            mismatches += 1
    record_property("instances", ORACLE_INSTANCES)
    record_property("mismatches", mismatches)
    assert mismatches == 0


# -- 5 -------------------------------------------------------------------------

def _flip(data: bytes, bit: int) -> bytes:
    out = bytearray(data)
    out[bit // 8] ^= 1 << (bit % 8)
    return bytes(out)


def _resign(vp, holder):
    unsigned = dataclasses.replace(vp, signature=b"")
    return dataclasses.replace(vp, signature=holder.signing_key.sign(unsigned.signing_input().encode()))


def _tamper(vp, target, rng, holder):
    """One single-bit change; claims, witnesses and values are re-signed by the holder."""
    if target == "signature":
        return dataclasses.replace(vp, signature=_flip(vp.signature, rng.randrange(len(vp.signature) * 8)))
    if target == "accumulator":
        bad = dataclasses.replace(vp, accumulator_value=_flip(vp.accumulator_value, rng.randrange(256)))
        return _resign(bad, holder)
    i = rng.randrange(len(vp.disclosed))
    entry = vp.disclosed[i]
    if target == "witness":
        entry = csd.WvcEntry(_flip(entry.witness, rng.randrange(256)), entry.claim)
    else:
        raw = csd.canonicalize(entry.claim)
        entry = csd.WvcEntry(entry.witness, parse_canonical(_flip(raw, rng.randrange(len(raw) * 8))))
    entries = list(vp.disclosed)
    entries[i] = entry
    bad = dataclasses.replace(vp, disclosed=tuple(entries))
    if i == 0:
        bad = dataclasses.replace(bad, issuer_did=entry.claim.value)
    elif i == 1:
        bad = dataclasses.replace(bad, holder_did=entry.claim.value)
    return _resign(bad, holder)


def test_criterion_05_completeness_and_soundness(world, record_property):
    # completeness, all three mechanisms
    honest = 0
    for n in (1, 10, 100):
        claims = synthetic_claims(n)
        ks = sorted({disclosed_count(n, f / 10) for f in range(10)})
        for mech in ("csd", "sd", "mt"):
            cred = world.issue(mech, claims)
            for k in ks:
                nonce = world.nonce("complete", mech, n, k)
                keys = [c.key for c in claims[:k]]
                verdict = world.verify(mech, world.present(mech, cred, keys, nonce), nonce)
                assert verdict, f"{mech} N={n} k={k}: {verdict}"
                honest += 1
        cred = world.issue("csd", claims)
        nonce = world.nonce("complete-empty", n)
        assert world.verify("csd", world.present("csd", cred, [], nonce), nonce)
        honest += 1
    record_property("honest_flows", honest)

    # single-bit tampering
    rng = random.Random(505)
    creds = {n: world.issue("csd", synthetic_claims(n)) for n in (1, 10)}
    targets = ("claim", "witness", "accumulator", "signature")
    rejected, reasons = 0, {}
    for trial in range(TAMPER_TRIALS):
        n = rng.choice((1, 10))
        keys = rng.sample([f"claim_key_{i}" for i in range(1, n + 1)], rng.randint(0, min(n, 3)))
        nonce = world.nonce("tamper", trial)
        vp = world.present("csd", creds[n], keys, nonce)
        try:
            bad = _tamper(vp, targets[trial % 4], rng, world.holder)
            token = bad.to_compact()
            verdict = world.verify("csd", wire.decode_presentation(token), nonce)
            reason = verdict.reason.value if not verdict else "ACCEPTED"
        except (CsdError, ValueError) as exc:
            # the tampered object cannot even be encoded or decoded
            verdict, reason = None, type(exc).__name__
        reasons[reason] = reasons.get(reason, 0) + 1
        if not verdict:
            rejected += 1
    record_property("tamper_rejected", f"{rejected}/{TAMPER_TRIALS}")
    record_property("tamper_outcomes", json.dumps(reasons, sort_keys=True))

    # non-members never verify
    issuer = world.issuer
    cred = creds[10]
    value = acc.AccumulatorValue.from_bytes(cred.payload.accumulator_value)
    members = {csd.hash_to_element(c) for c in cred.claims}
    member_ws = [acc.Witness.from_bytes(e.witness) for e in cred.wvc]
    foreign = csd.issue_credential(issuer, world.holder.did, synthetic_claims(5), issued_at=BENCH_IAT, v0_seed=b"foreign")
    foreign_ws = [acc.Witness.from_bytes(e.witness) for e in foreign.wvc]
    false_accepts = 0
    for trial in range(NON_MEMBER_TRIALS):
        y = rng.randrange(acc.R)
        if y in members:
            continue
        kind = trial % 3
        if kind == 0:
            w = rng.choice(member_ws)
        elif kind == 1:
            w = rng.choice(foreign_ws)
        else:
            w = acc.Witness(bn254.g1_mul(bn254.G1_GEN, rng.randrange(1, acc.R)))
        if acc.verify_witness(value, y, w, issuer.acc_pk):
            false_accepts += 1
    record_property("non_member_false_accepts", f"{false_accepts}/{NON_MEMBER_TRIALS}")

    assert rejected == TAMPER_TRIALS
    assert false_accepts == 0


# -- 6 -------------------------------------------------------------------------

def test_criterion_06_replay(world, record_property):
    t0 = time.perf_counter()
    store = NonceStore()
    checked = 0
    for mech in ("csd", "sd", "mt"):
        for n in (1, 10, 40):
            claims = synthetic_claims(n)
            cred = world.issue(mech, claims)
            nonce = new_nonce()
            pres = world.present(mech, cred, [claims[0].key], nonce)
            aud = world.verifier.did
            kw = dict(nonce_store=store, now=NOW)
            if mech == "csd":
                run = lambda p, n_: csd.verify_presentation(p, n_, aud, world.registry, **kw)
            elif mech == "sd":
                run = lambda p, n_: sdjwt.sd_verify(p, n_, world.registry, audience=aud, **kw)
            else:
                run = lambda p, n_: merkle.mt_verify(p, n_, world.registry, audience=aud, **kw)
            assert run(pres, nonce)
            assert run(pres, nonce).reason is RejectReason.NONCE_REUSED
            # the same bytes replayed into a new session
            for _ in range(5):
                assert run(pres, new_nonce()).reason is RejectReason.NONCE_MISMATCH
            # rewriting the nonce field without the holder key breaks the signature
            fresh = new_nonce()
            if mech == "csd":
                forged = dataclasses.replace(pres, nonce=fresh)
            else:
                forged = dataclasses.replace(pres, kb=dataclasses.replace(pres.kb, payload={**pres.kb.payload, "nonce": fresh}))
            assert run(forged, fresh).reason is RejectReason.BAD_SIGNATURE
            checked += 1
    elapsed = time.perf_counter() - t0
    record_property("presentations", checked)
    record_property("seconds", round(elapsed, 2))
    assert elapsed < 10


# -- 7 -------------------------------------------------------------------------

def test_criterion_07_quasi_commutativity(record_property):
    rng = random.Random(707)
    sk, _ = acc.keypair_from_seed(b"quasi-commutativity")
    v0 = acc.init_accumulator(rng_seed=b"qc")
    differing = 0
    for _ in range(PERMUTATION_TRIALS):
        ys = list({rng.randrange(acc.R) for _ in range(rng.randint(1, PERMUTATION_MAX_SET))})
        shuffled = ys[:]
        rng.shuffle(shuffled)
        if acc.accumulate_batch(v0, ys, sk).to_bytes() != acc.accumulate_batch(v0, shuffled, sk).to_bytes():
            differing += 1
    record_property("permutations", PERMUTATION_TRIALS)
    record_property("differing", differing)
    assert differing == 0


# -- 8 -------------------------------------------------------------------------

def _oracle_siblings(levels, indices):
    """Nodes whose subtree holds no disclosed leaf while their sibling's does, bottom-up."""
    out = []
    for height, level in enumerate(levels[:-1]):
        covered = {i >> height for i in indices}
        for node in range(len(level)):
            if node not in covered and node ^ 1 in covered:
                out.append(level[node])
    return out


def test_criterion_08_merkle_proofs(world, record_property):
    # single disclosures on real credentials
    for n in (1, 2, 3, 10, 17, 100):
        cred = world.issue("mt", synthetic_claims(n))
        expected = math.ceil(math.log2(merkle.padded_size(n)))
        for key in {f"claim_key_{i}" for i in (1, n, (n + 1) // 2)}:
            pres = world.present("mt", cred, [key], "n" * 22)
            assert len(pres.siblings) == expected, (n, key)
    # multiproofs against the oracle
    rng = random.Random(808)
    checked = 0
    for n in range(1, MERKLE_ORACLE_MAX_LEAVES + 1):
        leaves = [bytes([n, i]) * 16 for i in range(n)]
        levels = merkle.build_levels(leaves)
        depth = len(levels) - 1
        if n <= 12:
            subsets = (s for r in range(1, n + 1) for s in itertools.combinations(range(n), r))
        else:
            subsets = (tuple(sorted(rng.sample(range(n), rng.randint(1, n)))) for _ in range(1500))
        for subset in subsets:
            proof = merkle.multiproof(levels, subset)
            assert proof == _oracle_siblings(levels, subset), (n, subset)
            assert merkle.root_from_proof(depth, {i: leaves[i] for i in subset}, proof) == levels[-1][0]
            checked += 1
    record_property("multiproofs_checked", checked)


# -- 9 -------------------------------------------------------------------------

def test_criterion_09_latency_orderings(world, record_property):
    reps = 3
    issue_csd_100 = None
    for n in range(10, 101, 10):
        csd_issue, _ = latency_point(world, "csd", "issue", n, 0, reps)
        sd_issue, _ = latency_point(world, "sd", "issue", n, 0, reps)
        assert sd_issue < csd_issue, (n, sd_issue, csd_issue)
        for k in (1, disclosed_count(n, 0.5)):
            csd_verify, _ = latency_point(world, "csd", "verify", n, k, reps)
            sd_verify, _ = latency_point(world, "sd", "verify", n, k, reps)
            assert sd_verify < csd_verify, (n, k, sd_verify, csd_verify)
        if n == 100:
            issue_csd_100 = csd_issue
            record_property("csd_issue_N100_ms", round(csd_issue, 1))
            record_property("sd_issue_N100_ms", round(sd_issue, 2))
            record_property("csd_verify_N100_k51_ms", round(csd_verify, 1))
            record_property("sd_verify_N100_k51_ms", round(sd_verify, 2))
    assert issue_csd_100 / 1000 < CSD_ISSUE_N100_MAX_S


# -- 10 ------------------------------------------------------------------------

_ALPHABET = string.ascii_letters + string.digits + "_-. éü€"


def _random_value(rng, depth=0):
    kind = rng.randrange(7 if depth < 2 else 5)
    if kind == 0:
        return rng.randrange(-(10**12), 10**12)
    if kind == 1:
        return rng.choice([True, False, None])
    if kind == 2:
        return round(rng.uniform(-1e6, 1e6), rng.randrange(6))
    if kind in (3, 4):
        return "".join(rng.choice(_ALPHABET) for _ in range(rng.randrange(24)))
    if kind == 5:
        return [_random_value(rng, depth + 1) for _ in range(rng.randrange(4))]
    return {"k" + str(i): _random_value(rng, depth + 1) for i in range(rng.randrange(4))}


def _random_claims(rng):
    n = rng.randint(1, 8)
    keys = rng.sample([f"{w}_{i}" for w in ("name", "age", "addr", "id", "Ünit") for i in range(10)], n)
    return [Claim(k, _random_value(rng)) for k in keys]


def test_criterion_10_wire_roundtrip(world, record_property):
    rng = random.Random(1010)
    counts = {}
    for mech in ("csd", "sd", "mt"):
        objects = 0
        while objects < ROUNDTRIP_OBJECTS:
            claims = _random_claims(rng)
            iat = BENCH_IAT + rng.randrange(10**6)
            if mech == "csd":
                cred = csd.issue_credential(world.issuer, world.holder.did, claims, issued_at=iat, v0_seed=rng.randbytes(8))
            elif mech == "sd":
                cred = sdjwt.sd_issue(world.issuer, world.holder.did, claims, rng.randrange(4),
                                      holder_key=world.holder.verifying_key, issued_at=iat, rng=rng)
            else:
                cred = merkle.mt_issue(world.issuer, world.holder.did, claims,
                                       holder_key=world.holder.verifying_key, issued_at=iat, rng=rng)
            keys = [c.key for c in rng.sample(claims, rng.randint(1, len(claims)))]
            pres = world.present(mech, cred, keys, new_nonce())
            for obj in (cred, pres):
                token = wire.encode(obj)
                back = wire.decode(token)
                assert back == obj and wire.encode(back) == token, mech
                objects += 1
        counts[mech] = objects
    golden = json.loads(FIXTURE.read_text(encoding="utf-8"))
    for name, entry in golden.items():
        obj = wire.decode(entry["token"])
        assert describe(obj) == entry["decoded"], name
        assert wire.encode(obj) == entry["token"], name
    record_property("objects", json.dumps(counts, sort_keys=True))
    record_property("golden_tokens", len(golden))
