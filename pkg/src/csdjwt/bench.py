"""Benchmark harness: storage, presentation size and latency grids as CSV rows.

Size columns are deterministic for a fixed seed: identities, salts, the
initial accumulator value, nonces and timestamps all derive from it.
Latency columns are wall-clock and machine dependent.
"""

from __future__ import annotations

import csv
import io
import random
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import csd, merkle, sdjwt, wire
from .claims import Claim, synthetic_claims
from .identity import Identity
from .jose import b64u_encode
from .registry import Registry

MECHANISMS = ("csd", "sd", "mt")
DEFAULT_COUNTS = tuple(range(10, 101, 10))
DEFAULT_FRACTIONS = tuple(i / 10 for i in range(10))
DEFAULT_REPS = 100
BENCH_IAT = 1760000000

STORAGE_HEADER = ("mechanism", "N", "credential_bytes", "credential_raw_bytes")
VP_HEADER = ("mechanism", "N", "k", "presentation_bytes", "presentation_raw_bytes")
LATENCY_HEADER = ("mechanism", "phase", "N", "k", "mean_ms", "stddev")


def disclosed_count(n: int, fraction: float) -> int:
    """``floor(fraction * n) + 1`` claims, capped at ``n`` ("0%+1" is one claim)."""
    if not 0 <= fraction <= 1:
        raise ValueError("disclosure fraction must be within [0, 1]")
    return min(n, int(fraction * n + 1e-9) + 1)


def disclosed_keys(claims: Sequence[Claim], k: int) -> list[str]:
    """Evenly spaced selection: indices floor(j * N / k) for j < k."""
    n = len(claims)
    return [claims[j * n // k].key for j in range(k)]


@dataclass
class BenchConfig:
    mechanisms: tuple[str, ...] = MECHANISMS
    claim_counts: tuple[int, ...] = DEFAULT_COUNTS
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    reps: int = DEFAULT_REPS
    seed: int = 0
    warmup: int = 1

    def __post_init__(self):
        unknown = set(self.mechanisms) - set(MECHANISMS)
        if unknown:
            raise ValueError(f"unknown mechanisms: {sorted(unknown)}")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not self.claim_counts or min(self.claim_counts) < 1:
            raise ValueError("claim counts must be at least 1")

    def grid(self) -> list[tuple[int, int]]:
        """(N, k) pairs, duplicates from rounding removed."""
        out = []
        for n in self.claim_counts:
            for k in dict.fromkeys(disclosed_count(n, f) for f in self.fractions):
                out.append((n, k))
        return out


@dataclass
class World:
    """Deterministic parties and registry for one benchmark seed."""

    seed: int
    issuer: Identity = field(init=False)
    holder: Identity = field(init=False)
    verifier: Identity = field(init=False)
    registry: Registry = field(init=False)

    def __post_init__(self):
        tag = str(self.seed).encode()
        self.issuer = Identity.from_seed(b"issuer/" + tag, issuer=True)
        self.holder = Identity.from_seed(b"holder/" + tag)
        self.verifier = Identity.from_seed(b"verifier/" + tag)
        self.registry = Registry()
        for ident in (self.issuer, self.holder, self.verifier):
            self.registry.register(ident.did_document())

    def rng(self, *parts) -> random.Random:
        return random.Random("/".join(map(str, (self.seed,) + parts)))

    def nonce(self, *parts) -> str:
        return b64u_encode(self.rng("nonce", *parts).randbytes(16))

    def issue(self, mech: str, claims: Sequence[Claim], *, deterministic: bool = True):
        n = len(claims)
        if mech == "csd":
            seed = f"{self.seed}/{n}".encode() if deterministic else None
            return csd.issue_credential(self.issuer, self.holder.did, claims, issued_at=BENCH_IAT, v0_seed=seed)
        rng = self.rng(mech, n) if deterministic else None
        if mech == "sd":
            return sdjwt.sd_issue(
                self.issuer, self.holder.did, claims, holder_key=self.holder.verifying_key, issued_at=BENCH_IAT, rng=rng
            )
        return merkle.mt_issue(
            self.issuer, self.holder.did, claims, holder_key=self.holder.verifying_key, issued_at=BENCH_IAT, rng=rng
        )

    def present(self, mech: str, cred, keys: Sequence[str], nonce: str):
        aud = self.verifier.did
        if mech == "csd":
            return csd.generate_presentation(cred, keys, csd.PresentationRequest(nonce, aud), self.holder)
        if mech == "sd":
            return sdjwt.sd_present(cred, keys, nonce, self.holder, audience=aud, issued_at=BENCH_IAT)
        return merkle.mt_present(cred, keys, nonce, self.holder, audience=aud, issued_at=BENCH_IAT)

    def verify(self, mech: str, pres, nonce: str):
        aud = self.verifier.did
        if mech == "csd":
            return csd.verify_presentation(pres, nonce, aud, self.registry, now=BENCH_IAT)
        if mech == "sd":
            return sdjwt.sd_verify(pres, nonce, self.registry, audience=aud, now=BENCH_IAT)
        return merkle.mt_verify(pres, nonce, self.registry, audience=aud, now=BENCH_IAT)


def bench_storage(config: BenchConfig) -> list[dict]:
    """Credential bytes per mechanism; N = 1 is always part of the grid."""
    world = World(config.seed)
    counts = sorted({1, *config.claim_counts})
    rows = []
    for mech in config.mechanisms:
        for n in counts:
            report = wire.measure(world.issue(mech, synthetic_claims(n)))
            rows.append(
                {
                    "mechanism": mech,
                    "N": n,
                    "credential_bytes": report.credential_bytes,
                    "credential_raw_bytes": report.credential_raw_bytes,
                }
            )
    return rows


def vp_size(world: World, mech: str, n: int, k: int) -> wire.SizeReport:
    claims = synthetic_claims(n)
    cred = world.issue(mech, claims)
    pres = world.present(mech, cred, disclosed_keys(claims, k), world.nonce(mech, n, k))
    return wire.measure(cred, pres)


def bench_vp(config: BenchConfig) -> list[dict]:
    world = World(config.seed)
    rows = []
    for mech in config.mechanisms:
        for n, k in config.grid():
            report = vp_size(world, mech, n, k)
            rows.append(
                {
                    "mechanism": mech,
                    "N": n,
                    "k": k,
                    "presentation_bytes": report.presentation_bytes,
                    "presentation_raw_bytes": report.presentation_raw_bytes,
                }
            )
    return rows


def _time(fn: Callable[[], object], reps: int, warmup: int) -> tuple[float, float]:
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - t0) * 1000.0)
    stdev = statistics.stdev(samples) if len(samples) > 1 else 0.0
    return statistics.fmean(samples), stdev


def latency_point(world: World, mech: str, phase: str, n: int, k: int, reps: int, warmup: int = 1) -> tuple[float, float]:
    claims = synthetic_claims(n)
    if phase == "issue":
        return _time(lambda: world.issue(mech, claims, deterministic=False), reps, warmup)
    cred = world.issue(mech, claims)
    keys = disclosed_keys(claims, k)
    nonce = world.nonce("latency", mech, n, k)
    if phase == "present":
        return _time(lambda: world.present(mech, cred, keys, nonce), reps, warmup)
    if phase == "verify":
        pres = world.present(mech, cred, keys, nonce)

        def run():
            if not world.verify(mech, pres, nonce):
                raise RuntimeError(f"honest {mech} presentation rejected")

        return _time(run, reps, warmup)
    raise ValueError(f"unknown phase: {phase}")


def bench_latency(config: BenchConfig, phases: Iterable[str] = ("issue", "present", "verify")) -> list[dict]:
    """Mean and standard deviation in milliseconds; issue rows carry k = 0."""
    world = World(config.seed)
    rows = []
    for mech in config.mechanisms:
        for phase in phases:
            points = [(n, 0) for n in config.claim_counts] if phase == "issue" else config.grid()
            for n, k in points:
                mean, sd = latency_point(world, mech, phase, n, k, config.reps, config.warmup)
                rows.append(
                    {"mechanism": mech, "phase": phase, "N": n, "k": k, "mean_ms": round(mean, 4), "stddev": round(sd, 4)}
                )
    return rows


def to_csv(rows: Sequence[dict], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(header), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
