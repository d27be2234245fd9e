"""``csdjwt`` command line: key generation, the protocol flows and the benchmarks.

Exit codes: 0 accept / success, 1 I/O or usage problems, 3 undecodable
input, 4 a presentation that cannot be built, and 10 + n for the n-th
rejection reason (see ``csdjwt verify --help``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import bench, csd, merkle, sdjwt, wire
from .claims import claims_from_mapping
from .errors import ClaimError, CsdError, DecodeError, DidNotFoundError, PresentationError, RejectReason
from .identity import Identity, load_identity, save_identity
from .nonce import NonceStore, new_nonce
from .registry import Registry

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DECODE = 3
EXIT_PRESENT = 4
REJECT_EXIT = {reason: 10 + i for i, reason in enumerate(RejectReason)}

DEFAULT_REGISTRY = "registry.jsonl"


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8").strip()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _split(text: str | None) -> list[str]:
    return [t.strip() for t in (text or "").split(",") if t.strip()]


def _counts(text: str | None) -> tuple[int, ...]:
    """``10,20,30`` or an inclusive range ``10:100:10``."""
    if not text:
        return bench.DEFAULT_COUNTS
    if ":" in text:
        start, stop, *step = (int(x) for x in text.split(":"))
        return tuple(range(start, stop + 1, step[0] if step else 1))
    return tuple(int(x) for x in _split(text))


def _fractions(text: str | None) -> tuple[float, ...]:
    if not text:
        return bench.DEFAULT_FRACTIONS
    out = []
    for item in _split(text):
        value = float(item.rstrip("%")) / 100 if item.endswith("%") else float(item)
        out.append(value)
    return tuple(out)


# --- protocol commands -------------------------------------------------------

def cmd_keygen(args) -> int:
    role = args.role
    if args.seed is not None:
        ident = Identity.from_seed(f"{role}/{args.seed}".encode(), issuer=role == "issuer")
    else:
        ident = Identity.generate(issuer=role == "issuer")
    save_identity(ident, args.out)
    Registry(args.registry).register(ident.did_document())
    print(ident.did)
    return EXIT_OK


def cmd_issue(args) -> int:
    issuer = load_identity(args.key)
    claims = claims_from_mapping(json.loads(_read(args.claims)))
    if args.mechanism == "csd":
        cred = csd.issue_credential(issuer, args.holder, claims)
    else:
        holder_key = Registry(args.registry).resolve(args.holder).verification_key()
        issue = sdjwt.sd_issue if args.mechanism == "sd" else merkle.mt_issue
        cred = issue(issuer, args.holder, claims, holder_key=holder_key)
    _write(args.out, wire.encode_credential(cred))
    return EXIT_OK


def cmd_present(args) -> int:
    holder = load_identity(args.key)
    cred = wire.decode_credential(_read(args.credential))
    keys = _split(args.disclose)
    if isinstance(cred, csd.VerifiableCredential):
        pres = csd.generate_presentation(cred, keys, csd.PresentationRequest(args.nonce, args.audience), holder)
    elif isinstance(cred, sdjwt.SdJwtCredential):
        pres = sdjwt.sd_present(cred, keys, args.nonce, holder, audience=args.audience)
    else:
        pres = merkle.mt_present(cred, keys, args.nonce, holder, audience=args.audience)
    _write(args.out, wire.encode_presentation(pres))
    return EXIT_OK


def cmd_verify(args) -> int:
    pres = wire.decode_presentation(_read(args.presentation))
    registry = Registry(args.registry)
    store = NonceStore(args.replay_store) if args.replay_store else None
    if isinstance(pres, csd.VerifiablePresentation):
        verdict = csd.verify_presentation(pres, args.nonce, args.audience, registry, nonce_store=store)
    elif isinstance(pres, sdjwt.SdJwtPresentation):
        verdict = sdjwt.sd_verify(pres, args.nonce, registry, audience=args.audience, nonce_store=store)
    else:
        verdict = merkle.mt_verify(pres, args.nonce, registry, audience=args.audience, nonce_store=store)
    print(verdict)
    return EXIT_OK if verdict else REJECT_EXIT[verdict.reason]


def cmd_nonce(args) -> int:
    print(new_nonce())
    return EXIT_OK


# --- benchmarks ----------------------------------------------------------------

def _config(args) -> bench.BenchConfig:
    mechs = tuple(_split(args.mechanism)) or bench.MECHANISMS
    return bench.BenchConfig(
        mechanisms=mechs,
        claim_counts=_counts(args.claims),
        fractions=_fractions(args.disclose),
        reps=args.reps,
        seed=args.seed,
    )


def cmd_bench_storage(args) -> int:
    _write(args.out, bench.to_csv(bench.bench_storage(_config(args)), bench.STORAGE_HEADER))
    return EXIT_OK


def cmd_bench_vp(args) -> int:
    _write(args.out, bench.to_csv(bench.bench_vp(_config(args)), bench.VP_HEADER))
    return EXIT_OK


def cmd_bench_latency(args) -> int:
    _write(args.out, bench.to_csv(bench.bench_latency(_config(args)), bench.LATENCY_HEADER))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csdjwt", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="create an identity, write its key file and register its DID")
    p.add_argument("--role", choices=("issuer", "holder", "verifier"), required=True)
    p.add_argument("--out", required=True, help="key file to write")
    p.add_argument("--registry", default=DEFAULT_REGISTRY)
    p.add_argument("--seed", help="derive the keys deterministically from this string")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("issue", help="issue a credential from a JSON object of claims")
    p.add_argument("--mechanism", choices=bench.MECHANISMS, default="csd")
    p.add_argument("--key", required=True, help="issuer key file")
    p.add_argument("--holder", required=True, help="holder DID")
    p.add_argument("--claims", required=True, help="JSON file; each top-level member is a claim")
    p.add_argument("--registry", default=DEFAULT_REGISTRY)
    p.add_argument("--out", help="credential token file (default: stdout)")
    p.set_defaults(func=cmd_issue)

    p = sub.add_parser("present", help="build a presentation for a verifier nonce")
    p.add_argument("--credential", required=True, help="credential token file")
    p.add_argument("--key", required=True, help="holder key file")
    p.add_argument("--disclose", default="", help="comma-separated claim keys to disclose")
    p.add_argument("--nonce", required=True)
    p.add_argument("--audience", required=True, help="verifier identifier")
    p.add_argument("--out", help="presentation token file (default: stdout)")
    p.set_defaults(func=cmd_present)

    reasons = ", ".join(f"{code}={reason.value}" for reason, code in REJECT_EXIT.items())
    p = sub.add_parser("verify", help="verify a presentation", description=f"Rejection exit codes: {reasons}.")
    p.add_argument("--presentation", required=True, help="presentation token file")
    p.add_argument("--nonce", required=True, help="the nonce this verifier issued")
    p.add_argument("--audience", required=True, help="this verifier's identifier")
    p.add_argument("--registry", default=DEFAULT_REGISTRY)
    p.add_argument("--replay-store", help="file of consumed nonces shared across runs")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("nonce", help="print a fresh 128-bit nonce")
    p.set_defaults(func=cmd_nonce)

    bench_help = {
        "bench-storage": (cmd_bench_storage, "credential bytes per mechanism and claim count (N = 1 always included)"),
        "bench-vp": (cmd_bench_vp, "presentation bytes over the (N, k) grid"),
        "bench-latency": (cmd_bench_latency, "issue / present / verify latency in milliseconds"),
    }
    for name, (func, text) in bench_help.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--mechanism", default="", help="comma-separated subset of csd,sd,mt (default: all)")
        p.add_argument("--claims", help="claim counts: '10,20' or 'start:stop:step' (default 10:100:10)")
        p.add_argument(
            "--disclose",
            help="disclosure fractions, e.g. '0,0.5' or '0%%,50%%'; fraction f discloses floor(f*N)+1 claims, so 0%% means one "
            "claim (the '+1' convention; default 0%%..90%% in steps of 10%%)",
        )
        p.add_argument("--reps", type=int, default=bench.DEFAULT_REPS, help="timed repetitions per point")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="CSV file (default: stdout)")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DecodeError, json.JSONDecodeError) as exc:
        print(f"error: cannot decode input: {exc}", file=sys.stderr)
        return EXIT_DECODE
    except (PresentationError, ClaimError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRESENT
    except DidNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return REJECT_EXIT[RejectReason.UNKNOWN_DID]
    except (OSError, CsdError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
