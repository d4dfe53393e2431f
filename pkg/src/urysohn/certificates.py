"""Machine-checkable certificates: exact inequalities plus an integrity hash.

A certificate is a list of checks, each carrying both sides of one rational
(in)equality and the claimed verdict.  The verifier recomputes every verdict
from the recorded rationals alone and rejects any byte-level tampering via
the trailing content hash.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction

from .rationals import RatParseError, fmt_rat, parse_rat

OPS = {
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    "=": lambda a, b: a == b,
}


@dataclass(frozen=True)
class Check:
    """One exact comparison: name, left side, operator, right side."""

    name: str
    lhs: Fraction
    op: str
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return OPS[self.op](self.lhs, self.rhs)


HEADER = "CERT"


def emit_certificate(checks: list[Check]) -> bytes:
    lines = [HEADER]
    ok = 0
    for c in checks:
        if " " in c.name or not c.name:
            raise ValueError(f"check name {c.name!r} must be nonempty and space-free")
        if c.op not in OPS:
            raise ValueError(f"unknown operator {c.op!r}")
        verdict = "OK" if c.holds else "FAIL"
        ok += verdict == "OK"
        lines.append(f"check {c.name} {fmt_rat(c.lhs)} {c.op} {fmt_rat(c.rhs)} {verdict}")
    lines.append(f"summary checks={len(checks)} ok={ok} fail={len(checks) - ok}")
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return (body + f"sha256 {digest}\n").encode("utf-8")


def parse_certificate(data: bytes) -> tuple[list[Check], list[str]]:
    """Parse and fully re-verify; returns (checks, problems)."""
    problems: list[str] = []
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return [], ["not valid UTF-8"]
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    if not lines or lines[0] != HEADER:
        return [], ["missing certificate header"]
    if not lines[-1].startswith("sha256 "):
        return [], ["missing integrity hash"]
    body = "\n".join(lines[:-1]) + "\n"
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if lines[-1] != f"sha256 {digest}":
        return [], ["integrity hash mismatch"]
    checks: list[Check] = []
    ok = fail = 0
    summary_seen = False
    for idx, line in enumerate(lines[1:-1], start=2):
        if line.startswith("check "):
            if summary_seen:
                problems.append(f"line {idx}: check after summary")
                continue
            parts = line.split(" ")
            if len(parts) != 6:
                problems.append(f"line {idx}: malformed check record")
                continue
            _, name, lhs_s, op, rhs_s, verdict = parts
            try:
                lhs, rhs = parse_rat(lhs_s), parse_rat(rhs_s)
            except RatParseError as exc:
                problems.append(f"line {idx}: {exc}")
                continue
            if op not in OPS or verdict not in ("OK", "FAIL"):
                problems.append(f"line {idx}: unknown operator or verdict")
                continue
            check = Check(name, lhs, op, rhs)
            recomputed = "OK" if check.holds else "FAIL"
            if recomputed != verdict:
                problems.append(
                    f"line {idx}: recorded verdict {verdict} but "
                    f"{fmt_rat(lhs)} {op} {fmt_rat(rhs)} is {recomputed}"
                )
            checks.append(check)
            ok += recomputed == "OK"
            fail += recomputed == "FAIL"
        elif line.startswith("summary "):
            summary_seen = True
            expected = f"summary checks={len(checks)} ok={ok} fail={fail}"
            if line != expected:
                problems.append(f"line {idx}: summary does not match the checks")
        else:
            problems.append(f"line {idx}: unknown record")
    if not summary_seen:
        problems.append("missing summary line")
    return checks, problems


def verify_certificate(data: bytes) -> tuple[bool, list[str]]:
    checks, problems = parse_certificate(data)
    problems.extend(
        f"failing check {c.name}: {fmt_rat(c.lhs)} {c.op} {fmt_rat(c.rhs)}"
        for c in checks
        if not c.holds
    )
    return not problems, problems
