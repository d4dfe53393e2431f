from fractions import Fraction

from urysohn.certificates import Check, emit_certificate, verify_certificate

F = Fraction


def sample():
    return [
        Check("triangle", F(1, 2), "<=", F(3, 4)),
        Check("link", F(1, 8), "=", F(1, 8)),
        Check("drift", F(1, 16), "<", F(1, 8)),
    ]


def test_round_trip_verifies():
    data = emit_certificate(sample())
    ok, problems = verify_certificate(data)
    assert ok, problems


def test_empty_certificate():
    data = emit_certificate([])
    assert b"summary checks=0 ok=0 fail=0" in data
    ok, _ = verify_certificate(data)
    assert ok


def test_failing_check_is_recorded_and_rejected():
    data = emit_certificate([Check("bogus", F(2), "<=", F(1))])
    assert b"FAIL" in data
    ok, problems = verify_certificate(data)
    assert not ok
    assert any("failing check" in p for p in problems)


def test_every_single_byte_tampering_rejected():
    data = emit_certificate(sample())
    for i in range(len(data)):
        for flip in (b"0", b"9", b"x"):
            tampered = data[:i] + flip + data[i + 1 :]
            if tampered == data:
                continue
            ok, _ = verify_certificate(tampered)
            assert not ok, f"tampering at byte {i} accepted"


def test_verdict_edit_rejected():
    data = emit_certificate(sample())
    tampered = data.replace(b"1/2 <= 3/4 OK", b"1/1 <= 3/4 OK")
    ok, problems = verify_certificate(tampered)
    assert not ok
    assert any("hash" in p for p in problems)
