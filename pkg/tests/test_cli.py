import json

import numpy as np
import pytest

from hdslice import cxmat
from hdslice.cli import RunConfig, main, parse_range, parse_vector
from hdslice.errors import ParseError


@pytest.fixture
def mat(tmp_path):
    def write(A, name="m.json"):
        p = tmp_path / name
        p.write_text(cxmat.dumps_matrix(np.asarray(A, dtype=complex)))
        return str(p)
    return write


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_parse_helpers():
    np.testing.assert_array_equal(parse_vector("1, -2.5"), [1.0, -2.5])
    assert parse_range("-1,2") == (-1.0, 2.0)
    for bad in ("", "a,b", "nan"):
        with pytest.raises(ParseError):
            parse_vector(bad)
    with pytest.raises(ParseError):
        parse_range("2,1")
    with pytest.raises(ParseError):
        RunConfig(tol=0.0)


def test_svd(capsys, mat):
    rc, out, _ = run(capsys, "svd", mat(np.diag([1, 2, 3])))
    assert rc == 0 and json.loads(out)["sigma"] == [3.0, 2.0, 1.0]
    rc, out, _ = run(capsys, "svd", mat(np.diag([1j, 2, 3])))
    assert rc == 0 and json.loads(out)["sigma"] == [3.0, 2.0, 1.0]


def test_svd_round_trip(capsys, mat, rng):
    A = cxmat.random_ginibre(3, 4, rng)
    rc, out, _ = run(capsys, "svd", mat(A))
    obj = json.loads(out)
    U, V = cxmat.matrix_from_dict(obj["U"]), cxmat.matrix_from_dict(obj["V"])
    B = U @ cxmat.rect_diag(obj["sigma"], 3, 4) @ V.conj().T
    assert cxmat.fro(B - A) <= 1e-10 * cxmat.fro(A)


def test_malformed_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"rows": 2,\n "cols": }')
    rc, _, err = run(capsys, "svd", str(p))
    assert rc == 2 and "line 2 column" in err


def test_missing_file(capsys):
    assert run(capsys, "svd", "/nonexistent/m.json")[0] == 2


def test_critical(capsys):
    rc, out, _ = run(capsys, "critical", '{"family": "detmag"}', "3,3")
    assert rc == 0 and json.loads(out)["count"] == 6
    rc, out, _ = run(capsys, "critical", '{"family": "fermat", "n": 2, "d": 4}', "0.1,0.05")
    assert rc == 0 and json.loads(out)["count"] == 8
    rc, _, _ = run(capsys, "critical", '{"family": "detmag"}', "1,1", "--require-distinct")
    assert rc == 3
    assert run(capsys, "critical", '{"family": "parabola"}', "1,1")[0] == 3


def test_lift(capsys, mat, rng):
    rc, out, _ = run(capsys, "lift", '{"family": "allones", "n": 3}', mat(np.diag([1j, 2, 3])))
    assert rc == 0 and json.loads(out)["count"] == 8
    rc, out, _ = run(capsys, "lift", '{"family": "rank", "n": 4, "r": 2}', mat(cxmat.random_ginibre(4, 6, rng)))
    obj = json.loads(out)
    assert rc == 0 and obj["count"] == 6 and set(obj["points"][0]) >= {"x", "X", "distance_sq", "residual"}
    assert run(capsys, "lift", '{"family": "detmag"}', mat(np.diag([3, 3])))[0] == 3


def test_eckart_young_and_hdpoly(capsys, mat):
    rc, out, _ = run(capsys, "eckart-young", mat(np.diag([3, 2, 1])), "2")
    assert rc == 0 and [p["distance_sq"] for p in json.loads(out)["points"]] == [1.0, 4.0, 9.0]
    rc, out, _ = run(capsys, "hdpoly", mat(np.diag([3, 2, 1])), "2")
    assert rc == 0 and json.loads(out)["coeffs_t2"] == [-36.0, 49.0, -14.0, 1.0]
    assert run(capsys, "eckart-young", mat(np.diag([1, 0])), "2")[0] == 3


def test_chamber_scan(capsys, tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ['{"family": "detmag"}', "--x-range=-5,5", "--y-range=-5,5", "--step", "0.5"]
    assert main(["--threads", "1", "--out", str(out1), "chamber-scan", *args]) == 0
    assert main(["--threads", "3", "--out", str(out2), "chamber-scan", *args]) == 0
    text = out1.read_text()
    assert text == out2.read_text()
    assert text.startswith("y1,y2,Dplus,Dminus,m1,m2,predicted,observed,agree,skipped_reason")
    assert ",false," not in text
    assert run(capsys, "chamber-scan", '{"family": "detmag"}', "--x-range", "1,0",
               "--y-range", "0,1", "--step", "0.5")[0] == 2


def test_verify(capsys):
    rc, out, _ = run(capsys, "verify", "rd", "skew")
    obj = json.loads(out)
    assert rc == 0 and obj["passed"] and [s["suite"] for s in obj["suites"]] == ["rd", "skew"]
