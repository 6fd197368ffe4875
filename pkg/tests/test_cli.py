import subprocess
import sys

import pytest

from oklab.bodies import simplex_body
from oklab.cli import main, parse_model
from oklab.errors import InputError
from oklab.polytope import format_polytope, read_polytope
from oklab.sections import format_sections, model_sections, read_sections, ModelSpec, conic_flag


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_body_chain(capsys, tmp_path):
    code, out, _ = run(capsys, "body", "--model", "p2:d=2", "--order", "lex", "--k", "1,2,3", "--out", str(tmp_path))
    assert code == 0
    assert "Δ₁ ⊆ Δ₂ ⊆ Δ₃: OK" in out
    for k in (1, 2, 3):
        P = read_polytope(tmp_path / f"delta_{k}.poly")
        assert P == simplex_body((2, 2))
    assert (tmp_path / "bodies.svg").read_text().startswith("<svg")


def test_body_csv_for_three_dimensions(capsys, tmp_path):
    code, _, _ = run(capsys, "body", "--model", "projective:n=3,d=1", "--k", "1", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "delta_1.csv").read_text().startswith("kind,c1,c2,c3,rhs")


def test_body_output_is_byte_stable(capsys, tmp_path):
    run(capsys, "body", "--model", "p2:d=2,flag=conic", "--k", "1,2", "--out", str(tmp_path / "a"))
    run(capsys, "body", "--model", "p2:d=2,flag=conic", "--k", "1,2", "--out", str(tmp_path / "b"))
    for name in ("delta_1.poly", "delta_2.poly", "bodies.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_volume_curve(capsys):
    code, out, _ = run(capsys, "volume", "--model", "curve:d=5", "--k", "1")
    assert code == 0
    assert out.strip() == "Δ=[0,5], vol=5, 1!·vol=5=deg L"


def test_volume_plane(capsys):
    code, out, _ = run(capsys, "volume", "--model", "p2:d=3")
    assert code == 0 and out.strip().endswith("2!·vol=9=(L²)")


def test_seshadri_file(capsys, tmp_path):
    path = tmp_path / "sigma_1_1_4.poly"
    path.write_text(format_polytope(simplex_body((1, 1, 4))))
    code, out, _ = run(capsys, "seshadri", "--polytope", str(path))
    assert code == 0 and out.strip() == "t*=1"
    code, out, _ = run(capsys, "seshadri", "--model", "p2:d=4")
    assert out.strip() == "t*=4"


def test_domain(capsys, tmp_path):
    path = tmp_path / "s.poly"
    path.write_text(format_polytope(simplex_body((1, 1))))
    code, out, _ = run(capsys, "domain", "--polytope", str(path), "--z", "3/5,0;0,4/5", "--mu", "1/4,1/4")
    assert code == 0
    assert out.splitlines() == ["z=3/5,0;0,4/5: outside", "mu=1/4,1/4: inside"]


def test_moment_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "moment", "image", "--model", "p2:d=2", "--out", str(tmp_path / "img.csv"))
    assert code == 0 and "hausdorff" in out
    assert (tmp_path / "img.csv").read_text().startswith("y1,y2")
    code, out, _ = run(capsys, "moment", "volume", "--model", "toric:simplex=1,4")
    assert code == 0 and "vol(Conv A)=2" in out
    code, out, _ = run(capsys, "moment", "cap", "--model", "curve:d=4", "--u-box", "0:0.6", "--margin", "0.5")
    assert code == 0 and "equal_on_U=0.0" in out


def test_degenerate_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "degenerate", "check", "--model", "p2:d=2,flag=conic", "--tau", "1/8")
    assert code == 0 and "gamma=10,1" in out
    report = tmp_path / "cert.txt"
    code, out, _ = run(capsys, "degenerate", "certify", "--model", "p2:d=2,flag=conic", "--grid", "32", "--out", str(report))
    assert code == 0 and out.startswith("gluing certificate: OK")
    assert report.read_text() == out


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "body", "--model", "nonsense:d=2")[0] == 2
    assert run(capsys, "degenerate", "certify", "--model", "p2:d=2", "--u-shrink", "1")[0] == 2
    assert run(capsys, "seshadri", "--polytope", str(tmp_path / "missing.poly"))[0] == 2
    code, out, _ = run(capsys, "degenerate", "certify", "--model", "p2:d=2,flag=conic", "--u-box=-1,-1:1,1",
                       "--k-box=-30,-30:30,30", "--delta", "0.5", "--grid", "8")
    assert code == 1 and "FAILED" in out
    with pytest.raises(SystemExit) as info:
        main(["volume", "--model"])
    assert info.value.code == 2


def test_verify(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0 and "12/12 properties hold" in out


def test_parse_model():
    assert parse_model("p2:d=2") == ModelSpec.projective_space(2, 2)
    assert parse_model("projective:n=3,d=2").self_intersection() == 8
    assert parse_model("toric:simplex=1,1,4").polytope == simplex_body((1, 1, 4))
    assert parse_model("p2:d=2,flag=conic").flag is not None
    for bad in ("p2:d=0", "curve:", "toric:", "p2:d=2,flag=line", "custom:"):
        with pytest.raises(InputError):
            parse_model(bad)


def test_custom_model_file(capsys, tmp_path):
    path = tmp_path / "conic.sec"
    path.write_text(format_sections(model_sections(ModelSpec.projective_space(2, 2, flag=conic_flag()), 1)))
    assert read_sections(path).level == 1
    code, out, _ = run(capsys, "volume", "--model", f"custom:file={path}")
    assert code == 0 and "2!·vol=4" in out


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "oklab.cli", "volume", "--model", "curve:d=2"], capture_output=True, text=True)
    assert res.returncode == 0 and "vol=2" in res.stdout
