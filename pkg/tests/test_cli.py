import io
import json

import pytest

from aggclone.cli import main
from aggclone.fixtures import worked_function, worked_lattice
from aggclone.fntable import format_fn
from aggclone.lattice import boolean, chain, format_lat, read_lat
from aggclone.terms import parse_term, term_to_table


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path, data_dir):
    lat = worked_lattice()
    f = worked_function(lat)
    paths = {
        "chain3": data_dir / "chain3.lat",
        "bowtie": data_dir / "bowtie.lat",
        "worked": data_dir / "worked.fn",
        "chain2": tmp_path / "chain2.lat",
        "boolean3": tmp_path / "boolean3.lat",
    }
    paths["chain2"].write_text(format_lat(chain(2)))
    paths["boolean3"].write_text(format_lat(boolean(3)))
    text = format_fn(f).replace("1 1 -> 1", "1 1 -> 0")
    paths["no_boundary"] = tmp_path / "nb.fn"
    paths["no_boundary"].write_text(text)
    paths["incomplete"] = tmp_path / "inc.fn"
    paths["incomplete"].write_text("\n".join(format_fn(f).splitlines()[:-1]) + "\n")
    paths["meet2"] = tmp_path / "meet2.fn"
    paths["meet2"].write_text("lattice: chain2\narity: 2\nc0 c0 -> c0\nc0 c1 -> c0\nc1 c0 -> c0\nc1 c1 -> c1\n")
    paths["nonmono"] = tmp_path / "nonmono.fn"
    paths["nonmono"].write_text("lattice: chain3\narity: 1\n0 -> 0\na -> 1\n1 -> a\n")
    paths["rel"] = tmp_path / "b.rel"
    paths["rel"].write_text("lattice: chain3\narity: 2\n1 0\n0 0\n")
    paths["oplus_a"] = tmp_path / "oplus_a.fn"
    paths["oplus_a"].write_text(
        "lattice: chain3\narity: 2\n" + "".join(f"{x} {y} -> {'1' if x == y == '1' else '0' if x == y == '0' else 'a'}\n" for x in "0a1" for y in "0a1")
    )
    return paths


def test_lattice_check(files):
    code, out, _ = run("lattice", "check", files["chain3"])
    assert code == 0
    assert out.strip() == "valid bounded lattice, n=3, bottom=0, top=1"
    code, out, _ = run("lattice", "check", files["bowtie"])
    assert code == 2
    assert out.strip() == "NotALattice: {c,d} lack a unique infimum"
    code, _, err = run("lattice", "check", files["chain3"].parent / "missing.lat")
    assert code == 3 and "missing.lat" in err


def test_lattice_gen(tmp_path):
    target = tmp_path / "m3.lat"
    code, _, _ = run("lattice", "gen", "m3", "-o", target)
    assert code == 0
    assert read_lat(target).size == 5
    code, out, _ = run("lattice", "gen", "boolean", "--size", "2")
    assert code == 0 and out.startswith("# lattice boolean2")


def test_fn_check(files):
    code, out, _ = run("fn", "check", files["chain3"], files["worked"])
    assert code == 0 and "aggregation: yes" in out
    code, out, _ = run("fn", "check", files["chain3"], files["no_boundary"])
    assert code == 1 and "boundary: no" in out
    code, _, err = run("fn", "check", files["chain3"], files["incomplete"])
    assert code == 3 and err.startswith("IncompleteTable")


def test_decompose(files):
    code, out, _ = run("decompose", files["chain3"], files["worked"])
    assert code == 0
    term_line, verdict = out.strip().splitlines()
    assert verdict == "verified"
    lat = worked_lattice()
    assert term_to_table(parse_term(term_line, lat), lat, 2) == worked_function(lat)

    code, out, _ = run("decompose", files["chain3"], files["worked"], "--format", "json")
    doc = json.loads(out)
    assert list(doc) == ["lattice", "arity", "term", "joinands", "verified"]
    assert doc["verified"] is True and len(doc["joinands"]) == 7
    assert doc["joinands"][2] == {"a": ["a", "0"], "term": "chi[a](x1) /\\ (x1 (+)[0] x2)"}

    code, out, _ = run("decompose", files["chain2"], files["meet2"], "--format", "json")
    assert code == 0 and len(json.loads(out)["joinands"]) == 2

    code, out, _ = run("decompose", files["chain3"], files["worked"], "--dual")
    assert code == 0 and out.strip().endswith("verified") and "mu[" in out

    code, _, err = run("decompose", files["chain3"], files["nonmono"])
    assert code == 1 and err.startswith("NotAggregation")


def test_enumerate(files):
    assert run("fn", "enumerate", files["chain2"], "--arity", "2", "--count-only")[:2] == (0, "4\n")
    assert run("fn", "enumerate", files["chain3"], "--arity", "1", "--count-only")[:2] == (0, "3\n")
    code, out, _ = run("fn", "enumerate", files["chain3"], "--arity", "1")
    assert code == 0 and out.splitlines()[-1] == "# 3 aggregation function(s)"
    code, _, err = run("fn", "enumerate", files["boolean3"], "--arity", "2")
    assert code == 4 and err.startswith("SizeGuardExceeded")
    code, out, _ = run("fn", "enumerate", files["chain3"], "--arity", "2", "--count-only", "--dfs")
    assert (code, out) == (0, "136\n")


def test_sample_is_deterministic(files):
    a = run("fn", "sample", files["chain3"], "--arity", "2", "--seed", "9")
    b = run("fn", "sample", files["chain3"], "--arity", "2", "--seed", "9")
    assert a == b and a[0] == 0


def test_term_commands(files):
    code, out, _ = run("term", "eval", files["chain3"], "x1 (+)[a] x2", "--env", "1", "0")
    assert (code, out.strip()) == (0, "a")
    code, out, _ = run("term", "check", files["chain3"], "chi[a](x1) /\\ (x1 (+)[0] x2)", "--arity", "2")
    assert code == 0 and "aggregation: yes" in out
    code, out, _ = run("term", "eval", files["chain3"], "g(x1, x2)", "--env", "1", "a", "--ext", f"g={files['worked']}")
    assert (code, out.strip()) == (0, "1")
    code, _, err = run("term", "eval", files["chain3"], "x1 /\\", "--env", "0")
    assert code == 3 and "line 1" in err


def test_clone_close(files):
    code, out, _ = run("clone", "close", files["chain3"], "--basis", "theorem1", "--k-max", "2", "--compare-enumeration")
    assert code == 0 and "equals all aggregation functions: yes" in out
    code, out, _ = run("clone", "close", files["chain3"], "--basis", "unary", "--compare-enumeration")
    assert code == 1
    assert "equals all aggregation functions: no; missing example: (+)[a]" in out
    code, out, _ = run("clone", "close", files["chain2"], "--k-max", "3", "--format", "json")
    assert code == 0 and json.loads(out)["counts"] == {"1": 1, "2": 4, "3": 18}
    code, out, _ = run("clone", "close", files["chain3"], "--basis", f"custom:{files['oplus_a']}")
    assert code == 0 and "arity 2" in out
    code, _, _ = run("clone", "close", files["chain3"], "--max-tables", "20")
    assert code == 4


def test_clone_preserves_and_witness(files):
    code, out, _ = run("clone", "preserves", files["chain3"], files["oplus_a"], files["rel"])
    assert code == 1 and "(a,0)" in out
    code, out, _ = run("clone", "witness", files["chain3"])
    assert code == 0 and "columns (0,0), (1,0) give (a,0)" in out
    code, out, _ = run("clone", "witness", files["chain2"])
    assert code == 2 and out.startswith("LatticeTooSmall")


def test_median_demo():
    code, out, _ = run("median", "demo", "--r", "3")
    assert code == 0
    assert out.strip().endswith("all identities verified")
    code, out, _ = run("median", "demo", "--r", "2", "--format", "json")
    assert code == 0 and json.loads(out)["verified"] is True


def test_outputs_are_deterministic(files):
    for argv in (
        ("decompose", files["chain3"], files["worked"], "--format", "json"),
        ("clone", "close", files["chain3"], "--format", "json"),
    ):
        assert run(*argv) == run(*argv)
