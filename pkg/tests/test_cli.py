import json
from importlib.resources import files

import pytest

from recalc.cli import (
    SUITES,
    Caps,
    ConfigError,
    Report,
    RunConfig,
    explain,
    main,
    parse_qmode,
    parse_rmatrix,
    run,
)

CORPUS = sorted(p for p in files("recalc").joinpath("data/falsification").iterdir() if p.name.endswith(".json"))


def test_parse_rmatrix():
    assert parse_rmatrix("standard:3") == ("standard", (3,))
    assert parse_rmatrix("super:1,1") == ("super", (1, 1))
    assert parse_rmatrix("file:x.json") == ("file", ("x.json",))
    for bad in ("standard", "standard:0", "super:1", "nope:2", "file:"):
        with pytest.raises(ConfigError):
            parse_rmatrix(bad)


def test_parse_qmode_defaults_and_determinism():
    assert parse_qmode(None, 2) == [("exact", None, None)]
    pts = parse_qmode(None, 3)
    assert len(pts) == 3 and all(seed == 0 for _, _, seed in pts)
    assert parse_qmode("random:7,2", 2) == parse_qmode("random:7,2", 2)
    assert parse_qmode("specialized:3/4", 2)[0][1] == pytest.approx(0.75)
    for bad in ("specialized:x", "specialized:0", "random:1", "random:1,0", "complex"):
        with pytest.raises(ConfigError):
            parse_qmode(bad, 2)


def test_standard_symmetry_and_central_pass():
    rep = run(RunConfig(rmatrix="standard:2", qmode="exact", checks=["symmetry", "central"]))
    assert rep.ok and rep.exit_code == 0
    assert {c.status for c in rep.checks} == {"pass"}


def test_flip_degenerate_mode():
    rep = run(RunConfig(rmatrix="flip:2", qmode="specialized:1", checks=["symmetry"]))
    assert rep.ok
    skew = next(c for c in rep.checks if c.name == "skew-inverse")
    assert skew.detail["C"] == "identity"
    hecke = next(c for c in rep.checks if c.name == "hecke")
    assert hecke.status == "pass"


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_falsification_corpus_fails_symmetry(path):
    rep = run(RunConfig(rmatrix=f"file:{path}", checks=["symmetry"]))
    assert rep.exit_code == 1
    failed = [c for c in rep.checks if c.status == "fail"]
    assert failed and all("residual" in c.witness for c in failed)


def test_corpus_is_large_enough():
    assert len(CORPUS) >= 3


def test_pole_policy(tmp_path):
    data = {"N": 1, "entries": [{"row_pair": [1, 1], "col_pair": [1, 1], "value": "q + 1/(q - 1) - 1/(q - 1)"}]}
    ok = tmp_path / "ok.json"
    ok.write_text(json.dumps(data))
    assert run(RunConfig(rmatrix=f"file:{ok}", checks=["symmetry"])).ok
    data["entries"].append({"row_pair": [1, 1], "col_pair": [1, 1], "value": "1/(q - 1)"})
    bad = tmp_path / "pole.json"
    bad.write_text(json.dumps(data))
    warn = run(RunConfig(rmatrix=f"file:{bad}", checks=["symmetry"]))
    lim = next(c for c in warn.checks if c.name == "classical-limit")
    assert lim.status == "pass" and "pole" in lim.detail["warning"]
    err = run(RunConfig(rmatrix=f"file:{bad}", checks=["symmetry"], pole_policy="error"))
    assert next(c for c in err.checks if c.name == "classical-limit").status == "fail"
    with pytest.raises(ConfigError):
        run(RunConfig(rmatrix=f"file:{bad}", qmode="specialized:1", checks=["symmetry"]))


def test_guards_skip_with_reason():
    rep = run(RunConfig(rmatrix="standard:2", checks=["capelli"], caps=Caps(max_sites=3)))
    skipped = [c for c in rep.checks if c.status == "skipped"]
    assert skipped and all("site cap" in c.witness for c in skipped)
    assert rep.ok
    rep = run(RunConfig(rmatrix="standard:2", checks=["wick"], caps=Caps(max_m_degree=2, max_del_degree=2)))
    assert any("degree" in (c.witness or "") for c in rep.checks if c.status == "skipped")


def test_invalid_configs():
    with pytest.raises(ConfigError):
        run(RunConfig(checks=["nosuch"]))
    with pytest.raises(ConfigError):
        run(RunConfig(workers=0))
    with pytest.raises(ConfigError):
        run(RunConfig(caps=Caps(max_sites=10_000)))


def test_json_round_trip_and_determinism():
    cfg = RunConfig(rmatrix="standard:3", qmode="random:3,2", checks=["symmetry", "flatness"], workers=2, depth=1)
    a, b = run(cfg), run(cfg)
    assert [c.key() for c in a.checks] == [c.key() for c in b.checks]
    text = a.to_json()
    again = Report.from_json(text)
    assert again.to_json() == text
    assert Report.from_json(again.to_json()).to_dict() == again.to_dict()
    assert {c.seed for c in a.checks} == {3}


def test_explain():
    assert "J_(k+1)^-1" in explain("wick")
    assert "L_1 (L_2 - P_2)..(L_k - P_k)" in explain("capelli")
    for s in SUITES:
        assert explain(s)
    with pytest.raises(ConfigError) as err:
        explain("nosuch")
    assert "symmetry" in str(err.value)


def test_main_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "--rmatrix", "standard:2", "--checks", "symmetry", "--json-out", str(out)]) == 0
    rep = Report.from_json(out.read_text())
    assert rep.counts["pass"] == 5
    assert main(["run", "--rmatrix", f"file:{CORPUS[0]}", "--checks", "symmetry"]) == 1
    assert main(["run", "--rmatrix", "bogus:1"]) == 2
    assert main(["explain", "nosuch"]) == 2
    assert main(["explain", "capelli"]) == 0
    assert "Capelli" in capsys.readouterr().out
    assert main(["run", "--checks", "symmetry", "--output", "json"]) == 0
    assert '"summary"' in capsys.readouterr().out


def test_failures_do_not_abort_other_suites():
    rep = run(RunConfig(rmatrix=f"file:{CORPUS[0]}", checks=["symmetry", "central"]))
    suites = {c.suite for c in rep.checks}
    assert suites == {"symmetry", "central"}
