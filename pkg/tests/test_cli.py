import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chshlab.algebra import BellState, BipartiteVector, bell_vector
from chshlab.cli import (
    CONFIG_ERROR,
    FIELD_TYPES,
    FIELDS,
    INVARIANT_FAILURE,
    OK,
    ConfigError,
    ExperimentConfig,
    emit_records,
    load_config,
    main,
    parse_config_text,
    parse_records,
    run_chsh,
)

TSIRELSON = 2 * math.sqrt(2)


def run(argv, **kw):
    out = io.StringIO()
    code = main(argv, stdout=out, **kw)
    return code, out.getvalue()


def records(argv):
    code, text = run(argv)
    assert code == OK
    return parse_records(text, "jsonl")


def test_qm_optimize():
    (r,) = records(["chsh", "--model", "qm", "--state", "PsiMinus", "--settings", "optimize"])
    assert r["S"] == pytest.approx(TSIRELSON, abs=1e-6)
    assert r["S"] == pytest.approx(r["E_ab"] + r["E_abp"] + r["E_apb"] - r["E_apbp"], abs=0)


def test_lhv_sign_model_optimize():
    (r,) = records(["chsh", "--model", "lhv", "--strategy", "sign"])
    assert r["S"] == pytest.approx(2.0, abs=1e-3)


def test_werner_optimize():
    (r,) = records(["chsh", "--model", "werner", "--lambda-mix", "0.6", "--state", "phi+"])
    assert r["S"] == pytest.approx(0.6 * TSIRELSON, abs=1e-5)
    assert r["state"] == "PhiPlus"


def test_explicit_settings_degrees():
    # a = z, a' = x, b = (z+x)/sqrt2, b' = (z-x)/sqrt2 as (theta, phi) pairs
    (r,) = records(["chsh", "--model", "qm", "--state", "PhiPlus", "--settings", "0,0,90,0,45,0,45,180"])
    assert r["S"] == pytest.approx(TSIRELSON, abs=1e-12)
    assert r["restarts"] is None
    assert [r["a_theta"], r["b_theta"]] == pytest.approx([0.0, 45.0])


def test_sampled_record_has_counts():
    (r,) = records(["chsh", "--model", "qm", "--settings", "standard", "--events", "20000", "--seed", "4"])
    counts = [r[f] for f in FIELDS if f.startswith("n_")]
    assert all(isinstance(c, int) for c in counts)
    assert sum(counts) == 4 * 20000
    assert abs(r["S"] - r["S_exact"]) < 5 * r["stderr"]
    assert r["seed"] == 4 and r["events"] == 20000


def test_random_strategy_needs_explicit_settings():
    code, _ = run(["chsh", "--model", "lhv", "--strategy", "random-factorized"])
    assert code == CONFIG_ERROR
    (r,) = records(["chsh", "--model", "lhv", "--strategy", "random-factorized", "--settings", "standard", "--seed", "9"])
    assert abs(r["S"]) <= 2.0


@pytest.mark.parametrize(
    "argv",
    [
        ["chsh", "--model", "nope"],
        ["chsh", "--sigma", "-1", "--model", "model1"],
        ["chsh", "--sigma", "0"],
        ["chsh", "--lambda-mix", "2"],
        ["chsh", "--events", "0"],
        ["chsh", "--events", "1.5"],
        ["chsh", "--settings", "1,2,3"],
        ["chsh", "--state", "GHZ"],
        ["chsh", "--out", "x.csv", "--format", "jsonl"],
        ["chsh", "--out", "x.txt"],
        ["scan", "--param", "lambda_mix", "--start", "0"],
        ["scan", "--param", "lambda_mix", "--start", "0", "--stop", "1", "--points", "1"],
        ["scan", "--param", "sigma", "--start", "-1", "--stop", "1", "--model", "model3"],
        ["scan", "--param", "events", "--start", "0", "--stop", "10", "--log"],
        ["bogus"],
    ],
)
def test_config_errors_exit_2(argv, capsys):
    code, out = run(argv)
    assert code == CONFIG_ERROR
    assert out == ""


def test_config_file_line_diagnostics(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# experiment\nmodel = werner\n\nlambda_mix = 1.5\n")
    with pytest.raises(ConfigError, match=r"run.cfg:4: field 'lambda_mix'"):
        load_config(str(p))
    p.write_text("model = qm\ncolour = blue\n")
    with pytest.raises(ConfigError, match=r"run.cfg:2: unknown key 'colour'"):
        load_config(str(p))
    p.write_text("model qm\n")
    with pytest.raises(ConfigError, match=r"run.cfg:1: expected 'key = value'"):
        load_config(str(p))
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.cfg"))


def test_config_file_and_overrides(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("model = werner  # mixture\nlambda_mix = 0.5\nstate = PsiPlus\nsettings = standard\n")
    cfg = load_config(str(p), {"lambda_mix": "0.25", "seed": None})
    assert cfg == ExperimentConfig(model="werner", lambda_mix=0.25, state="PsiPlus", settings="standard")
    code, text = run(["chsh", "--config", str(p), "--lambda-mix", "0.25"])
    assert code == OK and parse_records(text, "jsonl")[0]["lambda_mix"] == 0.25


def test_parse_config_text_types():
    v = parse_config_text("events = 100\nlog = yes\nsettings = 0 0 90 0 45 0 135 0\n")
    assert v == {"events": 100, "log": True, "settings": (0.0, 0.0, 90.0, 0.0, 45.0, 0.0, 135.0, 0.0)}


@pytest.mark.parametrize("ext", ["jsonl", "csv"])
def test_identical_config_gives_identical_bytes(tmp_path, ext):
    args = ["scan", "--model", "werner", "--param", "events", "--start", "100", "--stop", "10000", "--points", "3", "--log"]
    a, b = tmp_path / f"a.{ext}", tmp_path / f"b.{ext}"
    assert main(args + ["--out", str(a)]) == OK
    assert main(args + ["--out", str(b)]) == OK
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != b""
    c = tmp_path / f"c.{ext}"
    main(args + ["--out", str(c), "--seed", "1"])
    assert c.read_bytes() != a.read_bytes()


@pytest.mark.parametrize("fmt", ["jsonl", "csv"])
def test_emitted_records_round_trip(fmt):
    recs = [
        run_chsh(ExperimentConfig(model="model3", state="PhiMinus", settings="standard", events=500, seed=3)),
        run_chsh(ExperimentConfig(model="lhv", settings="standard")),
    ]
    text = emit_records(recs, fmt)
    back = parse_records(text, fmt)
    assert back == recs
    assert emit_records(back, fmt) == text


def _value(t):
    if t is float:
        return st.floats(allow_nan=False, allow_infinity=False)
    if t is int:
        return st.integers(-(2**62), 2**62)
    return st.text(alphabet=st.characters(codec="utf-8", exclude_categories=["Cs", "Cc"]), max_size=12)


record_strategy = st.fixed_dictionaries({k: st.one_of(st.none(), _value(t)) for k, t in FIELD_TYPES.items()})


@given(record_strategy, st.sampled_from(["jsonl", "csv"]))
@settings(max_examples=200, deadline=None)
def test_round_trip_is_fixed_point(rec, fmt):
    if fmt == "csv":
        # an empty cell stands for a missing value
        rec = {k: (None if v == "" else v) for k, v in rec.items()}
    text = emit_records([rec], fmt)
    assert parse_records(text, fmt) == [rec]
    assert emit_records(parse_records(text, fmt), fmt) == text


def test_csv_header_checked():
    with pytest.raises(ValueError):
        parse_records("a,b\n1,2\n", "csv")


def test_werner_scan_linear_and_crossing():
    recs = records(["scan", "--model", "werner", "--state", "PhiPlus", "--param", "lambda_mix", "--start", "0", "--stop", "1", "--points", "21"])
    lam = np.array([r["lambda_mix"] for r in recs])
    s = np.array([r["S"] for r in recs])
    assert len(recs) == 21
    np.testing.assert_allclose(s, lam * TSIRELSON, atol=1e-5)
    k = int(np.argmax(s >= 2.0))
    cross = lam[k - 1] + (2.0 - s[k - 1]) * (lam[k] - lam[k - 1]) / (s[k] - s[k - 1])
    assert cross == pytest.approx(1 / math.sqrt(2), abs=1e-3)


def test_event_count_scan_error_trend():
    recs = records(["scan", "--model", "qm", "--settings", "standard", "--param", "events", "--start", "100", "--stop", "1000000", "--points", "5", "--log"])
    n = np.array([r["events"] for r in recs])
    assert n.tolist() == [100, 1000, 10000, 100000, 1000000]
    stderr = np.array([r["stderr"] for r in recs])
    np.testing.assert_allclose(stderr * np.sqrt(n), stderr[-1] * math.sqrt(n[-1]), rtol=0.3)
    dev = np.array([abs(r["S"] - r["S_exact"]) for r in recs])
    assert np.all(dev < 5 * stderr)


def test_model1_eps_scan_converges():
    recs = records(["scan", "--model", "model1", "--settings", "standard", "--param", "eps", "--start", "0.01", "--stop", "0.0001", "--points", "3", "--log"])
    gap = [abs(r["prefactor_ratio"] - 1.0) for r in recs]
    assert gap[0] > gap[1] > gap[2]
    assert gap[2] < 1e-6
    for r in recs:
        assert abs(r["S"]) == pytest.approx(TSIRELSON, abs=1e-12)


def test_verify_passes():
    code, text = run(["verify"])
    assert code == OK
    lines = text.strip().splitlines()
    assert all(" PASS " in l + " " for l in lines)
    for suite in ("born_equivalence", "bell_orthonormality", "requirement_sweep", "no_signaling", "lhv_bound", "correlation_equivalence"):
        (line,) = [l for l in lines if l.startswith(suite)]
        assert float(line.split("max_violation=")[1].split()[0]) < 1e-9


def test_verify_catches_sign_flip():
    def flipped(state):
        v = bell_vector(state)
        if BellState.parse(state) is BellState.PhiPlus:
            c = v.c.copy()
            c[2, 2] *= -1
            return BipartiteVector(c)
        return v

    code, text = run(["verify", "--only", "bell_orthonormality", "born_equivalence"], bell_vector_fn=flipped)
    assert code == INVARIANT_FAILURE
    assert "bell_orthonormality      FAIL" in text
    assert "born_equivalence         PASS" in text


def test_verify_unknown_suite():
    assert run(["verify", "--only", "nonsense"])[0] == CONFIG_ERROR


def test_models_listing():
    code, text = run(["models"])
    assert code == OK
    for name in ("qm", "gudder", "werner", "lhv", "model1", "model3", "lambda_mix", "sigma", "PsiMinus"):
        assert name in text


def test_output_to_csv_file(tmp_path):
    p = tmp_path / "o.csv"
    code, text = run(["chsh", "--model", "gudder", "--settings", "standard", "--out", str(p)])
    assert code == OK and text == ""
    (r,) = parse_records(p.read_text(), "csv")
    assert abs(r["S"]) == pytest.approx(TSIRELSON, abs=1e-12)


def test_invariant_failure_exit_code(monkeypatch):
    import chshlab.cli as cli

    monkeypatch.setattr(cli, "LHV_CEILING", 1.0)
    assert run(["chsh", "--model", "lhv", "--settings", "standard"])[0] == INVARIANT_FAILURE
