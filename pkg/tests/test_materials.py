import json
import math
import re

import pytest
from hypothesis import given, strategies as st

from phononic_casimir.materials import (
    CONDUCTOR, TABLE_SPEEDS, ElasticMaterial, MaterialDB, MaterialError, MissingC11Error,
    builtin_table, default_db, load_materials, material_to_record, parse_materials, sound_speeds,
)

# BN_hex and BN_w moduli are a factor ~10 below their tabulated speeds
CONSISTENT = ["Ge", "Si", "Diamond", "BN_cub", "In"]


def test_ge_c11_speeds(db):
    s = sound_speeds(db["Ge"], "c11")
    assert s.c_l == pytest.approx(4865.27, rel=1e-4)
    assert s.c_t == pytest.approx(3539.85, rel=1e-4)
    assert s.mode == "c11"


def test_si_lame_speed(db):
    assert sound_speeds(db["Si"], "lame").c_l == pytest.approx(math.sqrt(223.2e9 / 2329), rel=1e-12)


@pytest.mark.parametrize("name", CONSISTENT)
def test_table_speed_columns(db, name):
    s = sound_speeds(db[name], "c11")
    c_l, c_t = TABLE_SPEEDS[name]
    assert s.c_l == pytest.approx(c_l, rel=1e-3)
    assert s.c_t == pytest.approx(c_t, rel=1e-3)


@pytest.mark.parametrize("name", ["BN_hex", "BN_w"])
@pytest.mark.xfail(strict=True, reason="tabulated moduli and speeds disagree by sqrt(10)")
def test_table_speed_columns_bn(db, name):
    s = sound_speeds(db[name], "c11")
    c_l, c_t = TABLE_SPEEDS[name]
    assert s.c_l == pytest.approx(c_l, rel=1e-3)
    assert s.c_t == pytest.approx(c_t, rel=1e-3)


def test_builtin_table_contents():
    mats = builtin_table()
    assert [m.name for m in mats] == ["Ge", "Si", "Diamond", "BN_cub", "BN_hex", "BN_w", "In"]
    dia = mats[2]
    assert (dia.rho, dia.lam, dia.mu, dia.c11, dia.eps0) == (3514.0, 124e9, 578e9, 1070e9, 5.7)
    assert mats[-1].eps0 == CONDUCTOR and mats[-1].is_conductor


@given(mu=st.floats(1e6, 1e13), rho=st.floats(10.0, 3e4))
def test_equal_lame_gives_sqrt3(mu, rho):
    s = sound_speeds(ElasticMaterial("x", rho, mu, mu), "lame")
    assert s.c_l / s.c_t == pytest.approx(math.sqrt(3), rel=1e-14)


@given(lam=st.floats(-0.6e11, 1e12), mu=st.floats(1e8, 1e12), rho=st.floats(10.0, 3e4))
def test_lame_longitudinal_exceeds_transverse(lam, mu, rho):
    if lam + 2 * mu <= mu:
        return
    s = sound_speeds(ElasticMaterial("x", rho, lam, mu), "lame")
    assert s.c_l > s.c_t > 0


def test_speeds_are_pure(db):
    a = sound_speeds(db["Si"], "c11")
    b = sound_speeds(db["Si"], "c11")
    assert a == b


@pytest.mark.parametrize("kwargs, fragment", [
    (dict(rho=0.0, lam=1e9, mu=1e9), "rho > 0"),
    (dict(rho=1.0, lam=1e9, mu=0.0), "mu > 0"),
    (dict(rho=1.0, lam=-3e9, mu=1e9), "lambda + 2 mu"),
    (dict(rho=1.0, lam=1e9, mu=1e9, c11=-1.0), "c11 > 0"),
    (dict(rho=1.0, lam=1e9, mu=1e9, eps0=0.5), "eps0 >= 1"),
])
def test_invariants_rejected(kwargs, fragment):
    with pytest.raises(MaterialError, match=re.escape(fragment)):
        ElasticMaterial("bad", **kwargs)


def test_missing_c11():
    m = ElasticMaterial("x", 1000.0, 1e9, 1e9)
    with pytest.raises(MissingC11Error):
        sound_speeds(m, "c11")
    sound_speeds(m, "lame")


def test_unknown_mode(db):
    with pytest.raises(ValueError):
        sound_speeds(db["Ge"], "voigt")


def _write(tmp_path, records):
    p = tmp_path / "mats.json"
    p.write_text(json.dumps(records), encoding="utf-8")
    return p


def test_load_copy_of_ge(tmp_path, db):
    rec = material_to_record(db["Ge"])
    rec["name"] = "GeCopy"
    mats = load_materials(_write(tmp_path, [rec]))
    assert sound_speeds(mats[0], "c11") == sound_speeds(db["Ge"], "c11")
    assert sound_speeds(mats[0], "lame") == sound_speeds(db["Ge"], "lame")


def test_load_zero_mu_rejected(tmp_path):
    rec = {"name": "Water", "rho_kg_m3": 1000, "lambda_GPa": 2.2, "mu_GPa": 0}
    with pytest.raises(MaterialError, match="fluids"):
        load_materials(_write(tmp_path, [rec]))


def test_load_without_c11(tmp_path):
    rec = {"name": "Soft", "rho_kg_m3": 1000, "lambda_GPa": 2.0, "mu_GPa": 1.0}
    (mat,) = load_materials(_write(tmp_path, [rec]))
    assert mat.c11 is None and mat.eps0 == 1.0
    with pytest.raises(MissingC11Error):
        sound_speeds(mat, "c11")


def test_conductor_string(tmp_path):
    rec = {"name": "Metal", "rho_kg_m3": 7000, "lambda_GPa": 40, "mu_GPa": 7, "eps0": "inf"}
    (mat,) = load_materials(_write(tmp_path, [rec]))
    assert mat.is_conductor
    assert material_to_record(mat)["eps0"] == "inf"


def test_duplicates_rejected(tmp_path):
    rec = {"name": "A", "rho_kg_m3": 1000, "lambda_GPa": 2.0, "mu_GPa": 1.0}
    with pytest.raises(MaterialError, match="duplicate"):
        load_materials(_write(tmp_path, [rec, rec]))


def test_parse_error_has_position():
    with pytest.raises(MaterialError, match=r"f.json:2:\d+: parse error"):
        parse_materials('[\n{"name": }]', "f.json")


def test_every_bad_record_reported():
    text = json.dumps([
        {"name": "A", "rho_kg_m3": 1000, "lambda_GPa": 2.0},
        {"name": "B", "rho_kg_m3": -1, "lambda_GPa": 2.0, "mu_GPa": 1.0},
        {"name": "C", "rho_kg_m3": 1, "lambda_GPa": 2.0, "mu_GPa": 1.0, "colour": "red"},
    ])
    with pytest.raises(MaterialError) as info:
        parse_materials(text)
    msg = str(info.value)
    assert "record 0" in msg and "mu_GPa" in msg
    assert "record 1 (B)" in msg and "rho > 0" in msg
    assert "record 2" in msg and "colour" in msg


def test_file_overrides_builtin(tmp_path):
    rec = {"name": "Ge", "rho_kg_m3": 5000, "lambda_GPa": 44, "mu_GPa": 66.7, "c11_GPa": 126}
    db = default_db(_write(tmp_path, [rec]))
    assert db["Ge"].rho == 5000 and len(db) == 7


def test_db_unknown_name_lists_known():
    db = MaterialDB(builtin_table())
    with pytest.raises(KeyError, match="Diamond"):
        db["Nope"]
