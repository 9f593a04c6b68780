"""
q-families: indexing, degree profiles, family files and the registry
"""
import json
from fractions import Fraction

import pytest

from src.numerics import ExactComplex, Finite, chordal_distance
from src.qcf import (
    GENERAL,
    UNIT_DENOMINATOR,
    DegreeProfile,
    DegreeViolation,
    FamilyFormatError,
    QFamily,
    UnknownFamilyError,
    degree_profile,
    family_from_dict,
    family_to_dict,
    instantiate,
    load_family,
    registry_lookup,
    registry_names,
    rogers_ramanujan_value,
)
from src.qpolynomial import PolynomialSyntaxError


def _coefficients(cf, depth):
    return [(pq.a, pq.b) for pq in cf.partial_quotients(depth)]


def test_rogers_ramanujan_indexing():
    cf = instantiate(registry_lookup("rogers-ramanujan"), 2)
    assert cf.b0 == 1
    assert _coefficients(cf, 4) == [(2, 1), (4, 1), (8, 1), (16, 1)]


def test_selberg_s1_indexing():
    """a_(2n+1) = q^(2n+1), a_(2n+2) = q^(2n+2) + q^(n+1) at q = 2"""
    cf = instantiate(registry_lookup("S1"), 2)
    assert [pq.a for pq in cf.partial_quotients(4)] == [2, 6, 8, 20]


def test_general_form_indexing():
    family = registry_lookup("GG")
    cf = instantiate(family, 2)
    # b_0 = g_0(1) = 1 + q, b_n = q^(2n+1) + 1, a_n = q^(2n)
    assert cf.b0 == 3
    assert _coefficients(cf, 3) == [(4, 9), (16, 33), (64, 129)]


def _selberg_s2(index, q):
    n, s = divmod(index - 1, 2)
    return q ** (2 * n + 1) + q ** (4 * n + 2) if s == 0 else q ** (4 * n + 4)


def _selberg_s3(index, q):
    return q ** index + q ** (2 * index)


def _g1(index, q):
    n, s = divmod(index - 1, 4)
    return [
        q ** (4 * n + 1) + 3 * q ** (3 * n + 1) + 2 * q ** (2 * n + 1),
        q ** (4 * n + 2) + 2 * q ** (3 * n + 2) + 7 * q ** (2 * n + 1),
        q ** (4 * n + 3) + 5 * q ** (3 * n + 2) + 2 * q ** (2 * n + 3),
        q ** (4 * n + 4) + 7 * q ** (3 * n + 3) + 3 * q ** (2 * n + 1) + 2 * q ** n,
    ][s]


def _g2_numerator(index, q):
    n, s = divmod(index - 1, 4)
    return [
        q ** (12 * n + 3) + 3 * q ** (6 * n + 2) + 2 * q ** (4 * n + 2),
        q ** (12 * n + 6) + 2 * q ** (6 * n + 4) + 7 * q ** (4 * n + 2),
        q ** (12 * n + 9) + 5 * q ** (6 * n + 4) + 2 * q ** (4 * n + 6),
        q ** (12 * n + 12) + 7 * q ** (6 * n + 6) + 3 * q ** (4 * n + 2) + 2 * q ** (2 * n),
    ][s]


def _g2_denominator(index, q):
    n, s = divmod(index - 1, 4)
    return [
        q ** (4 * n + 2) + q ** (2 * n) + 1,
        q ** (4 * n + 3) + q ** (2 * n) + 1,
        q ** (4 * n + 4) + q ** (3 * n) + 1,
        q ** (4 * n + 5) + q ** (n + 1) + 1,
    ][s]


DISPLAY_QS = [ExactComplex(3), ExactComplex(-2, 1), ExactComplex(Fraction(3, 2), Fraction(-1, 2))]


@pytest.mark.parametrize("q", DISPLAY_QS)
@pytest.mark.parametrize("name, numerator", [("S2", _selberg_s2), ("S3", _selberg_s3), ("G1", _g1)])
def test_unit_denominator_families_match_general_terms(name, numerator, q):
    cf = instantiate(registry_lookup(name), q)
    assert cf.b0 == 1
    for index in range(1, 51):
        assert cf.coefficient(index).a == numerator(index, q)
        assert cf.coefficient(index).b == 1


@pytest.mark.parametrize("q", DISPLAY_QS)
def test_g2_matches_general_terms(q):
    cf = instantiate(registry_lookup("G2"), q)
    assert cf.b0 == q + 2
    for index in range(1, 51):
        pq = cf.coefficient(index)
        assert pq.a == _g2_numerator(index, q)
        assert pq.b == _g2_denominator(index, q)


def test_first_printed_quotients_at_two():
    q = ExactComplex(2)
    s2 = instantiate(registry_lookup("S2"), q)
    assert [pq.a for pq in s2.partial_quotients(4)] == [2 + 4, 16, 8 + 64, 256]
    g1 = instantiate(registry_lookup("G1"), q)
    # 6q, 3q^2 + 7q, 3q^3 + 5q^2, q^4 + 7q^3 + 3q + 2
    assert [pq.a for pq in g1.partial_quotients(4)] == [12, 26, 44, 80]
    g2 = instantiate(registry_lookup("G2"), q)
    # (q^3 + 5q^2)/(q^2 + 2), (q^6 + 2q^4 + 7q^2)/(q^3 + 2)
    assert [(pq.a, pq.b) for pq in g2.partial_quotients(2)] == [(28, 6), (124, 10)]


@pytest.mark.parametrize("q", [ExactComplex(Fraction(3, 2)), ExactComplex(0, 2), ExactComplex(-3)])
@pytest.mark.parametrize("name", ["rogers-ramanujan", "selberg-S1", "selberg-S2", "selberg-S3", "example3-G1"])
def test_numerator_ratio_approaches_degree_power(name, q):
    """|a_(2i+1)/a_2i| / |q|^(d_(2i+1) - d_2i) -> 1 with d_j the q-degree of a_j"""
    family = registry_lookup(name)
    cf = instantiate(family, q)

    def degree(index):
        n, s = divmod(index - 1, family.k)
        return family.f[s].degree_q_at(n)

    for i in (100, 150, 200):
        odd, even = cf.coefficient(2 * i + 1).a, cf.coefficient(2 * i).a
        scaled = odd.abs_sq() / even.abs_sq() / q.abs_sq() ** (degree(2 * i + 1) - degree(2 * i))
        assert abs(scaled - 1) < Fraction(1, 10 ** 6)


@pytest.mark.parametrize("name, C3", [
    ("rogers-ramanujan", 1),
    ("selberg-S1", 1),
    ("selberg-S2", 2),
    ("selberg-S3", 2),
    ("example3-G1", 1),
])
def test_unit_denominator_profiles(name, C3):
    profile = degree_profile(registry_lookup(name))
    assert isinstance(profile, DegreeProfile)
    assert profile.form == UNIT_DENOMINATOR
    assert profile.C3 == C3
    assert profile.L_a == 1


def test_g1_leading_coefficient_settles_late():
    profile = degree_profile(registry_lookup("G1"))
    assert profile.leading_stable_from == {"a": 4}


def test_general_profiles():
    gg = degree_profile(registry_lookup("goellnitz-gordon"))
    assert (gg.a, gg.b, gg.r1, gg.r2) == (2, 2, 2, 1)
    g2 = degree_profile(registry_lookup("example4-G2"))
    assert (g2.a, g2.b, g2.r1, g2.r2, g2.L_a, g2.L_b) == (3, 1, 3, 1, 1, 1)
    assert g2.to_dict()["form"] == GENERAL


def test_unequal_leading_coefficients_are_reported():
    family = family_from_dict({"name": "bad", "form": UNIT_DENOMINATOR, "k": 2, "f": ["x", "2*q*x"]})
    violation = degree_profile(family)
    assert isinstance(violation, DegreeViolation)
    assert (violation.first_index, violation.second_index) == (1, 2)
    assert violation.to_dict()["indices"] == [1, 2]


def test_unequal_degree_steps_are_reported():
    family = family_from_dict({"name": "bad", "form": UNIT_DENOMINATOR, "k": 2, "f": ["x^2", "q*x"]})
    assert isinstance(degree_profile(family), DegreeViolation)


def test_family_dict_round_trip():
    for name in ("K", "GG", "G1", "G2"):
        family = registry_lookup(name)
        assert family_from_dict(family_to_dict(family)) == family


def test_load_family_file(tmp_path, family_path):
    family = load_family(family_path("goellnitz-gordon"))
    assert family == registry_lookup("GG")

    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(FamilyFormatError):
        load_family(broken)
    with pytest.raises(FamilyFormatError):
        load_family(tmp_path / "missing.json")

    bad_poly = tmp_path / "bad_poly.json"
    bad_poly.write_text(json.dumps({"name": "p", "form": UNIT_DENOMINATOR, "k": 1, "f": ["q*x +"]}),
                        encoding="utf-8")
    with pytest.raises(PolynomialSyntaxError):
        load_family(bad_poly)


def test_family_validation():
    with pytest.raises(FamilyFormatError):
        family_from_dict({"name": "short", "form": UNIT_DENOMINATOR, "k": 2, "f": ["x"]})
    with pytest.raises(FamilyFormatError):
        family_from_dict({"name": "b0", "form": GENERAL, "k": 1, "f": ["x"], "g": ["q*x + 1"], "b0": "1"})
    with pytest.raises(FamilyFormatError):
        family_from_dict({"name": "form", "form": "other", "k": 1, "f": ["x"]})
    with pytest.raises(FamilyFormatError):
        family_from_dict({"form": UNIT_DENOMINATOR, "k": 1, "f": ["x"]})


def test_general_family_derives_b0():
    family = family_from_dict({"name": "syn", "form": GENERAL, "k": 1, "f": ["x^2"], "g": ["x"]})
    assert str(family.b0) == "1"


def test_registry():
    assert registry_lookup("G").name == "example2-G"
    assert isinstance(registry_lookup("K"), QFamily)
    assert "example2-G" in registry_names()
    with pytest.raises(UnknownFamilyError):
        registry_lookup("no-such-family")


def test_rogers_ramanujan_oracle():
    value = rogers_ramanujan_value(ExactComplex(-1, 2) / 5, bits=256)
    shallow = rogers_ramanujan_value(ExactComplex(-1, 2) / 5, depth=400, bits=256)
    assert chordal_distance(value, shallow) < 1e-70
    assert rogers_ramanujan_value(0) == Finite(1).value
    with pytest.raises(ValueError):
        rogers_ramanujan_value(2)
