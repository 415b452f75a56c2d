"""Material records, registry, and derived length scales."""

import pytest

from crossmag.errors import InvalidArgumentError, NotFoundError
from crossmag.materials import (Material, builtin_names, exchange_length,
                                get_material, register_material)


def test_builtin_parameters():
    co = get_material("Co")
    assert (co.Ms, co.A, co.P, co.alpha) == (1400e3, 30e-12, 0.40, 0.010)
    cms = get_material("CMS")
    assert (cms.Ms, cms.A, cms.P, cms.alpha) == (800e3, 2.35e-12, 0.56, 0.008)
    cfas = get_material("CFAS")
    assert (cfas.Ms, cfas.A, cfas.P, cfas.alpha) == (900e3, 2.0e-11, 0.76, 0.010)


def test_lookup_case_insensitive():
    assert get_material("cfas") is get_material("CFAS")


def test_unknown_material_lists_names():
    with pytest.raises(NotFoundError) as err:
        get_material("XYZ")
    msg = str(err.value)
    for name in ("Co", "CMS", "CFAS"):
        assert name in msg


def test_builtin_names_order():
    assert builtin_names() == ["Co", "CMS", "CFAS"]


def test_validation():
    with pytest.raises(InvalidArgumentError):
        Material(name="bad", Ms=-1.0, A=1e-12, P=0.5, alpha=0.01)
    with pytest.raises(InvalidArgumentError):
        Material(name="bad", Ms=8e5, A=0.0, P=0.5, alpha=0.01)
    with pytest.raises(InvalidArgumentError):
        Material(name="bad", Ms=8e5, A=1e-12, P=1.5, alpha=0.01)
    with pytest.raises(InvalidArgumentError):
        Material(name="bad", Ms=8e5, A=1e-12, P=0.5, alpha=1.0)


def test_zero_damping_allowed():
    mat = Material(name="lossless", Ms=8e5, A=1e-12, P=0.5, alpha=0.0)
    assert mat.alpha == 0.0


def test_register_custom_and_protect_builtins():
    mat = Material(name="Permalloy", Ms=860e3, A=13e-12, P=0.4, alpha=0.008)
    register_material(mat)
    assert get_material("permalloy") is mat
    clone = Material(name="Co", Ms=1.0, A=1.0e-12, P=0.5, alpha=0.1)
    with pytest.raises(InvalidArgumentError):
        register_material(clone)


def test_exchange_lengths():
    # l_ex = sqrt(2A / (mu0 Ms^2))
    assert exchange_length(get_material("Co")) == pytest.approx(
        4.935630706733364e-09, rel=1e-12)
    assert exchange_length(get_material("CMS")) == pytest.approx(
        2.4174305712172027e-09, rel=1e-12)
    assert exchange_length(get_material("CFAS")) == pytest.approx(
        6.268773150530625e-09, rel=1e-12)
