import math

import pytest

import subriemann as sr

PAPER_DENSITY = math.exp(2 ** (2 / 3))


def test_gallery_names():
    assert sr.gallery_names()[0] == "heisenberg"
    assert len(sr.gallery_names()) == 6


def test_unknown_entry():
    with pytest.raises(sr.PreconditionError):
        sr.Bundle("paper:cubic")


def test_heisenberg_loop_and_shoot():
    h = sr.Bundle("heisenberg")
    assert h.loop([0, 0, 0], 0.1)[2] == pytest.approx(0.01, rel=1e-8)
    r = h.shoot([0, 0, 0], 0.01)
    assert r["eps_tilde"] == pytest.approx(0.1, abs=1e-8)


def test_heisenberg_frame():
    h = sr.Bundle("heisenberg")
    assert h.field(1, [0.3, 0.0, 0.0]) == pytest.approx([0.0, 1.0, 0.3])
    assert h.flow(1, 0.2, [0.3, 0.0, 0.0]) == pytest.approx([0.3, 0.2, 0.06])
    assert h.density([0.1, 0.2, 0.3]) == pytest.approx(-1.0)


def test_paper_density():
    e = sr.Bundle("paper:sqrt")
    assert e.density([0, 0, 0]) == pytest.approx(PAPER_DENSITY, rel=1e-6)
    with pytest.raises(sr.DomainError):
        e.eta([-0.1, 0, 0])


def test_constants_and_fix():
    h = sr.Bundle("heisenberg")
    assert h.constants()["K1"] == pytest.approx(0.0213, rel=0.01)
    assert h.fix()["U"]["hi"] == pytest.approx([0.25, 0.25, 0.25])
    with pytest.raises(sr.DegenerateBundleError):
        sr.Bundle("exact:quadratic").fix()


def test_surface_bound():
    w = sr.Bundle("paper:log").surface(0.2, 11)
    assert w["graph_ok"] and w["bound_ok"]


def test_certify_exact_entry():
    c = sr.Bundle("exact:flat").certify(chains=5, refinements=1)
    assert c["exact"] and c["certified"]


def test_prop22_pairs():
    reports = sr.Bundle("heisenberg").prop22(pairs=3)
    assert len(reports) == 3
    assert all(r["pass"] for r in reports)


def test_box_membership():
    assert sr.box_membership("box", 2.0, 0.1, point=[0.05, 0.05, 0.02])
    m = sr.box_membership("hourglass", 1.0, 0.1, point=[0.0, 0.0, 0.02])
    assert not m.member and m.margin < 0
