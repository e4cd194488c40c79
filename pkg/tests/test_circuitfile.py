import math
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fockoptics.circuit import Block, Circuit, simulate
from fockoptics.circuitfile import (
    CircuitParseError,
    canonical,
    format_angle,
    parse,
    parse_angle,
    parse_document,
    serialize,
)
from fockoptics.experiments import blocked_variant, build_fig1, build_fig2
from fockoptics.optics import ProbeSpec

SHIPPED = sorted(p.name for p in resources.files("fockoptics").joinpath("circuits").iterdir()
                 if p.name.endswith(".circ"))


def shipped(name):
    return resources.files("fockoptics").joinpath("circuits", name).read_text(encoding="utf-8")


def diagnostics(text):
    with pytest.raises(CircuitParseError) as info:
        parse(text)
    return info.value.diagnostics


def test_fig1_document_matches_builder():
    c = parse(shipped("fig1.circ"))
    assert c == build_fig1(0.0)
    np.testing.assert_array_equal(simulate(c).to_dense(), simulate(build_fig1(0.0)).to_dense())


def test_fig2_document_matches_builder():
    c = parse(shipped("fig2.circ"))
    assert c == build_fig2(math.pi / 2, ProbeSpec.from_alpha(0.1))


def test_blocked_document_matches_builder():
    assert parse(shipped("fig2_block_c.circ")) == blocked_variant(build_fig2(math.pi / 2), "c")


def test_empty_input():
    c = parse("")
    assert c == Circuit((), ())
    assert parse("# only a comment\n\n") == Circuit((), ())


def test_duplicate_mode_in_splitter():
    (d,) = diagnostics("mode a\nmode b\nbs a a\n")
    assert d.line == 3 and "twice" in d.message


@pytest.mark.parametrize("text, line, fragment", [
    ("mode a\nfrobnicate a\n", 2, "unknown directive"),
    ("mode a\nmode a\n", 2, "duplicate mode"),
    ("mode a\nbs a z\n", 2, "undeclared mode 'z'"),
    ("mode q\nsource q probe alpha=1.5\n", 2, "outside [0, 1]"),
    ("mode q\nsource q probe alpha=-0.1\n", 2, "outside [0, 1]"),
    ("mode q\nsource q probe alpha=nan\n", 2, "outside [0, 1]"),
    ("mode q\nsource q probe beta=0.1\n", 2, "alpha="),
    ("mode q\nsource q boson\n", 2, "expected"),
    ("mode a\nphase a pi/0\n", 2, "bad angle"),
    ("mode a\nphase a soon\n", 2, "bad angle"),
    ("mode a\nphase a\n", 2, "expected"),
    ("mode 1a\n", 1, "invalid mode name"),
    ("mode a\nsource a fermion\nsource a fermion\n", 3, "second source"),
    ("mode a\nmode c\ndetect a A\nbs a c\n", 4, "after a detector"),
    ("mode a\nmode c\ndetect a X\ndetect c X\n", 4, "duplicate detector label"),
])
def test_line_numbered_diagnostics(text, line, fragment):
    diags = diagnostics(text)
    assert any(d.line == line and fragment in d.message for d in diags), diags


def test_all_problems_reported():
    diags = diagnostics("mode a\nwhat\nbs a z\nmode a\n")
    assert [d.line for d in diags] == [2, 3, 4]


def test_crlf_and_bom_accepted():
    text = "﻿mode a\r\nsource a fermion\r\n"
    assert parse(text) == parse("mode a\nsource a fermion\n")


@pytest.mark.parametrize("token, value", [
    ("0", 0.0), ("1.25", 1.25), ("-0.5", -0.5), ("pi", math.pi), ("pi/4", math.pi / 4),
    ("-pi/2", -math.pi / 2), ("3pi/2", 3 * math.pi / 2), ("2*pi/3", 2 * math.pi / 3), ("0.5pi", 0.5 * math.pi),
])
def test_parse_angle(token, value):
    assert parse_angle(token) == pytest.approx(value, abs=0)


@pytest.mark.parametrize("phi", [0.0, math.pi, math.pi / 4, -math.pi / 2, 3 * math.pi / 2, 2 * math.pi / 3, 0.1, 1e-9])
def test_format_angle_round_trips_bitwise(phi):
    assert parse_angle(format_angle(phi)) == phi


def test_format_angle_prefers_pi_fractions():
    assert format_angle(math.pi / 4) == "pi/4"
    assert format_angle(-3 * math.pi / 2) == "-3pi/2"
    assert format_angle(0.25) == "0.25"


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_documents_are_canonical_fixed_points(name):
    text = shipped(name)
    once = canonical(text)
    assert canonical(once) == once
    assert "#" not in once and once.endswith("\n") and "\r" not in once


def test_serialize_fig2_round_trip():
    c = build_fig2(math.pi / 2, ProbeSpec.from_alpha(0.1))
    back = parse(serialize(c))
    assert back == c
    np.testing.assert_array_equal(simulate(back).to_dense(), simulate(c).to_dense())


def test_block_serialized_without_loss_mode():
    text = serialize(blocked_variant(build_fig2(0.0), "both"))
    assert "block c" in text and "block d" in text
    assert "~" not in text and text.count("mode ") == 6
    assert Block("c") in parse(text).elements


def test_serialize_rejects_unrepresentable_probe():
    c = Circuit(("q",), ())
    from fockoptics.circuit import Source
    with pytest.raises(ValueError):
        serialize(c.with_elements([Source("q", ProbeSpec(0.6j, 0.8))]))


def test_mode_order_changes_signs_not_probabilities():
    a = parse("mode x\nmode y\nsource x fermion\nsource y fermion\n")
    b = parse("mode y\nmode x\nsource x fermion\nsource y fermion\n")
    (amp_a,) = [v for _, v in simulate(a).items()]
    (amp_b,) = [v for _, v in simulate(b).items()]
    assert amp_a == -amp_b and abs(amp_a) == abs(amp_b) == 1


@given(st.text(max_size=300))
def test_parser_never_crashes(text):
    doc = parse_document(text)
    assert doc.ok or all(d.line >= 0 and d.message for d in doc.diagnostics)


_directive = st.one_of(
    st.builds(lambda m: f"mode {m}", st.sampled_from(["a", "b", "c", "zz", "1"])),
    st.builds(lambda m: f"source {m} fermion", st.sampled_from(["a", "b", "q"])),
    st.builds(lambda m, a: f"source {m} probe alpha={a}", st.sampled_from(["a", "q"]),
              st.sampled_from(["0.1", "2", "x", "1e-3"])),
    st.builds(lambda m, n: f"bs {m} {n}", st.sampled_from(["a", "b", "c"]), st.sampled_from(["a", "b", "c"])),
    st.builds(lambda m, p: f"phase {m} {p}", st.sampled_from(["a", "b"]), st.sampled_from(["pi/3", "0.2", "?"])),
    st.builds(lambda m: f"block {m}", st.sampled_from(["a", "c", "x"])),
    st.builds(lambda m, lab: f"detect {m} {lab}", st.sampled_from(["a", "b"]), st.sampled_from(["A", "B", "A"])),
)


@given(st.lists(_directive, max_size=14))
def test_structured_documents_parse_or_diagnose(lines):
    text = "\n".join(lines)
    doc = parse_document(text)
    if doc.ok:
        again = parse(serialize(doc.circuit))
        assert again == doc.circuit
        if doc.circuit.modes:
            np.testing.assert_allclose(simulate(again).to_dense(), simulate(doc.circuit).to_dense(),
                                       atol=1e-12)
    else:
        assert all(1 <= d.line <= len(lines) for d in doc.diagnostics)
