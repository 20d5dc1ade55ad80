"""Preset construction and scenario-report content."""

import json

import numpy as np
import pytest

from photonsteer.core import BasisKet, fidelity
from photonsteer.errors import BadParameters
from photonsteer.scenarios import (
    eq1_state,
    fig1_state,
    hardy_state,
    noisy_state,
    preset,
    qplate_tripartite_state,
    scenario_report,
    twc_state,
)

SQ2 = 1.0 / np.sqrt(2.0)


class TestPresets:
    def test_eq1_matches_preparation_circuit(self):
        target = eq1_state()
        out = fig1_state().with_declaration(target.decl)
        assert fidelity(out, target) >= 1 - 1e-10

    def test_twc_amplitudes(self):
        s = twc_state()
        assert s.amplitude(BasisKet.photon("b1", "H")) == pytest.approx(SQ2)
        assert s.amplitude(BasisKet.photon("b2", "H")) == pytest.approx(1j * SQ2)

    def test_hardy_amplitudes(self):
        s = hardy_state(0.6, 0.8)
        assert s.amplitude(BasisKet.vacuum()) == pytest.approx(0.6)
        assert s.amplitude(BasisKet.photon("u1", "H")) == pytest.approx(0.565685j, abs=1e-6)
        assert s.amplitude(BasisKet.photon("u2", "H")) == pytest.approx(0.565685, abs=1e-6)
        assert s.norm() == pytest.approx(1.0, abs=1e-10)

    def test_hardy_requires_normalized_parameters(self):
        with pytest.raises(BadParameters):
            hardy_state(0.9, 0.9)

    def test_tripartite_coefficients(self):
        s = qplate_tripartite_state()
        mags = [abs(a) for _, a in s.items()]
        np.testing.assert_allclose(mags, [0.5] * 4, atol=1e-12)
        # Relative phase i on the New York branch.
        ratio = s.amplitude(BasisKet.photon("NY", "V", 2)) / s.amplitude(
            BasisKet.photon("PUE", "H", 2)
        )
        assert ratio == pytest.approx(1j)

    def test_every_preset_normalized(self):
        for s in (eq1_state(), twc_state(), hardy_state(), qplate_tripartite_state()):
            assert s.norm() == pytest.approx(1.0, abs=1e-10)
        for v in (0.0, 0.3, 1.0):
            rho = noisy_state(v)
            assert rho.trace_value == pytest.approx(1.0, abs=1e-10)

    def test_noisy_range_checked(self):
        with pytest.raises(BadParameters):
            noisy_state(1.5)

    def test_preset_string_dispatch(self):
        assert preset("eq1").decl.sites == ("NY", "PUE")
        assert preset("noisy:0.4").trace_value == pytest.approx(1.0)
        assert preset("hardy:0.6,0.8").amplitude(BasisKet.vacuum()) == pytest.approx(0.6)
        with pytest.raises(BadParameters):
            preset("bellpair")
        with pytest.raises(BadParameters):
            preset("noisy:oops")


class TestScenarioReport:
    def test_eq1_zhv_reproduces_first_scenario_list(self):
        report = scenario_report("eq1", site="NY", basis="ZHV")
        outcomes = {o["label"]: o for o in report["detector"]["outcomes"]}
        assert outcomes["V-click"]["probability"] == pytest.approx(0.5, abs=1e-12)
        assert outcomes["no-click"]["probability"] == pytest.approx(0.5, abs=1e-12)
        assert outcomes["H-click"]["probability"] == 0.0
        v_reduced = np.array(outcomes["V-click"]["bob_occupation_reduced"])
        np.testing.assert_allclose(v_reduced[:, :, 0], np.diag([1.0, 0.0]), atol=1e-10)
        nc_reduced = np.array(outcomes["no-click"]["bob_occupation_reduced"])
        np.testing.assert_allclose(nc_reduced[:, :, 0], np.diag([0.0, 1.0]), atol=1e-10)

    def test_eq1_xdiag_reproduces_second_scenario_list(self):
        report = scenario_report("eq1", site="NY", basis="Xdiag")
        outcomes = {o["label"]: o for o in report["detector"]["outcomes"]}
        for label in ("+", "-"):
            assert outcomes[label]["probability"] == pytest.approx(0.5, abs=1e-12)
            reduced = np.array(outcomes[label]["bob_occupation_reduced"])
            np.testing.assert_allclose(reduced[:, :, 0], np.diag([0.5, 0.5]), atol=1e-10)

    def test_eq1_carries_violation_summary(self):
        report = scenario_report("eq1")
        assert report["assemblage"]["cjwr_zx"] == pytest.approx(np.sqrt(2.0), abs=1e-9)
        assert report["assemblage"]["chsh_standard_angles"]["value"] == pytest.approx(
            2.0 * np.sqrt(2.0), abs=1e-9
        )

    def test_tripartite_oam_measurement(self):
        report = scenario_report("qplate_tripartite", site="PUE", basis="OAMpm")
        outcomes = {o["label"]: o for o in report["detector"]["outcomes"]}
        assert outcomes["+"]["probability"] == pytest.approx(0.5, abs=1e-12)
        assert outcomes["no-click"]["probability"] == pytest.approx(0.5, abs=1e-12)
        plus_kets = {k for k, _ in outcomes["+"]["conditional_amplitudes"]}
        assert plus_kets == {"PUE:H:2", "PUE:H:-2"}
        dark_kets = {k for k, _ in outcomes["no-click"]["conditional_amplitudes"]}
        assert dark_kets == {"NY:V:2", "NY:V:-2"}

    def test_full_visibility_matches_entangled_preset(self):
        a = scenario_report("eq1")["assemblage"]
        b = scenario_report("noisy:1.0")["assemblage"]
        for key in a["members"]:
            np.testing.assert_allclose(
                np.array(a["members"][key]["member"]),
                np.array(b["members"][key]["member"]),
                atol=1e-10,
            )
        assert b["cjwr_zx"] == pytest.approx(a["cjwr_zx"], abs=1e-10)

    def test_zero_visibility_constant_across_settings(self):
        members = scenario_report("noisy:0.0")["assemblage"]["members"]
        reference = np.array(members["Z+"]["member"])
        for key, entry in members.items():
            np.testing.assert_allclose(np.array(entry["member"]), reference, atol=1e-10)

    def test_reports_are_json_serializable(self):
        for spec in ("eq1", "twc", "hardy", "qplate_tripartite", "noisy:0.5"):
            json.dumps(scenario_report(spec))
