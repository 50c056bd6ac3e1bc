import numpy as np
import pytest

from ricci_qc.frames import (DISPLAYED_TERM_COUNT, PARAM_NAMES, FrameParams, FrameShapeError,
                             displayed_norm_sq, displayed_terms, frame_entries, frame_matrix,
                             frame_symbols, reduced_params, transition_matrix)
from ricci_qc.geometry import ClassId
from ricci_qc.metric import DiagonalMetric, DomainError, congruence_transport, frame_quotient, norm_sq

from conftest import ALL_CLASSES


def _random_frame(cls, rng):
    return frame_matrix(cls, **{s: float(rng.uniform(-1, 1)) for s in frame_symbols(cls)})


class TestFrameParams:
    @pytest.mark.parametrize("cls,arity", [(ClassId.A2iv, 3), (ClassId.A4, 6), (ClassId.A5, 4),
                                           (ClassId.A6, 5), (ClassId.A7i, 3), (ClassId.A7ii, 4),
                                           (ClassId.A8, 3), (ClassId.A9ii, 1)])
    def test_arity(self, cls, arity):
        assert len(FrameParams.zero(cls).values) == arity
        with pytest.raises(DomainError):
            FrameParams(cls, (0.0,) * (arity + 1))

    def test_dict_round_trip_and_replace(self):
        fp = FrameParams.from_dict("A8", {"a": 0.5, "c": -1.0})
        assert fp.values == (0.5, 0.0, -1.0)
        assert FrameParams.from_dict(fp.cls, fp.as_dict()) == fp
        assert fp.replace(b=2.0)["b"] == 2.0
        assert not fp.is_zero() and FrameParams.zero("A8").is_zero()

    def test_unknown_name(self):
        with pytest.raises(DomainError):
            FrameParams.from_dict("A9ii", {"b": 1.0})


class TestReducedParams:
    @pytest.mark.parametrize("cls", ALL_CLASSES)
    def test_equal_frames_give_zero(self, cls, rng):
        lam = _random_frame(cls, rng)
        assert reduced_params(cls, lam, lam).values == pytest.approx(
            (0.0,) * len(PARAM_NAMES[cls]), abs=1e-14)

    def test_a2_example(self):
        lam = frame_matrix("A2iv", a4=1, a5=2, a6=3)
        lam_p = frame_matrix("A2iv", a4=0.5, a5=1, a6=1)
        assert reduced_params("A2iv", lam, lam_p).values == (0.5, 1.0, 2.0)

    def test_a8_example(self):
        lam = frame_matrix("A8", a3=1, a1=2, a6=5)
        lam_p = frame_matrix("A8", a3=0.25, a1=0.5, a6=1)
        fp = reduced_params("A8", lam, lam_p)
        assert fp.values == pytest.approx((0.75, 1.5, 3.0625), rel=1e-15)

    @pytest.mark.parametrize("cls", ALL_CLASSES)
    def test_reconstruction_matches_quotient(self, cls, rng):
        worst = 0.0
        for _ in range(300):
            lam, lam_p = _random_frame(cls, rng), _random_frame(cls, rng)
            built = transition_matrix(reduced_params(cls, lam, lam_p, check=False))
            worst = max(worst, float(np.max(np.abs(built - frame_quotient(lam, lam_p)))))
        assert worst < 1e-12

    @pytest.mark.parametrize("cls,entries", [
        (ClassId.A4, {"a": (2, 1), "b": (0, 1), "c": (0, 2), "d": (3, 0), "e": (3, 1),
                      "f": (3, 2)}),
        (ClassId.A6, {"a": (0, 1), "b": (3, 0), "c": (3, 1), "d": (3, 2), "e": (0, 2)}),
    ])
    def test_long_formulas_against_numeric_inverse(self, cls, entries, rng):
        for _ in range(300):
            lam, lam_p = _random_frame(cls, rng), _random_frame(cls, rng)
            oracle = lam @ np.linalg.inv(lam_p)
            fp = reduced_params(cls, lam, lam_p, check=False)
            for name, (i, j) in entries.items():
                assert fp[name] == pytest.approx(oracle[i, j], abs=1e-12)

    def test_shape_error_names_entry(self):
        lam = frame_matrix("A2iv", a4=1.0)
        lam[0, 1] = 0.5
        with pytest.raises(FrameShapeError, match=r"\(1,2\)"):
            reduced_params("A2iv", lam, np.eye(4))

    def test_tied_entries_must_agree(self):
        lam = frame_matrix("A8", a3=1.0)
        lam[1, 3] = 0.9            # must repeat a3 from position (1,2)
        with pytest.raises(FrameShapeError, match=r"\(2,4\)"):
            frame_entries("A8", lam)

    def test_wrong_matrix_size(self):
        with pytest.raises(FrameShapeError):
            frame_entries("A2iv", np.eye(3))

    def test_unknown_entry_name(self):
        with pytest.raises(FrameShapeError):
            frame_matrix("A9ii", a4=1.0)

    @pytest.mark.parametrize("cls", ALL_CLASSES)
    def test_entries_round_trip(self, cls, rng):
        vals = {s: float(rng.uniform(-1, 1)) for s in frame_symbols(cls)}
        assert frame_entries(cls, frame_matrix(cls, **vals)) == pytest.approx(vals)


class TestDisplayedExpansions:
    @pytest.mark.parametrize("cls", list(DISPLAYED_TERM_COUNT))
    def test_term_count(self, cls):
        g = DiagonalMetric(1, 2, 3, 4)
        fp = FrameParams(cls, (0.3,) * len(PARAM_NAMES[cls]))
        assert len(displayed_terms(g, g, fp)) == DISPLAYED_TERM_COUNT[cls]

    @pytest.mark.parametrize("cls", list(DISPLAYED_TERM_COUNT))
    def test_matches_generic_norm(self, cls, rng):
        for _ in range(200):
            g = DiagonalMetric(*np.exp(rng.uniform(-2, 2, 4)))
            gbar = DiagonalMetric(*np.exp(rng.uniform(-2, 2, 4)))
            fp = FrameParams(cls, tuple(rng.uniform(-1, 1, len(PARAM_NAMES[cls]))))
            h = congruence_transport(transition_matrix(fp), gbar).minus_diagonal(g)
            generic = norm_sq(g, h)
            assert displayed_norm_sq(g, gbar, fp) == pytest.approx(generic, rel=1e-12)

    def test_zero_frame_reduces_to_diagonal_ratios(self):
        g, gbar = DiagonalMetric(1, 2, 3, 4), DiagonalMetric(2, 2, 1, 8)
        fp = FrameParams.zero("A2iv")
        expected = sum(((x - y) / x) ** 2 for x, y in zip(g, gbar))
        assert displayed_norm_sq(g, gbar, fp) == pytest.approx(expected, rel=1e-15)
