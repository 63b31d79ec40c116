"""Sweep, event, oracle, and hysteresis tests.

The session-scoped curves in conftest cover the two canonical regimes:
k=0.1 N/m (snap + hysteresis) and k=10 N/m over the same range (reversible
within tolerance). The analytic instability gap (H*R/(3k))^(1/3) and the
brute-force equilibrium oracle provide two independent cross-checks on the
dynamics.
"""

import numpy as np
import pytest

from nanotouch import experiments as ex
from nanotouch.forces import nano_force, nano_force_gradient

H, R, SIGMA, K_SOFT = 1e-19, 2e-8, 3.4e-10, 0.1
D_STAR = (H * R / (3 * K_SOFT)) ** (1.0 / 3.0)


class TestSweepEvents:
    def test_exactly_one_snap_in_and_one_snap_off(self, snap_curve):
        curve, _ = snap_curve
        kinds = [ev.kind for ev in curve.events]
        assert kinds.count("snap_in") == 1
        assert kinds.count("snap_off") == 1

    def test_snap_in_gap_matches_analytic_instability(self, snap_curve):
        curve, _ = snap_curve
        ev = next(e for e in curve.events if e.kind == "snap_in")
        assert abs(ev.tip_gap_before - D_STAR) / D_STAR < 0.05

    def test_event_gap_ordering(self, snap_curve):
        curve, _ = snap_curve
        for ev in curve.events:
            if ev.kind == "snap_in":
                assert ev.tip_gap_after < ev.tip_gap_before
            else:
                assert ev.tip_gap_after > ev.tip_gap_before

    def test_hysteresis_ordering(self, snap_curve):
        curve, _ = snap_curve
        z_in = next(e.handle_pos for e in curve.events if e.kind == "snap_in")
        z_off = next(e.handle_pos for e in curve.events if e.kind == "snap_off")
        assert z_off > z_in

    def test_stiff_spring_sees_no_events(self, stiff_curve):
        curve, _ = stiff_curve
        assert curve.events == ()

    def test_stiff_spring_branches_coincide(self, stiff_curve):
        curve, _ = stiff_curve
        za = curve.approach.handle[::-1]
        fa = curve.approach.force[::-1]
        fr = np.interp(za, curve.retract.handle, curve.retract.force)
        scale = np.max(np.abs(curve.approach.force))
        assert np.max(np.abs(fa - fr)) / scale < 1e-3

    def test_branch_monotonicity_and_shared_range(self, snap_curve):
        curve, _ = snap_curve
        assert np.all(np.diff(curve.approach.handle) < 0)
        assert np.all(np.diff(curve.retract.handle) > 0)
        assert curve.approach.handle[0] == curve.retract.handle[-1]
        assert curve.approach.handle[-1] == curve.retract.handle[0]

    def test_equilibrium_handle_force_equals_surface_force(self, snap_curve):
        # On a tracked stable branch the spring carries exactly the surface
        # force, so the recorded handle force must match F(gap).
        curve, _ = snap_curve
        i = 50  # far branch, long before the fold
        f_surface = nano_force(float(curve.approach.gap[i]), ex.default_sweep_config().scene.nano)
        assert curve.approach.force[i] == pytest.approx(f_surface, rel=1e-3)


class TestSweepPreconditions:
    def test_speed_bound_named_in_error(self):
        cfg = ex.default_sweep_config()
        with pytest.raises(ex.PreconditionError, match="0.01"):
            ex.quasi_static_sweep(cfg, speed=1.0)

    def test_z_ordering_required(self):
        cfg = ex.default_sweep_config()
        with pytest.raises(ex.PreconditionError):
            ex.quasi_static_sweep(cfg, z_start=1e-9, z_end=2e-9)
        with pytest.raises(ex.PreconditionError):
            ex.quasi_static_sweep(cfg, z_start=1e-9, z_end=-1e-9)

    def test_speed_just_under_bound_is_accepted(self):
        cfg = ex.default_sweep_config()
        bound = ex.SPEED_BOUND_SIGMA_FRACTION * SIGMA / cfg.dt
        curve = ex.quasi_static_sweep(
            cfg, z_start=5e-9, z_end=4e-9, speed=0.9 * bound, sample_every=1000, preroll=1000
        )
        assert len(curve.approach) >= 2


class TestOracle:
    def test_far_field_single_stable_equilibrium(self):
        # Spring stretch below 1e-15 m needs the attraction under k*1e-15,
        # i.e. a couple of microns out for the soft spring. The root itself
        # is only refined to the oracle's bisection width, so the stretch
        # is checked through the force residual.
        cfg = ex.default_sweep_config()
        z = 2e-6
        eq = ex.equilibrium_oracle(cfg, z)
        assert len(eq.equilibria) == 1
        gap, stable = eq.equilibria[0]
        assert stable
        assert abs(gap - z) < 2e-12
        assert abs(nano_force(gap, cfg.scene.nano)) / K_SOFT < 1e-15

    def test_bistable_window_structure(self, snap_curve):
        _, cfg = snap_curve
        window = ex.find_bistable_window(cfg, 1e-9, 4.4e-8, coarse=192)
        assert window is not None
        z_lo, z_hi = window
        assert z_lo < z_hi
        mid = 0.5 * (z_lo + z_hi)
        eq = ex.equilibrium_oracle(cfg, mid)
        assert len(eq.equilibria) == 3
        stables = [s for _, s in eq.equilibria]
        gaps = [g for g, _ in eq.equilibria]
        order = np.argsort(gaps)
        # stable-near, unstable-middle, stable-far
        assert [stables[i] for i in order] == [True, False, True]

    def test_single_equilibrium_outside_window(self, snap_curve):
        _, cfg = snap_curve
        for z in (1.5e-9, 4.35e-8):
            assert len(ex.equilibrium_oracle(cfg, z).equilibria) == 1

    def test_stiff_spring_unique_over_sweep_range(self, stiff_curve):
        # k=10 N/m still has a sliver of bistability near z~0.65 nm (the
        # full force-gradient maximum is ~18 N/m), but over the swept range
        # the equilibrium is unique at every height.
        _, cfg = stiff_curve
        for z in np.linspace(1e-9, 4.4e-8, 25):
            assert ex.equilibrium_count(cfg, float(z)) == 1

    def test_very_stiff_spring_unique_everywhere(self):
        # 30 N/m exceeds the largest gradient the force law can produce, so
        # no height anywhere has multiple equilibria.
        cfg = ex.default_sweep_config(stiffness=30.0)
        for z in np.geomspace(2.5e-10, 4e-8, 40):
            assert ex.equilibrium_count(cfg, float(z)) == 1

    def test_roots_satisfy_balance(self, snap_curve):
        _, cfg = snap_curve
        for z in (2.9e-9, 2e-8, 4.2e-8):
            for gap, _ in ex.equilibrium_oracle(cfg, z).equilibria:
                g = K_SOFT * (z - gap) + nano_force(gap, cfg.scene.nano)
                slope = K_SOFT + abs(nano_force_gradient(gap, cfg.scene.nano))
                assert abs(g) <= slope * 2e-12

    def test_blend_required(self):
        cfg = ex.default_sweep_config()
        blended = cfg.with_blend(0.5)
        with pytest.raises(ex.PreconditionError):
            ex.equilibrium_oracle(blended, 1e-8)


class TestFoldConsistency:
    def test_dynamic_snap_in_matches_fold_height(self, snap_curve):
        curve, cfg = snap_curve
        window = ex.find_bistable_window(cfg, 1e-9, 4.4e-8, coarse=192)
        z_lo, z_hi = window
        ev = next(e for e in curve.events if e.kind == "snap_in")
        assert abs(ev.handle_pos - z_lo) <= 2 * curve.sample_spacing

    def test_dynamic_snap_off_matches_fold_height(self, snap_curve):
        curve, cfg = snap_curve
        _, z_hi = ex.find_bistable_window(cfg, 1e-9, 4.4e-8, coarse=192)
        ev = next(e for e in curve.events if e.kind == "snap_off")
        assert abs(ev.handle_pos - z_hi) <= 2 * curve.sample_spacing

    def test_fold_gap_matches_attractive_branch_formula(self, snap_curve):
        # Analytic check holds where the merge gap clears 3 sigma and the
        # repulsive term is negligible.
        _, cfg = snap_curve
        z_lo, _ = ex.find_bistable_window(cfg, 1e-9, 4.4e-8, coarse=192)
        gap = ex.fold_gap(cfg, z_lo, "lower")
        assert gap > 3 * SIGMA
        assert abs(gap - D_STAR) / gap < 0.02

    def test_fold_gap_formula_other_stiffness(self):
        cfg = ex.default_sweep_config(stiffness=0.02)
        d_star = (H * R / (3 * 0.02)) ** (1.0 / 3.0)
        z_guess = d_star - nano_force(d_star, cfg.scene.nano) / 0.02
        window = ex.find_bistable_window(cfg, 0.5 * z_guess, 2.0 * z_guess, coarse=96)
        assert window is not None
        gap = ex.fold_gap(cfg, window[0], "lower")
        assert gap > 3 * SIGMA
        assert abs(gap - d_star) / gap < 0.02


class TestHysteresisEnergy:
    def test_snap_curve_dissipates(self, snap_curve):
        curve, _ = snap_curve
        assert ex.hysteresis_energy(curve) > 0.0

    def test_stiff_curve_negligible(self, stiff_curve):
        curve, _ = stiff_curve
        assert abs(ex.hysteresis_energy(curve)) < 1e-21

    def test_identical_branches_give_exact_zero(self):
        z = np.linspace(4e-8, 1e-9, 50)
        f = -1e-10 / (z * 1e8) ** 2
        g = z * 0.9
        t = np.arange(50.0)
        approach = ex.CurveBranch(handle=z, force=f, gap=g, time=t)
        retract = ex.CurveBranch(handle=z[::-1], force=f[::-1], gap=g[::-1], time=t + 50)
        curve = ex.ForceCurve(approach=approach, retract=retract)
        assert ex.hysteresis_energy(curve) == 0.0

    def test_mismatched_ranges_rejected(self):
        z = np.linspace(4e-8, 1e-9, 50)
        f = np.zeros(50)
        g = z.copy()
        t = np.arange(50.0)
        approach = ex.CurveBranch(handle=z, force=f, gap=g, time=t)
        zr = np.linspace(2e-9, 3e-8, 40)
        retract = ex.CurveBranch(handle=zr, force=np.zeros(40), gap=zr, time=t[:40])
        curve = ex.ForceCurve(approach=approach, retract=retract)
        with pytest.raises(ex.MismatchedRangesError):
            ex.hysteresis_energy(curve)

    def test_resample_invariance(self, snap_curve):
        """Doubling the sample resolution leaves the area within 1%."""
        curve, _ = snap_curve
        e_base = ex.hysteresis_energy(curve)

        def densify(branch):
            n = len(branch.handle)
            fine = np.interp(
                np.linspace(0, n - 1, 2 * n - 1), np.arange(n), np.arange(n)
            )
            idx = np.arange(n)
            return ex.CurveBranch(
                handle=np.interp(fine, idx, branch.handle),
                force=np.interp(fine, idx, branch.force),
                gap=np.interp(fine, idx, branch.gap),
                time=np.interp(fine, idx, branch.time),
            )

        dense = ex.ForceCurve(
            approach=densify(curve.approach),
            retract=densify(curve.retract),
            events=curve.events,
        )
        assert ex.hysteresis_energy(dense) == pytest.approx(e_base, rel=1e-2)

    def test_cross_sweep_resolution_invariance(self, snap_curve):
        # An independent sweep sampled twice as densely integrates to the
        # same area within 1%.
        curve, cfg = snap_curve
        dense = ex.quasi_static_sweep(cfg, sample_every=ex.DEFAULT_SAMPLE_EVERY // 2)
        assert ex.hysteresis_energy(dense) == pytest.approx(
            ex.hysteresis_energy(curve), rel=1e-2
        )


class TestOracleValidation:
    def test_default_sweep_passes(self, snap_curve):
        curve, _ = snap_curve
        report = ex.validate_against_oracle(curve)
        assert report.passed
        assert report.worst_gap_deviation_m <= report.tolerance_m
        assert report.samples_checked > 500
        assert len(report.events) == 2

    def test_stiff_sweep_passes_single_branch(self, stiff_curve):
        curve, _ = stiff_curve
        report = ex.validate_against_oracle(curve)
        assert report.passed
        assert report.events == ()

    def test_fast_sweep_fails_with_deviations_flagged(self):
        cfg = ex.default_sweep_config()
        fast = ex.quasi_static_sweep(cfg, speed=100 * ex.DEFAULT_SPEED)
        report = ex.validate_against_oracle(fast)
        assert not report.passed
        assert report.worst_gap_deviation_m > report.tolerance_m

    def test_report_json_fields(self, snap_curve):
        import json

        curve, _ = snap_curve
        doc = json.loads(ex.validate_against_oracle(curve).to_json())
        assert set(doc) >= {"pass", "worst_gap_deviation_m", "events"}
        assert doc["pass"] is True


class TestCurveCsv:
    def test_header_bit_exact(self, snap_curve, tmp_path):
        curve, _ = snap_curve
        path = tmp_path / "curve.csv"
        ex.write_curve_csv(curve, path)
        first = path.read_bytes().split(b"\n", 1)[0]
        assert first == b"branch,handle_pos_m,handle_force_N,tip_gap_m,time_s"

    def test_round_trip(self, snap_curve, tmp_path):
        curve, _ = snap_curve
        path = tmp_path / "curve.csv"
        ex.write_curve_csv(curve, path)
        back = ex.read_curve_csv(path)
        assert np.array_equal(back.approach.handle, curve.approach.handle)
        assert np.array_equal(back.retract.force, curve.retract.force)
        assert np.array_equal(back.approach.gap, curve.approach.gap)
        assert len(back.events) == len(curve.events)
        for a, b in zip(back.events, curve.events):
            assert a.kind == b.kind
            assert a.handle_pos == b.handle_pos
            assert a.tip_gap_before == b.tip_gap_before

    def test_event_comment_format(self, snap_curve, tmp_path):
        curve, _ = snap_curve
        path = tmp_path / "curve.csv"
        ex.write_curve_csv(curve, path)
        lines = [l for l in path.read_text().splitlines() if l.startswith("#")]
        assert len(lines) == 2
        assert all(l.startswith("# event,snap_") for l in lines)

    def test_loaded_curve_validates_with_explicit_config(self, snap_curve, tmp_path):
        curve, cfg = snap_curve
        path = tmp_path / "curve.csv"
        ex.write_curve_csv(curve, path)
        back = ex.read_curve_csv(path)
        with pytest.raises(ValueError):
            ex.validate_against_oracle(back)  # no config snapshot in the CSV
        report = ex.validate_against_oracle(back, cfg=cfg)
        assert report.passed

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nope,nope\n")
        with pytest.raises(ValueError):
            ex.read_curve_csv(path)


class TestForceCurveInvariants:
    def test_non_monotone_branch_rejected(self):
        z = np.array([3e-9, 2e-9, 2.5e-9])
        br = ex.CurveBranch(handle=z, force=np.zeros(3), gap=z, time=np.arange(3.0))
        ok = ex.CurveBranch(
            handle=z[::-1], force=np.zeros(3), gap=z[::-1], time=np.arange(3.0)
        )
        with pytest.raises(ValueError):
            ex.ForceCurve(approach=br, retract=ok)

    def test_snap_event_kind_consistency(self):
        with pytest.raises(ValueError):
            ex.SnapEvent(kind="snap_in", handle_pos=1e-9, tip_gap_before=1e-10,
                         tip_gap_after=2e-10)
        with pytest.raises(ValueError):
            ex.SnapEvent(kind="sideways", handle_pos=1e-9, tip_gap_before=1e-10,
                         tip_gap_after=2e-10)
