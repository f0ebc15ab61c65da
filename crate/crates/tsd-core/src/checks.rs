//! Runtime invariant suite behind the `check` CLI subcommand: structural
//! properties of the builders and propagators, the two-route
//! cross-validation, grid-refinement stability, and run-to-run bitwise
//! reproducibility. Everything is deterministic (fixed probe points, no
//! randomness).

use std::time::Instant;

use crate::ensembles::{doppler_scan, ScanSettings};
use crate::matrix::vec_max_abs_diff;
use crate::propagator::{
    evolve_constant, evolve_timedep, HamiltonianSource, RotatingFrame, SegmentHamiltonian,
};
use crate::qmodel::{
    AtomState, Basis, ChannelSigns, GateChannelConfig, Interaction, PulseSegment, Sign,
};
use crate::scalar::C;
use crate::sequence::CaseId;

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn cfg500() -> GateChannelConfig<f64> {
    GateChannelConfig::design(TWO_PI * 3.5e6, Interaction::Finite(TWO_PI * 500e6)).unwrap()
}

fn probe_velocities() -> [(f64, f64); 5] {
    [(0.0, 0.0), (0.3, -0.2), (-0.41, 0.17), (0.05, 0.49), (-0.5, -0.5)]
}

fn segment(sign: Sign, dur: f64) -> PulseSegment<f64> {
    PulseSegment::new(dur, sign, ChannelSigns::all_plus(), 0.0).unwrap()
}

fn outcome(
    name: &'static str,
    started: Instant,
    passed: bool,
    detail: String,
) -> CheckOutcome {
    CheckOutcome { name, passed, detail, seconds: started.elapsed().as_secs_f64() }
}

fn check_hermiticity() -> CheckOutcome {
    let t0 = Instant::now();
    let cfg = cfg500();
    let mut worst = 0.0_f64;
    for (v_c, v_t) in probe_velocities() {
        for sign in [Sign::Plus, Sign::Minus] {
            for t in [0.0, 37e-9, 113e-9] {
                let seg = segment(sign, cfg.pulse_time());
                for basis in [Basis::ControlZero, Basis::ControlOneFull, Basis::UnionFull] {
                    let h = SegmentHamiltonian::new(basis, &cfg, &seg, v_c, v_t).sample(t);
                    worst = worst.max(h.hermiticity_deviation());
                }
            }
        }
    }
    outcome(
        "builder-hermiticity",
        t0,
        worst <= 1e-12,
        format!("max |H - H^d| = {worst:.3e}"),
    )
}

fn check_unitarity_and_norm() -> CheckOutcome {
    let t0 = Instant::now();
    let cfg = cfg500();
    let mut worst_u = 0.0_f64;
    let mut worst_norm = 0.0_f64;
    for (v_c, v_t) in probe_velocities() {
        let seg = segment(Sign::Plus, cfg.pulse_time());
        let frame =
            RotatingFrame::for_segment(Basis::ControlOneFull, &cfg, &seg, v_c, v_t).unwrap();
        let u = frame.propagator(0.0, seg.duration);
        worst_u = worst_u.max(u.unitarity_deviation());
        let psi0 = AtomState::<f64>::labeled(Basis::ControlOneFull, "11").unwrap();
        let psi = u.mul_vec(psi0.amplitudes());
        worst_norm = worst_norm.max((crate::matrix::vec_norm(&psi) - 1.0).abs());
    }
    outcome(
        "propagator-unitarity",
        t0,
        worst_u <= 1e-9 && worst_norm <= 1e-9,
        format!("max ||U^d U - I|| = {worst_u:.3e}, max norm drift = {worst_norm:.3e}"),
    )
}

fn check_time_reversal() -> CheckOutcome {
    let t0 = Instant::now();
    let cfg = cfg500();
    let h = crate::qmodel::build_hc1_blockaded(cfg.omega_c, cfg.omega_t1).unwrap();
    let neg = h.scaled(C::new(-1.0, 0.0));
    let psi0 = AtomState::<f64>::labeled(Basis::ControlOneBlockaded, "10").unwrap();
    let mut worst = 0.0_f64;
    for t in [0.11e-6, 0.37e-6, 1.3e-6] {
        let fwd = evolve_constant(&h, t, &psi0).unwrap();
        let back = evolve_constant(&neg, t, &fwd).unwrap();
        worst = worst.max(vec_max_abs_diff(back.amplitudes(), psi0.amplitudes()));
    }
    outcome("time-reversal", t0, worst <= 1e-9, format!("max return error = {worst:.3e}"))
}

fn check_composition() -> CheckOutcome {
    let t0 = Instant::now();
    let cfg = cfg500();
    let seg = segment(Sign::Minus, cfg.pulse_time());
    let mut worst = 0.0_f64;
    for (v_c, v_t) in probe_velocities() {
        let frame =
            RotatingFrame::for_segment(Basis::ControlOneFull, &cfg, &seg, v_c, v_t).unwrap();
        let t = seg.duration;
        let whole = frame.propagator(0.0, t);
        let split = frame.propagator(t / 2.0, t).mul(&frame.propagator(0.0, t / 2.0));
        worst = worst.max(whole.max_abs_diff(&split));
    }
    outcome("composition", t0, worst <= 1e-9, format!("max split deviation = {worst:.3e}"))
}

fn check_route_crossvalidation() -> CheckOutcome {
    let t0 = Instant::now();
    let cfg = cfg500();
    let mut worst = 0.0_f64;
    for (v_c, v_t) in [(0.3, -0.2), (-0.15, 0.42)] {
        for sign in [Sign::Plus, Sign::Minus] {
            let seg = segment(sign, cfg.pulse_time());
            let start = if sign == Sign::Minus { cfg.pulse_time() } else { 0.0 };
            let src = SegmentHamiltonian::new(Basis::ControlOneFull, &cfg, &seg, v_c, v_t);
            let frame =
                RotatingFrame::for_segment(Basis::ControlOneFull, &cfg, &seg, v_c, v_t)
                    .unwrap();
            let psi0 = AtomState::<f64>::labeled(Basis::ControlOneFull, "10").unwrap();
            let (direct, _) =
                evolve_timedep(&src, start, start + seg.duration, &psi0, 1e-10).unwrap();
            let exact =
                frame.propagator(start, start + seg.duration).mul_vec(psi0.amplitudes());
            worst = worst.max(vec_max_abs_diff(direct.amplitudes(), &exact));
        }
    }
    outcome(
        "route-crossvalidation",
        t0,
        worst <= 1e-8,
        format!("max lab-vs-rotating-frame deviation = {worst:.3e}"),
    )
}

fn check_grid_refinement() -> CheckOutcome {
    let t0 = Instant::now();
    let cfg = cfg500();
    let coarse = doppler_scan(&cfg, CaseId::One, 0.0, &ScanSettings::default())
        .and_then(|s| s.averaged_rotation_error(5e-6));
    let fine = doppler_scan(
        &cfg,
        CaseId::One,
        0.0,
        &ScanSettings { points: 201, ..ScanSettings::default() },
    )
    .and_then(|s| s.averaged_rotation_error(5e-6));
    match (coarse, fine) {
        (Ok(a), Ok(b)) => {
            let rel = ((a - b) / a).abs();
            outcome(
                "grid-refinement",
                t0,
                rel < 0.10,
                format!("101-point {a:.4e} vs 201-point {b:.4e}, rel change {rel:.2e}"),
            )
        }
        (a, b) => outcome("grid-refinement", t0, false, format!("scan failed: {a:?} {b:?}")),
    }
}

fn check_reproducibility() -> CheckOutcome {
    let t0 = Instant::now();
    let cfg = cfg500();
    let settings = ScanSettings { points: 21, ..ScanSettings::default() };
    let runs: Vec<_> = (0..2)
        .map(|_| doppler_scan(&cfg, CaseId::One, 0.0, &settings).unwrap())
        .collect();
    let bit_equal = runs[0]
        .rotation
        .iter()
        .zip(&runs[1].rotation)
        .all(|(a, b)| a.to_bits() == b.to_bits())
        && runs[0]
            .bell
            .iter()
            .zip(&runs[1].bell)
            .all(|(a, b)| a.to_bits() == b.to_bits());
    outcome(
        "bitwise-reproducibility",
        t0,
        bit_equal,
        if bit_equal { "two parallel runs bit-identical".into() } else { "runs differ".into() },
    )
}

fn check_doppler_symmetry() -> CheckOutcome {
    // The joint-negation symmetry holds exactly in the blockaded model (the
    // runtime probe must verify it there and halve the grid) and is broken
    // at the 1e-10 gate by a finite |rr> energy (the probe must then fall
    // back to the full grid).
    let t0 = Instant::now();
    let settings = ScanSettings { points: 21, ..ScanSettings::default() };
    let blockaded = GateChannelConfig::design(TWO_PI * 3.5e6, Interaction::InfiniteBlockade)
        .unwrap();
    let finite = cfg500();
    match (
        doppler_scan(&blockaded, CaseId::One, 0.0, &settings),
        doppler_scan(&finite, CaseId::One, 0.0, &settings),
    ) {
        (Ok(b), Ok(f)) => {
            let mirrored_ok = {
                let n = b.velocities.len();
                (0..n * n).all(|idx| {
                    let (ic, it) = (idx / n, idx % n);
                    let mirror = (n - 1 - ic) * n + (n - 1 - it);
                    (b.rotation[idx] - b.rotation[mirror]).abs() <= 1e-10
                })
            };
            outcome(
                "doppler-negation-symmetry",
                t0,
                b.symmetry_exploited && mirrored_ok,
                format!(
                    "blockaded grid halved: {}; finite-interaction grid halved: {}",
                    b.symmetry_exploited, f.symmetry_exploited
                ),
            )
        }
        (a, b) => outcome(
            "doppler-negation-symmetry",
            t0,
            false,
            format!("scan failed: {a:?} {b:?}"),
        ),
    }
}

/// Run the full invariant suite.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        check_hermiticity(),
        check_unitarity_and_norm(),
        check_time_reversal(),
        check_composition(),
        check_route_crossvalidation(),
        check_doppler_symmetry(),
        check_grid_refinement(),
        check_reproducibility(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_checks_pass() {
        for c in [
            check_hermiticity(),
            check_unitarity_and_norm(),
            check_time_reversal(),
            check_composition(),
        ] {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
