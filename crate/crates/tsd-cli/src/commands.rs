//! Subcommand implementations: simulations in, CSV tables out.
//!
//! Data files never contain timestamps; repeated runs with the same
//! configuration produce byte-identical CSVs (wall-clock columns are the one
//! exception and are excluded from reproducibility comparisons).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use tsd_core::ensembles::{
    amplitude_fluctuation_error, decay_error, doppler_scan, interaction_sweep, ScanSettings,
};
use tsd_core::matrix::ComplexMatrix;
use tsd_core::metrics::{
    bell_error, bell_error_aligned, cnot_ideal, gate_duration, rotation_error,
    truth_table_error,
};
use tsd_core::sequence::{
    prepare_bell, run_tsd_cnot, two_state_tsd_demo, SequenceOptions,
};
use tsd_core::stark::{
    c_factor_squared, field_ratio_residual, solve_compensation, solve_field_ratio,
    solve_target_balance, CFactorSpec,
};

use crate::config::{describe, RunConfig};
use crate::CliError;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn seq_options(cfg: &RunConfig) -> SequenceOptions<f64> {
    SequenceOptions {
        samples_per_pulse: cfg.samples_per_pulse,
        case2_flip: cfg.case2_flip,
        enforce_design_ratio: cfg.enforce_ratio(),
        ..Default::default()
    }
}

fn scan_settings(cfg: &RunConfig) -> ScanSettings<f64> {
    ScanSettings { points: cfg.grid_points, v_max: cfg.v_max, case2_flip: cfg.case2_flip }
}

fn csv_header(cfg: &RunConfig) -> String {
    let mut head = String::new();
    if let Some(p) = &cfg.preset {
        let _ = writeln!(head, "# preset: {p}");
    }
    for (k, v) in describe(cfg) {
        let _ = writeln!(head, "# {k} = {v}");
    }
    head
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn map_csv(cfg: &RunConfig, u: &ComplexMatrix<f64>) -> String {
    let labels = ["00", "01", "10", "11"];
    let mut s = csv_header(cfg);
    let _ = write!(s, "row");
    for l in labels {
        let _ = write!(s, ",re_{l},im_{l}");
    }
    let _ = writeln!(s);
    for (r, l) in labels.iter().enumerate() {
        let _ = write!(s, "{l}");
        for c in 0..4 {
            let z = u.get(r, c);
            let _ = write!(s, ",{},{}", z.re, z.im);
        }
        let _ = writeln!(s);
    }
    s
}

pub fn cmd_cnot(cfg: &RunConfig) -> Result<(), CliError> {
    let gate = cfg.gate_config()?;
    let opts = seq_options(cfg);
    let result = run_tsd_cnot(&gate, cfg.v_c, cfg.v_t, cfg.case, cfg.epsilon, &opts)?;

    let e_tt = truth_table_error(&result.u_realized)?;
    let e_ro = rotation_error(&result.u_realized, &cnot_ideal())?;
    let duration = gate_duration(gate.omega_t1)?;
    let mut summary = csv_header(cfg);
    let _ = writeln!(summary, "metric,value");
    let _ = writeln!(summary, "truth_table_error,{e_tt}");
    let _ = writeln!(summary, "rotation_error,{e_ro}");
    let _ = writeln!(summary, "gate_duration_s,{duration}");
    for (label, integral) in ["00", "01", "10", "11"]
        .iter()
        .zip(&result.rydberg_time_integrals)
    {
        let _ = writeln!(summary, "rydberg_time_integral_{label}_s,{integral}");
    }
    println!("truth-table error  {e_tt:.3e}");
    println!("rotation error     {e_ro:.3e}");
    println!("gate duration      {:.4} us", duration * 1e6);

    if let Some(t_a) = cfg.temperature {
        let scan = doppler_scan(&gate, cfg.case, cfg.epsilon, &scan_settings(cfg))?;
        let avg_map = scan.averaged_rotation_error(t_a)?;
        let avg_full = scan.averaged_rotation_error_fullspace(t_a)?;
        let _ = writeln!(summary, "rotation_error_avg,{avg_map}");
        let _ = writeln!(summary, "rotation_error_avg_fullspace,{avg_full}");
        println!("ensemble rotation error at {:.0} uK:", t_a * 1e6);
        println!("  computational map  {avg_map:.3e}");
        println!("  full state space   {avg_full:.3e}");
    }

    write_file(&cfg.out_dir, "cnot_summary.csv", &summary)?;
    write_file(&cfg.out_dir, "u_realized.csv", &map_csv(cfg, &result.u_realized))?;
    if cfg.traces {
        for (label, record) in ["00", "01", "10", "11"].iter().zip(&result.records) {
            let mut buf = Vec::new();
            record
                .write_csv(&mut buf)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            let text = csv_header(cfg) + &String::from_utf8_lossy(&buf);
            write_file(&cfg.out_dir, &format!("trace_{label}.csv"), &text)?;
        }
    }
    Ok(())
}

pub fn cmd_bell(cfg: &RunConfig) -> Result<(), CliError> {
    let gate = cfg.gate_config()?;
    let opts = seq_options(cfg);
    let bell = prepare_bell(&gate, cfg.v_c, cfg.v_t, cfg.case, cfg.epsilon, &opts)?;
    let coherent = bell_error(&bell.state)?;
    // the two transfer amplitudes are sqrt(2) times the final state amplitudes
    let s2 = std::f64::consts::SQRT_2;
    let aligned = bell_error_aligned(bell.computational[0] * s2, bell.computational[3] * s2);
    let mut out = csv_header(cfg);
    let _ = writeln!(out, "metric,value");
    let _ = writeln!(out, "bell_error,{coherent}");
    let _ = writeln!(out, "bell_error_aligned,{aligned}");
    println!("bell error (phase-sensitive)   {coherent:.3e}");
    println!("bell error (population only)   {aligned:.3e}");

    if let Some(t_a) = cfg.temperature {
        let scan = doppler_scan(&gate, cfg.case, cfg.epsilon, &scan_settings(cfg))?;
        let avg = scan.averaged_bell_error(t_a)?;
        let _ = writeln!(out, "bell_error_avg,{avg}");
        println!("ensemble bell error at {:.0} uK: {avg:.3e}", t_a * 1e6);
    }
    write_file(&cfg.out_dir, "bell.csv", &out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Temperature,
    Interaction,
    Sigma,
    Tau,
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "temperature" => Ok(SweepAxis::Temperature),
            "interaction" => Ok(SweepAxis::Interaction),
            "sigma" => Ok(SweepAxis::Sigma),
            "tau" => Ok(SweepAxis::Tau),
            _ => Err(format!("unknown sweep axis `{s}`")),
        }
    }
}

pub fn cmd_sweep(cfg: &RunConfig, axis: SweepAxis) -> Result<(), CliError> {
    let gate = cfg.gate_config()?;
    let mut out = csv_header(cfg);
    let name;
    match axis {
        SweepAxis::Temperature => {
            if cfg.temperatures.is_empty() {
                return Err(CliError::Usage("temperatures_uk list is empty".into()));
            }
            name = "sweep_temperature.csv";
            let _ = writeln!(
                out,
                "temperature_uk,rotation_error,rotation_error_fullspace,bell_error,wall_time_ms"
            );
            let scan_started = Instant::now();
            let scan = doppler_scan(&gate, cfg.case, cfg.epsilon, &scan_settings(cfg))?;
            let scan_ms = scan_started.elapsed().as_millis();
            for &t_a in &cfg.temperatures {
                let started = Instant::now();
                let ro = scan.averaged_rotation_error(t_a)?;
                let full = scan.averaged_rotation_error_fullspace(t_a)?;
                let bell = scan.averaged_bell_error(t_a)?;
                let ms = started.elapsed().as_millis() + scan_ms;
                let _ = writeln!(out, "{},{ro},{full},{bell},{ms}", t_a * 1e6);
                println!(
                    "T = {:>4.0} uK: E_ro = {ro:.3e}  E_ro(full) = {full:.3e}  E_bell = {bell:.3e}",
                    t_a * 1e6
                );
            }
        }
        SweepAxis::Interaction => {
            if cfg.interactions.is_empty() || cfg.temperatures.is_empty() {
                return Err(CliError::Usage(
                    "interactions_mhz / temperatures_uk lists are empty".into(),
                ));
            }
            name = "sweep_interaction.csv";
            let _ = writeln!(
                out,
                "interaction_mhz,temperature_uk,rotation_error,rotation_error_fullspace,wall_time_ms"
            );
            let started = Instant::now();
            let rows = interaction_sweep(
                &gate,
                &cfg.interactions,
                &cfg.temperatures,
                cfg.case,
                cfg.epsilon,
            )?;
            let ms = started.elapsed().as_millis() / rows.len().max(1) as u128;
            for row in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{ms}",
                    row.interaction / TWO_PI / 1e6,
                    row.temperature * 1e6,
                    row.rotation_error,
                    row.rotation_error_fullspace,
                );
                println!(
                    "V = {:>4.0} MHz, T = {:>4.0} uK: E_ro(full) = {:.3e}",
                    row.interaction / TWO_PI / 1e6,
                    row.temperature * 1e6,
                    row.rotation_error_fullspace
                );
            }
        }
        SweepAxis::Sigma => {
            if cfg.sigmas.is_empty() {
                return Err(CliError::Usage("sigmas_pct list is empty".into()));
            }
            name = "sweep_sigma.csv";
            let _ = writeln!(out, "sigma_pct,rotation_error,wall_time_ms");
            for &sigma in &cfg.sigmas {
                let started = Instant::now();
                let e = amplitude_fluctuation_error(&gate, sigma)?;
                let ms = started.elapsed().as_millis();
                let _ = writeln!(out, "{},{e},{ms}", sigma * 100.0);
                println!("sigma = {:>4.1} %: E_ro = {e:.3e}", sigma * 100.0);
            }
        }
        SweepAxis::Tau => {
            if cfg.taus.is_empty() {
                return Err(CliError::Usage("taus_us list is empty".into()));
            }
            name = "sweep_tau.csv";
            let _ = writeln!(out, "tau_us,decay_error,wall_time_ms");
            for &tau in &cfg.taus {
                let started = Instant::now();
                let e = decay_error(&gate, tau)?;
                let ms = started.elapsed().as_millis();
                let _ = writeln!(out, "{},{e},{ms}", tau * 1e6);
                println!("tau = {:>5.0} us: E_decay = {e:.3e}", tau * 1e6);
            }
        }
    }
    write_file(&cfg.out_dir, name, &out)
}

pub fn cmd_stark(cfg: &RunConfig) -> Result<(), CliError> {
    let c2 = match cfg.c_factor_sq {
        Some(c2) => c2,
        None => c_factor_squared(&CFactorSpec::cesium())?,
    };
    let delta = solve_compensation(cfg.omega_q, c2)?;
    let ratio = solve_field_ratio(delta)?;
    let residual = field_ratio_residual(delta, ratio);
    let omega_eff = cfg
        .rabi1
        .zip(cfg.rabi2)
        .map(|(r1, r2)| r1 * r2 / (2.0 * delta));
    let balance = solve_target_balance(cfg.omega_q, c2)?;

    println!("branching factor C^2        {c2}");
    println!(
        "compensation detuning       {delta:.6e} rad/s  ({:.4} GHz / 2pi)",
        delta / TWO_PI / 1e9
    );
    println!("field amplitude ratio       {ratio:.6}");
    println!("back-substitution residual  {residual:.3e}");
    match omega_eff {
        Some(w) => println!(
            "effective Rabi frequency    {w:.6e} rad/s  ({:.4} MHz / 2pi)",
            w / TWO_PI / 1e6
        ),
        None => println!(
            "effective Rabi frequency    {:.6e} x rabi1 x rabi2  (per rad/s)",
            1.0 / (2.0 * delta)
        ),
    }
    println!(
        "target-qubit balance        delta_a = {:.4} GHz/2pi, e1_a = {:.4}, e2_a = {:.4} (units of e1_b)",
        balance.delta_a / TWO_PI / 1e9,
        balance.e1_a,
        balance.e2_a
    );

    let mut out = csv_header(cfg);
    let _ = writeln!(out, "quantity,value");
    let _ = writeln!(out, "c_factor_sq,{c2}");
    let _ = writeln!(out, "delta_rad_s,{delta}");
    let _ = writeln!(out, "field_ratio,{ratio}");
    let _ = writeln!(out, "field_ratio_residual,{residual}");
    if let Some(w) = omega_eff {
        let _ = writeln!(out, "omega_eff_rad_s,{w}");
    }
    let _ = writeln!(out, "balance_delta_a_rad_s,{}", balance.delta_a);
    let _ = writeln!(out, "balance_e1_a,{}", balance.e1_a);
    let _ = writeln!(out, "balance_e2_a,{}", balance.e2_a);
    let _ = writeln!(out, "balance_delta_b_rad_s,{}", balance.delta_b);
    let _ = writeln!(out, "balance_e2_b,{}", balance.e2_b);
    write_file(&cfg.out_dir, "stark.csv", &out)
}

pub fn cmd_demo_two_state(alpha: f64, cycles: u32) -> Result<(), CliError> {
    let report = two_state_tsd_demo(alpha, cycles)?;
    println!("alpha                      {alpha}");
    println!("joint Rabi cycles          {:.6}", report.omega_bar_cycles);
    println!("cycle mismatch             {:.3e} rad", report.cycle_mismatch);
    println!("revival overlap            {:.12}", report.revival_overlap);
    println!("|1r> population at t1      {:.12}", report.mid_r_population);
    println!("|1r> population at 2 t1    {:.12}", report.final_r_population);
    Ok(())
}

pub fn cmd_check() -> Result<(), CliError> {
    let started = Instant::now();
    let outcomes = tsd_core::checks::run_all();
    let mut failed = 0;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<28} {:>7.2}s  {}", o.name, o.seconds, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "{} checks, {} failed, {:.1}s total",
        outcomes.len(),
        failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        return Err(CliError::Runtime(format!("{failed} checks failed")));
    }
    Ok(())
}
