//! Implementations behind the `vring` subcommands. Every run is driven by a
//! config file, writes CSV tables plus a MANIFEST with the config hash, and
//! is bit-reproducible: identical configs yield byte-identical outputs.

use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{
    self, build_domain, build_filament, load_config, Needs,
};
use crate::constants::derive_scales;
use crate::dynamics::{
    self, dispersion, evolve_linearized_pde, linearized_stability_bound, LinearField,
    NonlinearOptions,
};
use crate::error::{Error, Result};
use crate::fourier;
use crate::laplace::{eigen_analytic, eigen_grid, DomainSpec, EigenMethod, EigenResult};
use crate::spectrum::{enumerate_levels, peak_histogram, EnumerationOptions};

/// Shared command-line switches.
#[derive(Debug, Clone, Default)]
pub struct CliOptions {
    /// Output directory override (the config's `output.dir` otherwise).
    pub out: Option<PathBuf>,
    /// Force the grid eigensolver even for disk/rectangle sections.
    pub force_grid: bool,
    /// Grid cell size override for shape sections.
    pub grid_h: Option<f64>,
    /// Suppress advisory prints.
    pub quiet: bool,
}

/// Fixed 15-significant-digit float formatting; output determinism depends
/// on every table going through this.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.14e}")
}

struct OutputWriter {
    dir: PathBuf,
    files: Vec<(String, String)>, // name, sha256
    notes: Vec<String>,
}

impl OutputWriter {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(OutputWriter {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            notes: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)?;
        self.files.push((name.to_string(), sha256_hex(contents.as_bytes())));
        Ok(path)
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn manifest(&mut self, command: &str, config: Option<(&Path, &str)>) -> Result<()> {
        let mut text = format!(
            "tool: vring {}\ncommand: {}\n",
            env!("CARGO_PKG_VERSION"),
            command
        );
        if let Some((path, hash)) = config {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            let _ = writeln!(text, "config: {name} sha256={hash}");
        }
        for (name, hash) in &self.files {
            let _ = writeln!(text, "output: {name} sha256={hash}");
        }
        for note in &self.notes {
            let _ = writeln!(text, "note: {note}");
        }
        let path = self.dir.join("MANIFEST");
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

fn config_hash(path: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

fn say(quiet: bool, msg: &str) {
    if !quiet {
        println!("{msg}");
    }
}

fn warn_all(quiet: bool, warnings: &[String]) {
    if !quiet {
        for w in warnings {
            eprintln!("warning: {w}");
        }
    }
}

/// `vring dispersion`: tabulates omega_n = n sqrt(n^2 - 1).
pub fn run_dispersion(
    n_min: i32,
    n_max: i32,
    out: Option<&Path>,
    quiet: bool,
) -> Result<Vec<(i32, f64)>> {
    let rows: Vec<(i32, f64)> = (n_min..=n_max).map(|n| (n, dispersion(n))).collect();
    let mut csv = String::from("n,omega\n");
    for (n, w) in &rows {
        let _ = writeln!(csv, "{n},{}", fmt_float(*w));
    }
    if let Some(dir) = out {
        let mut writer = OutputWriter::new(dir)?;
        writer.write("dispersion.csv", &csv)?;
        writer.manifest("dispersion", None)?;
        say(quiet, &format!("wrote {}", dir.join("dispersion.csv").display()));
    } else if !quiet {
        print!("{csv}");
    }
    Ok(rows)
}

/// `vring validate`: full validation pass over every block present.
pub fn run_validate(config_path: &Path, quiet: bool) -> Result<Vec<String>> {
    let (config, base) = load_config(config_path)?;
    let mut needs = Vec::new();
    if config.domain.is_some() {
        needs.push(Needs::Domain);
    }
    if config.filament.is_some() {
        needs.push(Needs::Filament);
    }
    if config.simulate.is_some() {
        needs.push(Needs::Simulate);
    }
    if config.sweep.is_some() {
        needs.push(Needs::Sweep);
    }
    let mut warnings = config::validate(&config, &needs)?;
    if let Some(d) = &config.domain {
        // builds the domain to surface mask I/O and connectivity problems
        let domain = build_domain(d, &base)?;
        warnings.extend(domain.warnings());
    }
    warn_all(quiet, &warnings);
    say(quiet, "configuration valid");
    Ok(warnings)
}

/// Everything `vring simulate` reports besides its files.
#[derive(Debug, Clone)]
pub struct SimulateReport {
    pub completed: bool,
    pub max_length_drift: Option<f64>,
    /// Max deviation between the PDE run and the exact mode propagator
    /// (linearized runs only).
    pub propagator_deviation: Option<f64>,
}

/// `vring simulate`: nonlinear or linearized evolution per the config.
pub fn run_simulate(config_path: &Path, opts: &CliOptions) -> Result<SimulateReport> {
    let (config, _base) = load_config(config_path)?;
    let warnings = config::validate(&config, &[Needs::Filament, Needs::Simulate])?;
    warn_all(opts.quiet, &warnings);
    let sim = config.simulate.as_ref().expect("validated");
    let state = build_filament(config.filament.as_ref().expect("validated"), &config.constants)?;
    let out_dir = opts.out.clone().unwrap_or_else(|| config.output.dir.clone());
    let mut writer = OutputWriter::new(&out_dir)?;
    let hash = config_hash(config_path)?;

    let report = match sim.mode.as_str() {
        "nonlinear" => {
            let curve = state.reconstruct_curve(sim.grid_n)?;
            let run_opts = NonlinearOptions {
                dt: sim.dt,
                output_every: sim.output_every,
                resample_every: sim.resample_every,
                track_modes: sim.track_modes.clone(),
                ..Default::default()
            };
            let run = dynamics::evolve_nonlinear(&curve, sim.tau, config.constants.r0, &run_opts)?;

            let mut csv = String::from("tau,length,f_x,f_y,f_z");
            for (m, _) in &run.mode_series {
                let _ = write!(csv, ",mode_{m}_re,mode_{m}_im");
            }
            csv.push('\n');
            for i in 0..run.times.len() {
                let _ = write!(
                    csv,
                    "{},{},{},{},{}",
                    fmt_float(run.times[i]),
                    fmt_float(run.lengths[i]),
                    fmt_float(run.impulses[i].x),
                    fmt_float(run.impulses[i].y),
                    fmt_float(run.impulses[i].z)
                );
                for (_, series) in &run.mode_series {
                    let _ = write!(csv, ",{},{}", fmt_float(series[i].re), fmt_float(series[i].im));
                }
                csv.push('\n');
            }
            writer.write("diagnostics.csv", &csv)?;

            let n = run.final_curve.len();
            let mut curve_csv = String::from("xi,x,y,z,jx,jy,jz\n");
            for i in 0..n {
                let p = run.final_curve.points[i];
                let j = run.final_curve.tangents[i];
                let _ = writeln!(
                    curve_csv,
                    "{},{},{},{},{},{},{}",
                    fmt_float(fourier::grid_point(i, n)),
                    fmt_float(p.x),
                    fmt_float(p.y),
                    fmt_float(p.z),
                    fmt_float(j.x),
                    fmt_float(j.y),
                    fmt_float(j.z)
                );
            }
            writer.write("curve_final.csv", &curve_csv)?;

            if !run.completed {
                writer.note(format!(
                    "run truncated: {}",
                    run.abort_reason.as_deref().unwrap_or("unknown")
                ));
            }
            say(
                opts.quiet,
                &format!(
                    "nonlinear run: {} outputs, length drift {:.3e}",
                    run.times.len(),
                    run.max_length_drift()
                ),
            );
            SimulateReport {
                completed: run.completed,
                max_length_drift: Some(run.max_length_drift()),
                propagator_deviation: None,
            }
        }
        "linearized" => {
            let n = sim.grid_n;
            let sj0 = state.amplitude_field(n)?;
            let field0 = LinearField::from_amplitude(&sj0);
            let dt = sim.dt.unwrap_or(0.8 * linearized_stability_bound(n));

            // diagnostics series: evolve in output_every sized chunks
            let bound = linearized_stability_bound(n);
            if dt > bound {
                return Err(Error::UnstableTimeStep { dt, bound });
            }
            let chunk = dt * sim.output_every.max(1) as f64;
            let outputs = (sim.tau / chunk).ceil().max(1.0) as usize;
            let mut csv = String::from("tau,norm");
            for m in &sim.track_modes {
                let _ = write!(csv, ",mode_{m}_re,mode_{m}_im");
            }
            csv.push('\n');
            let mut field = field0.clone();
            let mut t = 0.0;
            let record = |csv: &mut String, t: f64, f: &LinearField| {
                let amp = f.amplitude();
                let norm = (amp.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64).sqrt();
                let _ = write!(csv, "{},{}", fmt_float(t), fmt_float(norm));
                for m in &sim.track_modes {
                    let c = fourier::mode_coefficient(&amp, *m);
                    let _ = write!(csv, ",{},{}", fmt_float(c.re), fmt_float(c.im));
                }
                csv.push('\n');
            };
            record(&mut csv, 0.0, &field);
            for _ in 0..outputs {
                let step = chunk.min(sim.tau - t);
                if step <= 0.0 {
                    break;
                }
                field = evolve_linearized_pde(&field, step, dt)?;
                t += step;
                record(&mut csv, t, &field);
            }
            writer.write("diagnostics.csv", &csv)?;

            let mut field_csv = String::from("xi,j_rho,j_z\n");
            for i in 0..n {
                let _ = writeln!(
                    field_csv,
                    "{},{},{}",
                    fmt_float(fourier::grid_point(i, n)),
                    fmt_float(field.j_rho[i]),
                    fmt_float(field.j_z[i])
                );
            }
            writer.write("field_final.csv", &field_csv)?;

            // cross-check against the exact propagator
            let exact_state = state.evolved(t);
            let exact = exact_state.amplitude_field(n)?;
            let dev = field
                .amplitude()
                .iter()
                .zip(&exact)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            writer.note(format!(
                "linearized vs exact propagator: max deviation {}",
                fmt_float(dev)
            ));
            say(
                opts.quiet,
                &format!("linearized run: deviation from exact propagator {dev:.3e}"),
            );
            SimulateReport {
                completed: true,
                max_length_drift: None,
                propagator_deviation: Some(dev),
            }
        }
        other => {
            return Err(Error::validation(
                "simulate.mode",
                format!("unknown mode {other:?}"),
            ))
        }
    };

    let record = config::filament_to_record(&state);
    writer.write("state_initial.toml", &record)?;
    writer.manifest("simulate", Some((config_path, &hash)))?;
    if !report.completed {
        return Err(Error::Numerical(
            "run truncated by blow-up; partial output preserved".into(),
        ));
    }
    Ok(report)
}

fn eigen_csv(eig: &EigenResult) -> String {
    let mut csv = String::from("m,lambda_sq,lambda,error_estimate,multiplicity\n");
    for e in &eig.entries {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            e.m,
            fmt_float(e.lambda_sq),
            fmt_float(e.lambda),
            fmt_float(e.error_estimate),
            e.multiplicity
        );
    }
    csv
}

fn solve_domain_spectrum(
    domain: &DomainSpec,
    m: usize,
    opts: &CliOptions,
) -> Result<EigenResult> {
    // a requested cell size implies the grid path even without --force-grid
    let analytic_available = !matches!(domain, DomainSpec::Mask(_));
    if analytic_available && !opts.force_grid && opts.grid_h.is_none() {
        eigen_analytic(domain, m)
    } else {
        eigen_grid(domain, m, opts.grid_h)
    }
}

/// `vring eigen`: cross-section spectrum to CSV.
pub fn run_eigen(config_path: &Path, opts: &CliOptions) -> Result<EigenResult> {
    let (config, base) = load_config(config_path)?;
    let warnings = config::validate(&config, &[Needs::Domain, Needs::Sweep])?;
    warn_all(opts.quiet, &warnings);
    let domain = build_domain(config.domain.as_ref().expect("validated"), &base)?;
    warn_all(opts.quiet, &domain.warnings());
    let m = config.sweep.as_ref().expect("validated").eigenvalues;

    let eig = solve_domain_spectrum(&domain, m, opts)?;
    let out_dir = opts.out.clone().unwrap_or_else(|| config.output.dir.clone());
    let mut writer = OutputWriter::new(&out_dir)?;
    writer.write("eigen.csv", &eigen_csv(&eig))?;
    match &eig.method {
        EigenMethod::Analytic => writer.note("method: analytic"),
        EigenMethod::Grid { h, h_half } => writer.note(format!(
            "method: grid h={} extrapolated with h/2={}",
            fmt_float(*h),
            fmt_float(*h_half)
        )),
    }
    let hash = config_hash(config_path)?;
    writer.manifest("eigen", Some((config_path, &hash)))?;
    say(
        opts.quiet,
        &format!("wrote {} eigenvalues to eigen.csv", eig.entries.len()),
    );
    Ok(eig)
}

/// Everything `vring spectrum` reports besides its files.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub level_count: usize,
    pub max_correction: f64,
    pub max_residual: f64,
    /// Rigorous bound on |mu_v Gamma / hbar - nearest integer| over the
    /// enumerated levels.
    pub offset_bound: f64,
    pub max_offset: f64,
}

/// `vring spectrum`: level table plus peak histogram.
pub fn run_spectrum(config_path: &Path, opts: &CliOptions) -> Result<SpectrumReport> {
    let (config, base) = load_config(config_path)?;
    let warnings = config::validate(
        &config,
        &[Needs::Domain, Needs::Filament, Needs::Sweep],
    )?;
    warn_all(opts.quiet, &warnings);
    let domain = build_domain(config.domain.as_ref().expect("validated"), &base)?;
    warn_all(opts.quiet, &domain.warnings());
    let sweep = config.sweep.as_ref().expect("validated");
    let filament = config.filament.as_ref().expect("validated");
    let c = &config.constants;

    let eig = solve_domain_spectrum(&domain, sweep.eigenvalues, opts)?;
    let mut enum_opts = EnumerationOptions::new(sweep.n_max);
    enum_opts.k_max = sweep.k_max;
    enum_opts.include_n_zero = sweep.include_n_zero;
    let levels = enumerate_levels(c, filament.r, &eig, &enum_opts)?;

    let out_dir = opts.out.clone().unwrap_or_else(|| config.output.dir.clone());
    let mut writer = OutputWriter::new(&out_dir)?;
    let hash = config_hash(config_path)?;

    let mut csv = String::from(
        "n,m,k,lambda,gamma_exact,gamma_series,base,form_factor,fine_structure,residual,integer_offset,sector,multiplicity\n",
    );
    for level in &levels {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            level.qn.n,
            level.qn.m,
            level.qn.k,
            fmt_float(level.lambda),
            fmt_float(level.gamma_exact),
            fmt_float(level.gamma_series),
            fmt_float(level.base),
            fmt_float(level.form_factor),
            fmt_float(level.fine_structure),
            fmt_float(level.residual),
            fmt_float(level.integer_offset()),
            level.sector(),
            level.multiplicity
        );
    }
    writer.write("levels.csv", &csv)?;

    if levels.is_empty() {
        writer.note("selection rules exclude every (n, m, k); empty level table");
        writer.write("summary.txt", "levels: 0\nnote: selection rules exclude everything\n")?;
        writer.manifest("spectrum", Some((config_path, &hash)))?;
        say(opts.quiet, "selection rules exclude everything; empty table written");
        return Ok(SpectrumReport {
            level_count: 0,
            max_correction: 0.0,
            max_residual: 0.0,
            offset_bound: 0.0,
            max_offset: 0.0,
        });
    }

    let hist = peak_histogram(&levels, sweep.bin_width)?;
    let mut hist_csv = String::from("bin_center,count\n");
    for (center, count) in &hist.bins {
        let _ = writeln!(hist_csv, "{},{}", fmt_float(*center), count);
    }
    writer.write("histogram.csv", &hist_csv)?;
    if config.output.gnuplot {
        let mut dat = String::from("# mu_v*Gamma/hbar histogram\n# bin_center count\n");
        for (center, count) in &hist.bins {
            let _ = writeln!(dat, "{} {}", fmt_float(*center), count);
        }
        writer.write("histogram.dat", &dat)?;
    }

    // rigorous offset bound: with a = (L lambda/(pi n))^2 <= 1 and
    // b = 8 eps^2 beta k <= eps^2 the exact level obeys
    // |mu_v Gamma/hbar - n| <= n max(sqrt(1+eps^2 a_max)-1, 1-1/sqrt(1+b_max))
    let s = derive_scales(c)?;
    let eps2 = c.epsilon * c.epsilon;
    let bound = levels
        .iter()
        .filter(|l| l.qn.n > 0)
        .map(|l| {
            let a = (c.l * l.lambda / (std::f64::consts::PI * l.qn.n as f64)).powi(2);
            let b_max = 8.0 * eps2 * s.beta * k_cap(c, sweep) as f64;
            let up = (1.0 + eps2 * a).sqrt() - 1.0;
            let down = 1.0 - 1.0 / (1.0 + b_max).sqrt();
            l.qn.n as f64 * up.max(down)
        })
        .fold(0.0, f64::max);
    let max_offset = hist.offsets.iter().copied().fold(0.0, f64::max);
    let max_correction = levels
        .iter()
        .map(|l| eps2 * (l.form_factor.abs().max(l.fine_structure.abs())))
        .fold(0.0, f64::max);
    let max_residual = levels.iter().map(|l| l.residual).fold(0.0, f64::max);

    let mut summary = String::new();
    let _ = writeln!(summary, "levels: {}", levels.len());
    let _ = writeln!(summary, "n_max: {}", sweep.n_max);
    let _ = writeln!(summary, "k_rule_max: {}", crate::spectrum::k_max_rule(c));
    let _ = writeln!(summary, "max_correction: {}", fmt_float(max_correction));
    let _ = writeln!(summary, "max_residual: {}", fmt_float(max_residual));
    let _ = writeln!(summary, "offset_bound: {}", fmt_float(bound));
    let _ = writeln!(summary, "max_integer_offset: {}", fmt_float(max_offset));
    writer.write("summary.txt", &summary)?;
    writer.manifest("spectrum", Some((config_path, &hash)))?;
    say(
        opts.quiet,
        &format!(
            "{} levels; max integer offset {:.3e} (bound {:.3e})",
            levels.len(),
            max_offset,
            bound
        ),
    );
    Ok(SpectrumReport {
        level_count: levels.len(),
        max_correction,
        max_residual,
        offset_bound: bound,
        max_offset,
    })
}

fn k_cap(c: &crate::constants::PhysicalConstants, sweep: &config::SweepBlock) -> u32 {
    let rule = crate::spectrum::k_max_rule(c);
    sweep.k_max.map_or(rule, |k| k.min(rule))
}
