//! Quantized circulation levels of the ring in the cylinder.
//!
//! The separated eigenvalue condition links the axial mode n, the
//! cross-section eigenvalue lambda_m and the oscillator occupation k to a
//! unique positive circulation
//!
//!   Gamma = (hbar / (pi alpha rho0 R^2)) sqrt((pi n / L)^2 + eps^2 lambda^2)
//!           / sqrt(1 + 8 eps^2 beta k),
//!
//! which expands to (hbar n / mu_v) [1 + eps^2 (form_factor + fine_structure)]
//! with form_factor = (L lambda / (pi n))^2 / 2 and fine_structure =
//! -4 beta k. In units of hbar/mu_v the levels sit near the integers n;
//! the corrections split each integer into a cluster.

use crate::constants::{derive_scales, PhysicalConstants};
use crate::error::{Error, Result};
use crate::laplace::EigenResult;
use std::f64::consts::PI;

/// Sector labels (n, m, k): axial mode, cross-section index, occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumNumbers {
    pub n: u32,
    pub m: usize,
    pub k: u32,
}

impl QuantumNumbers {
    pub fn new(n: u32, m: usize, k: u32) -> Self {
        QuantumNumbers { n, m, k }
    }

    /// Superselection sector label.
    pub fn sector(&self) -> String {
        format!("H({},{},{})", self.n, self.m, self.k)
    }
}

/// Admissibility of (n, m, k) for the perturbative level formula:
/// lambda_m <= pi n / L and 8 hbar k <= mu0 v0 R0.
pub fn rules_satisfied(qn: QuantumNumbers, lambda: f64, c: &PhysicalConstants) -> bool {
    lambda <= PI * qn.n as f64 / c.l && 8.0 * c.hbar * qn.k as f64 <= c.mu0 * c.v0 * c.r0
}

/// Largest occupation the second rule admits.
pub fn k_max_rule(c: &PhysicalConstants) -> u32 {
    (c.mu0 * c.v0 * c.r0 / (8.0 * c.hbar)).floor() as u32
}

/// Positive root of the level condition. Well defined for every input
/// (the denominator is >= 1); rule violations are the caller's concern.
pub fn gamma_exact(qn: QuantumNumbers, lambda: f64, c: &PhysicalConstants, r: f64) -> f64 {
    let s = derive_scales(c).expect("constants validated");
    let eps2 = c.epsilon * c.epsilon;
    let axial = PI * qn.n as f64 / c.l;
    let numerator = (axial * axial + eps2 * lambda * lambda).sqrt();
    let denominator = (1.0 + 8.0 * eps2 * s.beta * qn.k as f64).sqrt();
    c.hbar / (PI * s.alpha * c.rho0 * r * r) * numerator / denominator
}

/// One circulation level with its correction breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculationLevel {
    pub qn: QuantumNumbers,
    /// Cross-section eigenvalue lambda_m entering this level.
    pub lambda: f64,
    /// Exact positive root of the level condition.
    pub gamma_exact: f64,
    /// Series value base * (1 + eps^2 (form_factor + fine_structure)).
    pub gamma_series: f64,
    /// Leading term hbar n / mu_v.
    pub base: f64,
    /// Geometry correction (L lambda / (pi n))^2 / 2, dimensionless.
    pub form_factor: f64,
    /// Occupation correction -4 beta k, dimensionless.
    pub fine_structure: f64,
    /// |gamma_exact - gamma_series|.
    pub residual: f64,
    /// mu_v Gamma_exact / hbar, the level index near the integer n.
    pub dimensionless: f64,
    /// Number of degenerate cross-section modes sharing this level.
    pub multiplicity: usize,
}

impl CirculationLevel {
    pub fn sector(&self) -> String {
        self.qn.sector()
    }

    /// Distance of the dimensionless level from the nearest integer.
    pub fn integer_offset(&self) -> f64 {
        (self.dimensionless - self.dimensionless.round()).abs()
    }
}

/// Evaluates one level: exact root, series value and the correction split.
pub fn gamma_series(
    qn: QuantumNumbers,
    lambda: f64,
    c: &PhysicalConstants,
    r: f64,
) -> CirculationLevel {
    let s = derive_scales(c).expect("constants validated");
    let eps2 = c.epsilon * c.epsilon;
    let mu_v = c.vortex_mass(r);
    let base = c.hbar * qn.n as f64 / mu_v;
    let (form_factor, series) = if qn.n == 0 {
        // no leading term at n = 0; report the exact root as the series
        // value and a zero form factor
        (0.0, gamma_exact(qn, lambda, c, r))
    } else {
        let ff = 0.5 * (c.l * lambda / (PI * qn.n as f64)).powi(2);
        let fs = -4.0 * s.beta * qn.k as f64;
        (ff, base * (1.0 + eps2 * (ff + fs)))
    };
    let fine_structure = -4.0 * s.beta * qn.k as f64;
    let exact = gamma_exact(qn, lambda, c, r);
    CirculationLevel {
        qn,
        lambda,
        gamma_exact: exact,
        gamma_series: series,
        base,
        form_factor,
        fine_structure,
        residual: (exact - series).abs(),
        dimensionless: mu_v * exact / c.hbar,
        multiplicity: 1,
    }
}

#[derive(Debug, Clone)]
pub struct EnumerationOptions {
    /// Axial modes run 1..=n_max.
    pub n_max: u32,
    /// Cap on the occupation; `None` means the rule bound floor(1/(8 beta)).
    pub k_max: Option<u32>,
    /// Also emit the lambda-only levels at n = 0 (outside the perturbative
    /// regime; off by default).
    pub include_n_zero: bool,
}

impl EnumerationOptions {
    pub fn new(n_max: u32) -> Self {
        EnumerationOptions {
            n_max,
            k_max: None,
            include_n_zero: false,
        }
    }
}

/// All admissible levels for the given eigenvalue table, sorted by
/// gamma_exact. Degenerate cross-section eigenvalues produce one table row
/// with the group multiplicity. Fails when the table cannot prove it covers
/// every admissible m at n_max.
pub fn enumerate_levels(
    c: &PhysicalConstants,
    r: f64,
    eig: &EigenResult,
    opts: &EnumerationOptions,
) -> Result<Vec<CirculationLevel>> {
    c.validate()?;
    if eig.entries.is_empty() {
        return Err(Error::validation("eigenvalues", "empty table"));
    }
    let cutoff = PI * opts.n_max as f64 / c.l;
    if eig.max_lambda() <= cutoff {
        return Err(Error::IncompleteEigenTable {
            have: eig.max_lambda(),
            m_have: eig.entries.len(),
            need: cutoff,
        });
    }
    let k_rule = k_max_rule(c);
    let k_hi = opts.k_max.map_or(k_rule, |k| k.min(k_rule));
    let groups = eig.degenerate_groups();

    let mut levels = Vec::new();
    let mut n_values: Vec<u32> = (1..=opts.n_max).collect();
    if opts.include_n_zero && c.epsilon > 0.0 {
        n_values.insert(0, 0);
    }
    for n in n_values {
        for group in &groups {
            let head = &eig.entries[group[0]];
            let admissible = n > 0 && head.lambda <= PI * n as f64 / c.l;
            if !admissible && n != 0 {
                continue;
            }
            for k in 0..=k_hi {
                let qn = QuantumNumbers::new(n, head.m, k);
                let mut level = gamma_series(qn, head.lambda, c, r);
                level.multiplicity = group.len();
                levels.push(level);
            }
        }
    }
    levels.sort_by(|a, b| {
        a.gamma_exact
            .partial_cmp(&b.gamma_exact)
            .unwrap()
            .then(a.qn.cmp(&b.qn))
    });
    Ok(levels)
}

/// Histogram of the dimensionless levels mu_v Gamma / hbar.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub bin_width: f64,
    /// (bin center, count), ascending, empty bins omitted.
    pub bins: Vec<(f64, usize)>,
    /// Per-level offset from the nearest integer, aligned with the input.
    pub offsets: Vec<f64>,
}

/// Bins the levels' dimensionless circulation values.
pub fn peak_histogram(levels: &[CirculationLevel], bin_width: f64) -> Result<Histogram> {
    if levels.is_empty() {
        return Err(Error::validation("levels", "empty level list"));
    }
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::validation("bin_width", "must be positive"));
    }
    let mut counts: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    for level in levels {
        let idx = (level.dimensionless / bin_width).floor() as i64;
        *counts.entry(idx).or_insert(0) += 1;
    }
    Ok(Histogram {
        bin_width,
        bins: counts
            .into_iter()
            .map(|(idx, c)| ((idx as f64 + 0.5) * bin_width, c))
            .collect(),
        offsets: levels.iter().map(|l| l.integer_offset()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::{eigen_analytic, DomainSpec};
    use approx::assert_relative_eq;

    fn constants(eps: f64, beta: f64, l: f64) -> PhysicalConstants {
        // unit mu0, v0, r0 so that beta = hbar
        PhysicalConstants::new(1.0, 1.0, 1.0, l, 1.0, beta, eps).unwrap()
    }

    const Z01: f64 = 2.404825557695773;

    #[test]
    fn eps_zero_reproduces_integer_levels() {
        let c = constants(0.0, 1e-3, 10.0);
        for n in 1..6 {
            let g = gamma_exact(QuantumNumbers::new(n, 1, 0), Z01, &c, 1.0);
            let mu_v = c.vortex_mass(1.0);
            assert_relative_eq!(mu_v * g / c.hbar, n as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_root_matches_independent_oracle() {
        // n = 8, unit disk, L = 10 R0, eps = 0.1, beta = 1e-3, k = 0:
        // frozen from a 40-digit evaluation of the root formula
        let c = constants(0.1, 1e-3, 10.0);
        let g = gamma_exact(QuantumNumbers::new(8, 1, 0), Z01, &c, 1.0);
        let mu_v = c.vortex_mass(1.0);
        assert_relative_eq!(mu_v * g / c.hbar, 8.036539009237093, max_relative = 1e-13);
        // and for k = 5
        let g5 = gamma_exact(QuantumNumbers::new(8, 1, 5), Z01, &c, 1.0);
        assert_relative_eq!(mu_v * g5 / c.hbar, 8.034932183466912, max_relative = 1e-13);
        // series value of the same level
        let level = gamma_series(QuantumNumbers::new(8, 1, 0), Z01, &c, 1.0);
        assert_relative_eq!(
            mu_v * level.gamma_series / c.hbar,
            8.036622452936845,
            max_relative = 1e-13
        );
    }

    #[test]
    fn form_factor_raises_and_k_lowers() {
        let c = constants(0.05, 1e-3, 10.0);
        let base_level = gamma_series(QuantumNumbers::new(8, 1, 0), Z01, &c, 1.0);
        assert!(base_level.gamma_exact > base_level.base);
        let k1 = gamma_series(QuantumNumbers::new(8, 1, 1), Z01, &c, 1.0);
        let k2 = gamma_series(QuantumNumbers::new(8, 1, 2), Z01, &c, 1.0);
        assert!(k1.gamma_exact < base_level.gamma_exact);
        // fine structure is linear in k
        assert_relative_eq!(
            k2.fine_structure,
            2.0 * k1.fine_structure,
            max_relative = 1e-15
        );
    }

    #[test]
    fn monotonicity_in_quantum_numbers() {
        let c = constants(0.1, 1e-4, 5.0);
        let g = |n, lam, k| gamma_exact(QuantumNumbers::new(n, 1, k), lam, &c, 0.5);
        assert!(g(2, Z01, 0) > g(1, Z01, 0));
        assert!(g(1, 3.8, 0) > g(1, Z01, 0));
        assert!(g(1, Z01, 3) < g(1, Z01, 0));
    }

    #[test]
    fn residual_is_fourth_order_in_eps()
    {
        // beta tiny so the eps^4 term dominates the remainder
        let l = 10.0;
        let qn = QuantumNumbers::new(3, 1, 1);
        let res = |eps: f64| {
            let c = constants(eps, 1e-6, l);
            let level = gamma_series(qn, Z01, &c, 1.0);
            level.residual / level.base
        };
        let r1 = res(0.1);
        let r2 = res(0.05);
        assert!(r1 / r2 >= 8.0, "ratio {}", r1 / r2);
        assert!(r1 / r2 <= 32.0, "ratio {}", r1 / r2);
    }

    #[test]
    fn vortex_mass_identity() {
        // alpha rho0 R^2 L = mu0 (R/R0)^2 exactly
        let c = PhysicalConstants::new(1.7, 0.8, 1.3, 4.2, 0.6, 1e-4, 0.1).unwrap();
        let s = derive_scales(&c).unwrap();
        for r in [0.1, 0.77, 1.9] {
            let via_alpha = s.alpha * c.rho0 * r * r * c.l;
            assert_relative_eq!(via_alpha, c.vortex_mass(r), max_relative = 1e-14);
        }
    }

    #[test]
    fn fine_structure_scales_as_hbar_squared() {
        // sweep hbar at fixed everything else; the absolute k-correction of
        // the exact root must scale with slope 2 on a log-log line
        let l = 10.0;
        let correction = |hbar: f64| {
            let c = PhysicalConstants::new(1.0, 1.0, 1.0, l, 1.0, hbar, 1e-3).unwrap();
            let with_k = gamma_exact(QuantumNumbers::new(2, 1, 3), Z01, &c, 1.0);
            let without = gamma_exact(QuantumNumbers::new(2, 1, 0), Z01, &c, 1.0);
            (with_k - without).abs()
        };
        let c1 = correction(1e-4);
        let c2 = correction(2e-4);
        let slope = (c2 / c1).ln() / 2.0_f64.ln();
        assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn quantization_bridge_is_exact() {
        // the classical constraint carries 4 eps^2 |j_{-1}|^2 while the
        // level condition carries eps^2 * 8 hbar k/(mu0 v0 R0); the two
        // prefactors are linked by the oscillator normalization
        // |j_{-1}|^2 -> (hbar / (t0 E0)) k, and t0 E0 = mu0 v0 R0 / 2
        // makes the bridge exact: 4 hbar/(t0 E0) = 8 hbar/(mu0 v0 R0).
        for (rho0, v0, r0, l, mu0, hbar) in [
            (1.0, 1.0, 1.0, 1.0, 1.0, 1e-3),
            (1.3, 0.7, 2.1, 5.0, 0.9, 2e-4),
            (0.2, 3.0, 0.5, 11.0, 4.0, 1e-6),
        ] {
            let c = PhysicalConstants::new(rho0, v0, r0, l, mu0, hbar, 0.1).unwrap();
            let s = derive_scales(&c).unwrap();
            let constraint_side = 4.0 * c.hbar / (s.t0 * s.e0);
            let level_side = 8.0 * c.hbar / (c.mu0 * c.v0 * c.r0);
            assert_relative_eq!(constraint_side, level_side, max_relative = 1e-14);
        }
    }

    #[test]
    fn residual_constant_is_bounded_over_a_sweep() {
        // under the selection rules both corrections are at most eps^2, so
        // residual / (base eps^4) stays below an order-one constant
        let c = constants(0.1, 1e-3, 10.0);
        let eig = eigen_analytic(&DomainSpec::disk(1.0).unwrap(), 14).unwrap();
        let levels =
            enumerate_levels(&c, 1.0, &eig, &EnumerationOptions::new(24)).unwrap();
        let eps4 = c.epsilon.powi(4);
        let worst = levels
            .iter()
            .map(|l| l.residual / (l.base * eps4))
            .fold(0.0, f64::max);
        assert!(worst < 1.0, "residual constant {worst}");
        assert!(worst > 0.0);
    }

    #[test]
    fn k_rule_arithmetic() {
        let c = constants(0.1, 1e-3, 10.0);
        assert_eq!(k_max_rule(&c), 125);
        assert!(rules_satisfied(QuantumNumbers::new(8, 1, 125), Z01, &c));
        assert!(!rules_satisfied(QuantumNumbers::new(8, 1, 126), Z01, &c));
        // lambda rule
        assert!(!rules_satisfied(QuantumNumbers::new(1, 1, 0), Z01, &c));
    }

    #[test]
    fn enumeration_selects_admissible_triples() {
        let c = constants(0.1, 1e-2, 10.0); // k rule admits 0..12
        let eig = eigen_analytic(&DomainSpec::disk(1.0).unwrap(), 30).unwrap();
        let levels =
            enumerate_levels(&c, 1.0, &eig, &EnumerationOptions::new(8)).unwrap();
        assert!(!levels.is_empty());
        for level in &levels {
            assert!(rules_satisfied(level.qn, level.lambda, &c));
            assert!(level.gamma_exact > 0.0);
        }
        // n = 8 admits only m = 1 on the unit disk (lambda_2 = 3.83 > 8 pi/10)
        assert!(levels
            .iter()
            .all(|l| l.qn.n < 8 || l.qn.m == 1));
        // sorted ascending
        for w in levels.windows(2) {
            assert!(w[0].gamma_exact <= w[1].gamma_exact);
        }
        // k runs the full rule range for n = 8
        let k_count = levels.iter().filter(|l| l.qn.n == 8).count();
        assert_eq!(k_count, 13);
    }

    #[test]
    fn enumeration_merges_degenerate_disk_levels() {
        let c = constants(0.05, 1e-2, 10.0); // cutoff 2 pi admits the m = 2, 3 pair
        let eig = eigen_analytic(&DomainSpec::disk(1.0).unwrap(), 30).unwrap();
        let levels =
            enumerate_levels(&c, 1.0, &eig, &EnumerationOptions::new(20)).unwrap();
        let doubled: Vec<_> = levels.iter().filter(|l| l.multiplicity == 2).collect();
        assert!(!doubled.is_empty(), "disk degeneracies should appear");
        // the merged row represents two distinct m-indices, so no second row
        // shares its (n, k, lambda)
        for d in &doubled {
            let twins = levels
                .iter()
                .filter(|l| {
                    l.qn.n == d.qn.n && l.qn.k == d.qn.k && (l.lambda - d.lambda).abs() < 1e-12
                })
                .count();
            assert_eq!(twins, 1);
        }
    }

    #[test]
    fn enumeration_fails_on_short_tables() {
        let c = constants(0.1, 1e-3, 10.0);
        let eig = eigen_analytic(&DomainSpec::disk(1.0).unwrap(), 1).unwrap();
        match enumerate_levels(&c, 1.0, &eig, &EnumerationOptions::new(30)) {
            Err(Error::IncompleteEigenTable { need, .. }) => {
                assert_relative_eq!(need, PI * 3.0, max_relative = 1e-12);
            }
            other => panic!("expected incompleteness error, got {other:?}"),
        }
    }

    #[test]
    fn enumeration_empty_when_rules_exclude_everything() {
        // L large enough that lambda_1 > pi n / L for all n <= n_max
        let c = constants(0.1, 1e-3, 5.0);
        let eig = eigen_analytic(&DomainSpec::disk(1.0).unwrap(), 3).unwrap();
        let levels = enumerate_levels(&c, 1.0, &eig, &EnumerationOptions::new(1)).unwrap();
        assert!(levels.is_empty());
    }

    #[test]
    fn n_zero_levels_are_opt_in() {
        let c = constants(0.1, 1e-2, 10.0);
        let eig = eigen_analytic(&DomainSpec::disk(1.0).unwrap(), 14).unwrap();
        let mut opts = EnumerationOptions::new(8);
        opts.k_max = Some(1);
        let default_levels = enumerate_levels(&c, 1.0, &eig, &opts).unwrap();
        assert!(default_levels.iter().all(|l| l.qn.n >= 1));

        opts.include_n_zero = true;
        let with_zero = enumerate_levels(&c, 1.0, &eig, &opts).unwrap();
        let zeros: Vec<_> = with_zero.iter().filter(|l| l.qn.n == 0).collect();
        assert!(!zeros.is_empty());
        for level in &zeros {
            // the lambda-only branch: Gamma > 0, proportional to eps lambda
            assert!(level.gamma_exact > 0.0);
            assert!(level.gamma_exact < with_zero.last().unwrap().gamma_exact);
            assert_eq!(level.sector(), format!("H(0,{},{})", level.qn.m, level.qn.k));
        }
        // the flag does nothing in the eps = 0 limit
        let c0 = constants(0.0, 1e-2, 10.0);
        let frozen = enumerate_levels(&c0, 1.0, &eig, &opts).unwrap();
        assert!(frozen.iter().all(|l| l.qn.n >= 1));
    }

    #[test]
    fn histogram_bins_and_offsets() {
        let c = constants(0.0, 1e-3, 10.0);
        let eig = eigen_analytic(&DomainSpec::disk(1.0).unwrap(), 12).unwrap();
        let mut opts = EnumerationOptions::new(8);
        opts.k_max = Some(2);
        let levels = enumerate_levels(&c, 1.0, &eig, &opts).unwrap();
        let hist = peak_histogram(&levels, 0.05).unwrap();
        // eps = 0: all mass exactly on the integers
        for off in &hist.offsets {
            assert!(*off < 1e-12);
        }
        let total: usize = hist.bins.iter().map(|(_, c)| *c).sum();
        assert_eq!(total, levels.len());

        // single level: one bin
        let single = &levels[..1];
        let h1 = peak_histogram(single, 0.1).unwrap();
        assert_eq!(h1.bins.len(), 1);
        assert_eq!(h1.bins[0].1, 1);
    }
}
