//! Dirichlet eigenvalues of -Laplace on the cylinder cross-section.
//!
//! Disk and rectangle sections have closed-form spectra (Bessel zeros and
//! sine modes); arbitrary sections come in as binary cell masks and go
//! through a five-point finite-difference operator whose boundary-adjacent
//! stencils use the actual distance to the section boundary along each axis.
//! Two resolutions (h and h/2) feed a Richardson extrapolation, which also
//! yields the per-eigenvalue error estimate |lambda(h) - lambda(h/2)|/3.
//!
//! All lengths are in units of the scale length R0.

use crate::bessel::jn_zero;
use crate::eigsolve::{smallest_eigenvalues, SparseMatrix};
use crate::error::{Error, Result};

/// Relative spacing below which two eigenvalues count as one degenerate
/// level. Exact degeneracies (disk, square) split only at rounding level.
const DEGENERACY_RTOL: f64 = 1e-9;

/// Residual tolerance of the iterative eigensolver.
const SOLVER_TOL: f64 = 1e-10;

/// Cross-section description, lengths in units of R0.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Disk { radius: f64 },
    Rectangle { a: f64, b: f64 },
    Mask(GridMask),
}

impl DomainSpec {
    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::validation("radius", "must be positive"));
        }
        Ok(DomainSpec::Disk { radius })
    }

    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::validation("a/b", "rectangle sides must be positive"));
        }
        Ok(DomainSpec::Rectangle { a, b })
    }

    pub fn mask(mask: GridMask) -> Result<Self> {
        let components = mask.component_count();
        if components != 1 {
            return Err(Error::DisconnectedMask { components });
        }
        Ok(DomainSpec::Mask(mask))
    }

    /// Advisory checks; the scale length bounds the section diameter, so a
    /// disk radius above 1 (in units of R0) is suspicious.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let DomainSpec::Disk { radius } = self {
            if *radius > 1.0 {
                out.push(format!(
                    "disk radius {radius} exceeds the scale length R0; \
                     the diameter bound on R0 is violated"
                ));
            }
        }
        out
    }

    /// Characteristic extent used to pick default grid resolutions.
    pub fn extent(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius } => 2.0 * radius,
            DomainSpec::Rectangle { a, b } => a.max(*b),
            DomainSpec::Mask(m) => m.h * m.nx.max(m.ny) as f64,
        }
    }
}

/// Binary cell mask: cell (i, j) is part of the section iff
/// `cells[j * nx + i]`. Cell size `h` is in units of R0.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMask {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub cells: Vec<bool>,
}

impl GridMask {
    pub fn new(nx: usize, ny: usize, h: f64, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != nx * ny {
            return Err(Error::validation(
                "mask",
                format!("{} cells for a {nx} x {ny} grid", cells.len()),
            ));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::validation("h", "cell size must be positive"));
        }
        if !cells.iter().any(|&c| c) {
            return Err(Error::validation("mask", "no interior cells"));
        }
        Ok(GridMask { nx, ny, h, cells })
    }

    /// Parses rows of 0/1 characters, top row first. Whitespace-only lines
    /// are skipped; all rows must have equal width.
    pub fn from_text(text: &str, h: f64) -> Result<Self> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        if rows.is_empty() {
            return Err(Error::validation("mask", "empty mask text"));
        }
        let nx = rows[0].len();
        let ny = rows.len();
        let mut cells = vec![false; nx * ny];
        for (r, line) in rows.iter().enumerate() {
            if line.len() != nx {
                return Err(Error::validation(
                    "mask",
                    format!("row {} has width {}, expected {nx}", r + 1, line.len()),
                ));
            }
            // text row 0 is the top of the domain
            let j = ny - 1 - r;
            for (i, ch) in line.chars().enumerate() {
                cells[j * nx + i] = match ch {
                    '1' => true,
                    '0' => false,
                    other => {
                        return Err(Error::validation(
                            "mask",
                            format!("unexpected character {other:?} in row {}", r + 1),
                        ))
                    }
                };
            }
        }
        GridMask::new(nx, ny, h, cells)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.ny {
            let j = self.ny - 1 - r;
            for i in 0..self.nx {
                out.push(if self.cells[j * self.nx + i] { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Rasterizes a polygon (even-odd rule on cell centers) on a grid of
    /// cell size `h` covering its bounding box.
    pub fn rasterize_polygon(vertices: &[[f64; 2]], h: f64) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::validation("polygon", "need at least 3 vertices"));
        }
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for v in vertices {
            x0 = x0.min(v[0]);
            y0 = y0.min(v[1]);
            x1 = x1.max(v[0]);
            y1 = y1.max(v[1]);
        }
        let nx = ((x1 - x0) / h).ceil().max(1.0) as usize;
        let ny = ((y1 - y0) / h).ceil().max(1.0) as usize;
        let mut cells = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let px = x0 + (i as f64 + 0.5) * h;
                let py = y0 + (j as f64 + 0.5) * h;
                cells[j * nx + i] = point_in_polygon(px, py, vertices);
            }
        }
        GridMask::new(nx, ny, h, cells)
    }

    /// Number of 4-connected components of the interior.
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..self.cells.len() {
            if !self.cells[start] || seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(idx) = stack.pop() {
                let (i, j) = (idx % self.nx, idx / self.nx);
                let mut push = |ii: usize, jj: usize, stack: &mut Vec<usize>| {
                    let nidx = jj * self.nx + ii;
                    if self.cells[nidx] && !seen[nidx] {
                        seen[nidx] = true;
                        stack.push(nidx);
                    }
                };
                if i > 0 {
                    push(i - 1, j, &mut stack);
                }
                if i + 1 < self.nx {
                    push(i + 1, j, &mut stack);
                }
                if j > 0 {
                    push(i, j - 1, &mut stack);
                }
                if j + 1 < self.ny {
                    push(i, j + 1, &mut stack);
                }
            }
        }
        components
    }

    /// Splits every cell in four; the covered region is unchanged.
    pub fn refined(&self) -> GridMask {
        let nx = 2 * self.nx;
        let ny = 2 * self.ny;
        let mut cells = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                cells[j * nx + i] = self.cells[(j / 2) * self.nx + i / 2];
            }
        }
        GridMask {
            nx,
            ny,
            h: self.h / 2.0,
            cells,
        }
    }
}

fn point_in_polygon(px: f64, py: f64, vertices: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = vertices.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (vertices[i][0], vertices[i][1]);
        let (xj, yj) = (vertices[j][0], vertices[j][1]);
        if (yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// How an eigenvalue list was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum EigenMethod {
    Analytic,
    /// Finite differences at the two stated resolutions, extrapolated.
    Grid { h: f64, h_half: f64 },
}

/// One eigenvalue of -Laplace with Dirichlet boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenEntry {
    /// 1-based index m in ascending order (degenerate values get distinct m).
    pub m: usize,
    /// Eigenvalue lambda_m^2 (units 1/length^2).
    pub lambda_sq: f64,
    /// lambda_m = sqrt(lambda_sq) (units 1/length).
    pub lambda: f64,
    /// Absolute uncertainty on lambda_sq.
    pub error_estimate: f64,
    /// Size of the degenerate group this entry belongs to.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub entries: Vec<EigenEntry>,
    pub method: EigenMethod,
}

impl EigenResult {
    /// Groups of indices sharing one (nearly) degenerate eigenvalue,
    /// in ascending order.
    pub fn degenerate_groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (idx, e) in self.entries.iter().enumerate() {
            if let Some(last) = groups.last_mut() {
                let head = &self.entries[last[0]];
                if (e.lambda_sq - head.lambda_sq).abs()
                    <= DEGENERACY_RTOL * head.lambda_sq.abs().max(1e-300)
                {
                    last.push(idx);
                    continue;
                }
            }
            groups.push(vec![idx]);
        }
        groups
    }

    pub fn max_lambda(&self) -> f64 {
        self.entries.last().map(|e| e.lambda).unwrap_or(0.0)
    }
}

fn finish(mut raw: Vec<(f64, f64)>, m: usize, method: EigenMethod) -> EigenResult {
    // raw: (lambda_sq, error_estimate), presorted ascending
    raw.truncate(m);
    let mut entries: Vec<EigenEntry> = raw
        .into_iter()
        .enumerate()
        .map(|(i, (ls, err))| EigenEntry {
            m: i + 1,
            lambda_sq: ls,
            lambda: ls.sqrt(),
            error_estimate: err,
            multiplicity: 1,
        })
        .collect();
    let result = EigenResult {
        entries: std::mem::take(&mut entries),
        method,
    };
    let groups = result.degenerate_groups();
    let mut entries = result.entries;
    for g in groups {
        for &i in &g {
            entries[i].multiplicity = g.len();
        }
    }
    EigenResult {
        entries,
        method: result.method,
    }
}

/// Closed-form spectrum for disk and rectangle sections.
///
/// Disk of radius a: lambda^2 = (z_{nu,s}/a)^2 over the positive zeros of
/// J_nu, with multiplicity 2 for nu >= 1. Rectangle a x b:
/// lambda^2 = pi^2 (i^2/a^2 + j^2/b^2), i, j >= 1.
pub fn eigen_analytic(domain: &DomainSpec, m: usize) -> Result<EigenResult> {
    if m == 0 {
        return Err(Error::validation("M", "need at least one eigenvalue"));
    }
    match domain {
        DomainSpec::Disk { radius } => {
            let mut vals: Vec<f64> = Vec::new();
            let mut cap = 10.0_f64.max(2.0 * (m as f64).sqrt());
            loop {
                vals.clear();
                let mut nu = 0u32;
                loop {
                    let first = jn_zero(nu, 1);
                    if first > cap {
                        break;
                    }
                    let mut s = 1u32;
                    loop {
                        let z = if s == 1 { first } else { jn_zero(nu, s) };
                        if z > cap {
                            break;
                        }
                        vals.push(z);
                        if nu >= 1 {
                            vals.push(z); // two angular orientations
                        }
                        s += 1;
                    }
                    nu += 1;
                }
                if vals.len() >= m {
                    break;
                }
                cap *= 1.5;
            }
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let raw = vals
                .iter()
                .map(|z| {
                    let ls = (z / radius) * (z / radius);
                    (ls, 1e-13 * ls)
                })
                .collect();
            Ok(finish(raw, m, EigenMethod::Analytic))
        }
        DomainSpec::Rectangle { a, b } => {
            let mut bound = std::f64::consts::PI.powi(2) * (1.0 / (a * a) + 1.0 / (b * b));
            let mut vals: Vec<f64> = Vec::new();
            loop {
                vals.clear();
                let imax = (a * bound.sqrt() / std::f64::consts::PI).ceil() as usize;
                let jmax = (b * bound.sqrt() / std::f64::consts::PI).ceil() as usize;
                for i in 1..=imax.max(1) {
                    for j in 1..=jmax.max(1) {
                        let ls = std::f64::consts::PI.powi(2)
                            * ((i * i) as f64 / (a * a) + (j * j) as f64 / (b * b));
                        if ls <= bound {
                            vals.push(ls);
                        }
                    }
                }
                if vals.len() >= m {
                    break;
                }
                bound *= 2.0;
            }
            vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let raw = vals.iter().map(|&ls| (ls, 1e-13 * ls)).collect();
            Ok(finish(raw, m, EigenMethod::Analytic))
        }
        DomainSpec::Mask(_) => Err(Error::Unsupported(
            "no closed-form spectrum for mask sections; use the grid solver".into(),
        )),
    }
}

enum Direction {
    East,
    West,
    North,
    South,
}

/// Assembles the boundary-fitted five-point operator. `inside` marks grid
/// cells whose center belongs to the section; `boundary_dist` gives the
/// distance from a center to the section boundary along the axis, used when
/// the neighbor center is outside.
fn assemble(
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    inside: &dyn Fn(usize, usize) -> bool,
    boundary_dist: &dyn Fn(usize, usize, Direction) -> f64,
) -> Result<SparseMatrix> {
    let mut id = vec![usize::MAX; nx * ny];
    let mut nodes = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if inside(i, j) {
                id[j * nx + i] = nodes.len();
                nodes.push((i, j));
            }
        }
    }
    let dim = nodes.len();
    if dim == 0 {
        return Err(Error::validation("grid", "no interior cells at this resolution"));
    }
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);

    let clamp = |d: f64, h: f64| d.clamp(1e-9 * h, h);
    for &(i, j) in &nodes {
        let neighbor = |di: isize, dj: isize| -> Option<usize> {
            let ii = i as isize + di;
            let jj = j as isize + dj;
            if ii < 0 || jj < 0 || ii >= nx as isize || jj >= ny as isize {
                return None;
            }
            let idx = id[jj as usize * nx + ii as usize];
            (idx != usize::MAX).then_some(idx)
        };
        let h_e = neighbor(1, 0)
            .map(|_| hx)
            .unwrap_or_else(|| clamp(boundary_dist(i, j, Direction::East), hx));
        let h_w = neighbor(-1, 0)
            .map(|_| hx)
            .unwrap_or_else(|| clamp(boundary_dist(i, j, Direction::West), hx));
        let h_n = neighbor(0, 1)
            .map(|_| hy)
            .unwrap_or_else(|| clamp(boundary_dist(i, j, Direction::North), hy));
        let h_s = neighbor(0, -1)
            .map(|_| hy)
            .unwrap_or_else(|| clamp(boundary_dist(i, j, Direction::South), hy));

        // -Laplace with per-direction spacings: diagonal 2/(hE hW) + 2/(hN hS),
        // neighbor coupling -2/(h_d (h_d + h_opp))
        let mut push = |col: usize, val: f64| {
            col_idx.push(col);
            values.push(val);
        };
        push(id[j * nx + i], 2.0 / (h_e * h_w) + 2.0 / (h_n * h_s));
        if let Some(c) = neighbor(1, 0) {
            push(c, -2.0 / (h_e * (h_e + h_w)));
        }
        if let Some(c) = neighbor(-1, 0) {
            push(c, -2.0 / (h_w * (h_e + h_w)));
        }
        if let Some(c) = neighbor(0, 1) {
            push(c, -2.0 / (h_n * (h_n + h_s)));
        }
        if let Some(c) = neighbor(0, -1) {
            push(c, -2.0 / (h_s * (h_n + h_s)));
        }
        row_ptr.push(col_idx.len());
    }
    Ok(SparseMatrix {
        dim,
        row_ptr,
        col_idx,
        values,
    })
}

fn operator_for(domain: &DomainSpec, cells_across: usize) -> Result<SparseMatrix> {
    match domain {
        DomainSpec::Disk { radius } => {
            let r = *radius;
            let n = cells_across;
            let h = 2.0 * r / n as f64;
            let center = |i: usize| -> f64 { -r + (i as f64 + 0.5) * h };
            let inside = move |i: usize, j: usize| -> bool {
                let (x, y) = (center(i), center(j));
                x * x + y * y < r * r
            };
            let dist = move |i: usize, j: usize, d: Direction| -> f64 {
                let (x, y) = (center(i), center(j));
                let (dx, dy) = match d {
                    Direction::East => (1.0, 0.0),
                    Direction::West => (-1.0, 0.0),
                    Direction::North => (0.0, 1.0),
                    Direction::South => (0.0, -1.0),
                };
                // first circle crossing along the ray
                let b = 2.0 * (x * dx + y * dy);
                let c = x * x + y * y - r * r;
                (-b + (b * b - 4.0 * c).sqrt()) / 2.0
            };
            assemble(n, n, h, h, &inside, &dist)
        }
        DomainSpec::Rectangle { a, b } => {
            // cells_across counts cells over the longer side
            let extent = a.max(*b);
            let nx = ((cells_across as f64) * a / extent).round().max(1.0) as usize;
            let ny = ((cells_across as f64) * b / extent).round().max(1.0) as usize;
            let hx = a / nx as f64;
            let hy = b / ny as f64;
            // every cell center is interior; walls sit half a cell beyond
            // the outermost centers
            let inside = |_i: usize, _j: usize| true;
            let dist = move |_i: usize, _j: usize, d: Direction| -> f64 {
                match d {
                    Direction::East | Direction::West => hx / 2.0,
                    Direction::North | Direction::South => hy / 2.0,
                }
            };
            assemble(nx, ny, hx, hy, &inside, &dist)
        }
        DomainSpec::Mask(mask) => {
            let m = mask.clone();
            let h = m.h;
            let cells = m.cells.clone();
            let nx = m.nx;
            let inside = move |i: usize, j: usize| cells[j * nx + i];
            // the section boundary of a mask is the cell-union boundary,
            // half a cell from the center
            let dist = move |_i: usize, _j: usize, _d: Direction| h / 2.0;
            assemble(m.nx, m.ny, h, h, &inside, &dist)
        }
    }
}

fn resolution_pair(domain: &DomainSpec, h: Option<f64>) -> Result<(DomainSpec, usize, f64)> {
    // returns (domain to use, coarse cells_across, coarse h)
    match domain {
        DomainSpec::Disk { .. } | DomainSpec::Rectangle { .. } => {
            let extent = domain.extent();
            let h = h.unwrap_or(extent / 128.0);
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::validation("h", "cell size must be positive"));
            }
            let across = (extent / h).round().max(1.0) as usize;
            if across < 32 {
                return Err(Error::validation(
                    "h",
                    format!("grid resolves only {across} cells across; need >= 32"),
                ));
            }
            Ok((domain.clone(), across, extent / across as f64))
        }
        DomainSpec::Mask(mask) => {
            if h.is_some() {
                return Err(Error::Unsupported(
                    "mask sections carry their own cell size; --grid-h applies to disk/rectangle"
                        .into(),
                ));
            }
            let across = mask.nx.max(mask.ny);
            if across < 32 {
                return Err(Error::validation(
                    "mask",
                    format!("mask resolves only {across} cells across; need >= 32"),
                ));
            }
            Ok((domain.clone(), across, mask.h))
        }
    }
}

/// Smallest `m` eigenvalues at a single grid resolution, no extrapolation.
/// `cells_across` counts cells over the section extent; masks are refined
/// from their stored resolution when `cells_across` exceeds it.
pub fn eigen_grid_single(
    domain: &DomainSpec,
    m: usize,
    cells_across: usize,
) -> Result<Vec<f64>> {
    let op = match domain {
        DomainSpec::Mask(mask) => {
            let base = mask.nx.max(mask.ny);
            let mut current = mask.clone();
            while current.nx.max(current.ny) < cells_across {
                current = current.refined();
            }
            if current.nx.max(current.ny) != cells_across && cells_across != base {
                return Err(Error::validation(
                    "cells_across",
                    format!("mask refines only to multiples of {base}"),
                ));
            }
            operator_for(&DomainSpec::Mask(current), cells_across)?
        }
        _ => operator_for(domain, cells_across)?,
    };
    smallest_eigenvalues(&op, m, SOLVER_TOL)
}

/// Grid spectrum with Richardson extrapolation from resolutions h and h/2.
///
/// For disk and rectangle sections `h` overrides the default extent/128;
/// mask sections always use their own cell size.
pub fn eigen_grid(domain: &DomainSpec, m: usize, h: Option<f64>) -> Result<EigenResult> {
    if m == 0 {
        return Err(Error::validation("M", "need at least one eigenvalue"));
    }
    if let DomainSpec::Mask(mask) = domain {
        let components = mask.component_count();
        if components != 1 {
            return Err(Error::DisconnectedMask { components });
        }
    }
    let (dom, across, h_eff) = resolution_pair(domain, h)?;
    let coarse = eigen_grid_single(&dom, m, across)?;
    let fine = eigen_grid_single(&dom, m, 2 * across)?;
    let raw: Vec<(f64, f64)> = coarse
        .iter()
        .zip(&fine)
        .map(|(&lc, &lf)| {
            let extrapolated = (4.0 * lf - lc) / 3.0;
            let err = (lf - lc).abs() / 3.0;
            (extrapolated, err)
        })
        .collect();
    Ok(finish(
        raw,
        m,
        EigenMethod::Grid {
            h: h_eff,
            h_half: h_eff / 2.0,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const DISK_L1: f64 = 5.783185962946783; // z_{0,1}^2, Bessel oracle
    const DISK_L2: f64 = 14.681970642123895; // z_{1,1}^2, double

    #[test]
    fn disk_analytic_spectrum() {
        let d = DomainSpec::disk(1.0).unwrap();
        let eig = eigen_analytic(&d, 6).unwrap();
        let want = [
            (DISK_L1, 1),
            (DISK_L2, 2),
            (DISK_L2, 2),
            (26.374616427163392, 2),
            (26.374616427163392, 2),
            (30.471262343662087, 1),
        ];
        for (e, (ls, mult)) in eig.entries.iter().zip(want) {
            assert_relative_eq!(e.lambda_sq, ls, max_relative = 1e-11);
            assert_eq!(e.multiplicity, mult);
        }
        assert!(eig.entries[0].lambda > 0.0);
    }

    #[test]
    fn disk_scaling_law() {
        let big = eigen_analytic(&DomainSpec::disk(2.0).unwrap(), 3).unwrap();
        let unit = eigen_analytic(&DomainSpec::disk(1.0).unwrap(), 3).unwrap();
        for (b, u) in big.entries.iter().zip(&unit.entries) {
            assert_relative_eq!(b.lambda_sq * 4.0, u.lambda_sq, max_relative = 1e-12);
        }
    }

    #[test]
    fn square_and_rectangle_closed_forms() {
        let sq = eigen_analytic(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 1).unwrap();
        assert_relative_eq!(
            sq.entries[0].lambda_sq,
            2.0 * std::f64::consts::PI.powi(2),
            max_relative = 1e-13
        );
        let rect = eigen_analytic(&DomainSpec::rectangle(2.0, 1.0).unwrap(), 2).unwrap();
        assert_relative_eq!(
            rect.entries[0].lambda_sq,
            std::f64::consts::PI.powi(2) * 1.25,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            rect.entries[1].lambda_sq,
            std::f64::consts::PI.powi(2) * 2.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn analytic_rejects_masks() {
        let mask = GridMask::from_text("111\n111\n111\n", 0.1).unwrap();
        let d = DomainSpec::Mask(mask);
        assert!(matches!(eigen_analytic(&d, 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn grid_disk_matches_bessel_oracle() {
        let d = DomainSpec::disk(1.0).unwrap();
        let eig = eigen_grid(&d, 3, Some(2.0 / 64.0)).unwrap();
        assert!((eig.entries[0].lambda_sq - DISK_L1).abs() / DISK_L1 < 5e-3);
        assert!((eig.entries[1].lambda_sq - DISK_L2).abs() / DISK_L2 < 5e-3);
        // the degenerate pair stays together
        assert_relative_eq!(
            eig.entries[1].lambda_sq,
            eig.entries[2].lambda_sq,
            max_relative = 1e-6
        );
        match eig.method {
            EigenMethod::Grid { h, h_half } => assert_relative_eq!(h, 2.0 * h_half),
            _ => panic!("expected grid method"),
        }
    }

    #[test]
    fn grid_square_matches_closed_form() {
        let d = DomainSpec::rectangle(1.0, 1.0).unwrap();
        let eig = eigen_grid(&d, 1, Some(1.0 / 48.0)).unwrap();
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        assert!(
            (eig.entries[0].lambda_sq - exact).abs() / exact < 5e-3,
            "got {}",
            eig.entries[0].lambda_sq
        );
    }

    #[test]
    fn grid_tall_rectangle_matches_closed_form() {
        // non-square sections exercise the per-axis grid sizing
        let d = DomainSpec::rectangle(1.0, 2.0).unwrap();
        let eig = eigen_grid(&d, 2, Some(2.0 / 64.0)).unwrap();
        let exact1 = std::f64::consts::PI.powi(2) * 1.25;
        let exact2 = std::f64::consts::PI.powi(2) * 2.0;
        assert!((eig.entries[0].lambda_sq - exact1).abs() / exact1 < 5e-3);
        assert!((eig.entries[1].lambda_sq - exact2).abs() / exact2 < 5e-3);
    }

    #[test]
    fn disconnected_mask_is_rejected() {
        let text = "11011\n11011\n11011\n";
        let mask = GridMask::from_text(text, 0.05).unwrap();
        assert_eq!(mask.component_count(), 2);
        assert!(matches!(
            DomainSpec::mask(mask.clone()),
            Err(Error::DisconnectedMask { components: 2 })
        ));
        assert!(matches!(
            eigen_grid(&DomainSpec::Mask(mask), 1, None),
            Err(Error::DisconnectedMask { .. })
        ));
    }

    #[test]
    fn mask_roundtrip_and_refinement() {
        let text = "110\n111\n011\n";
        let mask = GridMask::from_text(text, 0.2).unwrap();
        assert_eq!(mask.to_text(), "110\n111\n011\n");
        let fine = mask.refined();
        assert_eq!(fine.nx, 6);
        assert_eq!(fine.h, 0.1);
        assert_eq!(fine.component_count(), mask.component_count());
        // covered area is identical
        let coarse_area: f64 =
            mask.cells.iter().filter(|&&c| c).count() as f64 * mask.h * mask.h;
        let fine_area: f64 =
            fine.cells.iter().filter(|&&c| c).count() as f64 * fine.h * fine.h;
        assert_relative_eq!(coarse_area, fine_area, max_relative = 1e-14);
    }

    #[test]
    fn grid_disk_converges_from_below() {
        let disk = DomainSpec::disk(1.0).unwrap();
        let mut prev_err = f64::INFINITY;
        for across in [32usize, 64] {
            let lam = eigen_grid_single(&disk, 1, across).unwrap()[0];
            assert!(lam < DISK_L1, "expected approach from below, got {lam}");
            let err = DISK_L1 - lam;
            assert!(err < prev_err);
            prev_err = err;
        }
    }

    #[test]
    fn dirichlet_monotonicity_on_nested_disks() {
        // a subset domain cannot have a smaller ground eigenvalue
        let small = eigen_grid_single(&DomainSpec::disk(0.8).unwrap(), 1, 64).unwrap();
        let big = eigen_grid_single(&DomainSpec::disk(1.0).unwrap(), 1, 64).unwrap();
        assert!(small[0] > big[0]);
    }

    #[test]
    fn mask_scaling_law_is_exact_in_h() {
        // the discrete operator scales as 1/h^2, so eigenvalues of the same
        // mask at cell sizes h and s*h differ exactly by s^2
        let text = "0110\n1111\n1111\n0110\n";
        let m1 = GridMask::from_text(text, 0.1).unwrap();
        let m2 = GridMask::from_text(text, 0.2).unwrap();
        let op1 = operator_for(&DomainSpec::Mask(m1), 4).unwrap();
        let op2 = operator_for(&DomainSpec::Mask(m2), 4).unwrap();
        let l1 = smallest_eigenvalues(&op1, 2, 1e-10).unwrap();
        let l2 = smallest_eigenvalues(&op2, 2, 1e-10).unwrap();
        for (a, b) in l1.iter().zip(&l2) {
            assert_relative_eq!(*a, b * 4.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn polygon_rasterization() {
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let mask = GridMask::rasterize_polygon(&square, 1.0 / 40.0).unwrap();
        assert_eq!(mask.component_count(), 1);
        let filled = mask.cells.iter().filter(|&&c| c).count();
        assert_eq!(filled, 40 * 40);
    }
}
