//! Minimization of the total energy at fixed rigidity, symmetry
//! classification of the minimizer and scans over `μ`.
//!
//! The search runs on the Kekulé slice `(p, p, q)` with a small multistart on
//! a coarse grid, then polishes on the target grid. An optional search over
//! all three amplitudes guards the slice reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bloch::HoppingTriple;
use crate::energy::{energy_with_table, pristine_optimum_from_vtr, PhaseTable};
use crate::error::{Error, Result};
use crate::lattice::{QuadratureGrid, Zone};
use crate::simplex::{nelder_mead, SimplexOptions, SimplexResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymClass {
    Pristine,
    KekuleO,
    Asymmetric,
}

impl SymClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SymClass::Pristine => "pristine",
            SymClass::KekuleO => "kekule_o",
            SymClass::Asymmetric => "asymmetric",
        }
    }
}

/// Pristine if all amplitudes agree within `sym_tol`; Kekulé-O if some pair does.
pub fn classify_symmetry(cfg: &HoppingTriple, sym_tol: f64) -> SymClass {
    let s = cfg.sorted();
    if s.v - s.t <= sym_tol {
        SymClass::Pristine
    } else if s.u - s.t <= sym_tol || s.v - s.u <= sym_tol {
        SymClass::KekuleO
    } else {
        SymClass::Asymmetric
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    pub sym_tol: f64,
    /// Energy tolerance of the multistart phase.
    pub ftol: f64,
    pub seed: u64,
    /// Also search over all three amplitudes and keep the lower result.
    pub cross_check: bool,
    /// Points per axis of the multistart grid (capped by the target grid).
    pub search_n: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            sym_tol: 1e-5,
            ftol: 1e-9,
            seed: 0,
            cross_check: true,
            search_n: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizerResult {
    /// Sorted ascending.
    pub cfg: HoppingTriple,
    pub energy: f64,
    pub sym_class: SymClass,
    pub gap: f64,
    pub mu: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `E(3D) − E(slice)` when the cross-check ran.
    pub cross_check_delta: Option<f64>,
}

const START_LEVELS: [f64; 3] = [0.2, 1.6, 3.0];
const JITTER: f64 = 0.05;

fn slice_starts(rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(8);
    for (i, &p) in START_LEVELS.iter().enumerate() {
        for (j, &q) in START_LEVELS.iter().enumerate() {
            if i == 1 && j == 1 {
                continue;
            }
            out.push([p + rng.gen_range(-JITTER..JITTER), q + rng.gen_range(-JITTER..JITTER)]);
        }
    }
    out
}

fn slice_cfg(x: &[f64]) -> HoppingTriple {
    HoppingTriple::kekule(x[0].abs(), x[1].abs())
}

fn full_cfg(x: &[f64]) -> HoppingTriple {
    HoppingTriple::new(x[0].abs(), x[1].abs(), x[2].abs())
}

struct Stage {
    best: SimplexResult,
    iterations: usize,
    converged: bool,
}

fn polish_options(max_iter: usize, step: f64) -> SimplexOptions {
    SimplexOptions {
        max_iter: 4 * max_iter,
        ftol: 1e-14,
        xtol: 1e-9,
        initial_step: step,
    }
}

/// Multistart on the coarse table, then polish the best start (and the
/// pristine optimum) on the fine table.
fn run_stage(
    to_cfg: fn(&[f64]) -> HoppingTriple,
    starts: &[Vec<f64>],
    extra_polish: &[Vec<f64>],
    mu: f64,
    coarse: &PhaseTable,
    fine: &PhaseTable,
    opts: &MinimizeOptions,
) -> Stage {
    let search = SimplexOptions {
        max_iter: opts.max_iter,
        ftol: opts.ftol,
        xtol: 1e-6,
        initial_step: 0.1,
    };
    let mut iterations = 0;
    let mut best_coarse: Option<SimplexResult> = None;
    for s in starts {
        let r = nelder_mead(|x| energy_with_table(&to_cfg(x), mu, coarse), s, &search);
        iterations += r.iterations;
        let better = match &best_coarse {
            None => true,
            Some(b) => r.f < b.f || (r.f == b.f && lex_less(&to_cfg(&r.x), &to_cfg(&b.x))),
        };
        if better {
            best_coarse = Some(r);
        }
    }
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    if let Some(b) = &best_coarse {
        seeds.push(b.x.iter().map(|x| x.abs()).collect());
    }
    seeds.extend(extra_polish.iter().cloned());

    let mut best: Option<SimplexResult> = None;
    let mut converged = true;
    for s in &seeds {
        let r = nelder_mead(
            |x| energy_with_table(&to_cfg(x), mu, fine),
            s,
            &polish_options(opts.max_iter, 0.02),
        );
        iterations += r.iterations;
        let better = match &best {
            None => true,
            Some(b) => r.f < b.f || (r.f == b.f && lex_less(&to_cfg(&r.x), &to_cfg(&b.x))),
        };
        if better {
            converged = r.converged;
            best = Some(r);
        }
    }
    Stage {
        best: best.expect("at least one polish seed"),
        iterations,
        converged,
    }
}

fn lex_less(a: &HoppingTriple, b: &HoppingTriple) -> bool {
    let (a, b) = (a.sorted().as_array(), b.sorted().as_array());
    a.iter().zip(&b).find(|(x, y)| x != y).is_some_and(|(x, y)| x < y)
}

/// Tables for the search and the target grid.
pub struct MinimizerTables {
    pub coarse: PhaseTable,
    pub fine: PhaseTable,
    /// `VTr|T(1,1,1)|` on the target grid.
    pub pristine_vtr: f64,
}

impl MinimizerTables {
    pub fn new(grid: &QuadratureGrid, search_n: usize) -> Result<Self> {
        grid.require_zone(Zone::B6)?;
        let fine = PhaseTable::new(grid)?;
        let coarse = if search_n >= grid.n {
            fine.clone()
        } else {
            PhaseTable::new(&QuadratureGrid::new(grid.zone, search_n.max(2), grid.shift)?)?
        };
        let pristine_vtr = fine.vtr_abs_t(&HoppingTriple::pristine(1.0));
        Ok(Self {
            coarse,
            fine,
            pristine_vtr,
        })
    }

    pub fn pristine_optimum(&self, mu: f64) -> f64 {
        pristine_optimum_from_vtr(mu, self.pristine_vtr)
    }

    /// Energy of `(t*, t*, t*)` on the target grid.
    pub fn pristine_energy(&self, mu: f64) -> f64 {
        energy_with_table(&HoppingTriple::pristine(self.pristine_optimum(mu)), mu, &self.fine)
    }
}

pub fn minimize_energy(mu: f64, grid: &QuadratureGrid, opts: &MinimizeOptions) -> Result<MinimizerResult> {
    let tables = MinimizerTables::new(grid, opts.search_n)?;
    minimize_with_tables(mu, &tables, opts)
}

pub fn minimize_with_tables(mu: f64, tables: &MinimizerTables, opts: &MinimizeOptions) -> Result<MinimizerResult> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidArgument(format!("mu must be positive, got {mu}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let t_star = tables.pristine_optimum(mu);

    let starts: Vec<Vec<f64>> = slice_starts(&mut rng).iter().map(|s| s.to_vec()).collect();
    let slice = run_stage(
        slice_cfg,
        &starts,
        &[vec![t_star, t_star]],
        mu,
        &tables.coarse,
        &tables.fine,
        opts,
    );
    let mut cfg = slice_cfg(&slice.best.x).sorted();
    let mut energy = slice.best.f;
    let mut iterations = slice.iterations;
    let mut converged = slice.converged;
    let mut cross_check_delta = None;

    if opts.cross_check {
        let starts3: Vec<Vec<f64>> = slice_starts(&mut rng)
            .iter()
            .map(|s| vec![s[0], s[0] + rng.gen_range(-JITTER..JITTER), s[1]])
            .collect();
        let t = t_star;
        let extra = vec![vec![t, t * (1.0 - 1e-3), t * (1.0 + 1e-3)], vec![cfg.t, cfg.u, cfg.v]];
        let full = run_stage(full_cfg, &starts3, &extra, mu, &tables.coarse, &tables.fine, opts);
        iterations += full.iterations;
        cross_check_delta = Some(full.best.f - energy);
        if full.best.f < energy - 1e-7 {
            log::warn!(
                "three-amplitude search improved on the Kekulé slice by {:.3e} at mu = {mu}",
                energy - full.best.f
            );
            cfg = full_cfg(&full.best.x).sorted();
            energy = full.best.f;
            converged = full.converged;
        }
    }

    let sym_class = classify_symmetry(&cfg, opts.sym_tol);
    Ok(MinimizerResult {
        cfg,
        energy,
        sym_class,
        gap: cfg.gap(),
        mu,
        iterations,
        converged,
        cross_check_delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Distorted,
    Pristine,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Distorted => "distorted",
            Phase::Pristine => "pristine",
        }
    }
}

/// Energy margin below the pristine optimum that counts as distorted.
pub const DISTORTION_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub mu: f64,
    pub t_low: f64,
    pub t_high: f64,
    /// Full sorted minimizer.
    pub cfg: HoppingTriple,
    pub sym_class: SymClass,
    pub gap: f64,
    pub energy_kekule: f64,
    pub energy_pristine: f64,
    pub phase: Phase,
}

pub fn phase_point(mu: f64, tables: &MinimizerTables, opts: &MinimizeOptions) -> Result<PhasePoint> {
    let r = minimize_with_tables(mu, tables, opts)?;
    let energy_pristine = tables.pristine_energy(mu);
    let phase = if r.energy < energy_pristine - DISTORTION_MARGIN {
        Phase::Distorted
    } else {
        Phase::Pristine
    };
    Ok(PhasePoint {
        mu,
        t_low: r.cfg.t,
        t_high: r.cfg.v,
        cfg: r.cfg,
        sym_class: r.sym_class,
        gap: r.gap,
        energy_kekule: r.energy,
        energy_pristine,
        phase,
    })
}

/// Evenly spaced values `from, …, to` (a single `from` when `steps == 1`).
pub fn mu_values(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if !(from > 0.0) || steps == 0 || (steps > 1 && !(to > from)) {
        return Err(Error::InvalidArgument(format!(
            "invalid mu range {from}:{to}:{steps}"
        )));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    Ok((0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// One phase point per `μ`. A pristine point followed by a distorted one is
/// logged as a warning.
pub fn phase_scan(
    mu_from: f64,
    mu_to: f64,
    steps: usize,
    grid: &QuadratureGrid,
    opts: &MinimizeOptions,
) -> Result<Vec<PhasePoint>> {
    let mus = mu_values(mu_from, mu_to, steps)?;
    let tables = MinimizerTables::new(grid, opts.search_n)?;
    let mut out = Vec::with_capacity(mus.len());
    let mut seen_pristine = false;
    for mu in mus {
        let p = phase_point(mu, &tables, opts)?;
        match p.phase {
            Phase::Pristine => seen_pristine = true,
            Phase::Distorted if seen_pristine => {
                log::warn!("distorted minimizer at mu = {mu} above a pristine one");
            }
            Phase::Distorted => {}
        }
        out.push(p);
    }
    Ok(out)
}

/// Bracket `[lo, hi]` of width ≤ `tol` around the last `μ` with a distorted minimizer.
pub fn transition_bracket(grid: &QuadratureGrid, tol: f64, opts: &MinimizeOptions) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let tables = MinimizerTables::new(grid, opts.search_n)?;
    let distorted = |mu: f64| -> Result<bool> { Ok(phase_point(mu, &tables, opts)?.phase == Phase::Distorted) };
    let (mut lo, mut hi) = (0.5, 1.5);
    if !distorted(lo)? || distorted(hi)? {
        return Err(Error::NotMonotone { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if distorted(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

pub fn transition_estimate(grid: &QuadratureGrid, tol: f64, opts: &MinimizeOptions) -> Result<f64> {
    let (lo, hi) = transition_bracket(grid, tol, opts)?;
    Ok(0.5 * (lo + hi))
}
