//! Rate regions as maxima of information functionals over product input
//! distributions, by dense grid search plus coordinate-ascent refinement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{Correlation, MacKernel, SbcParams};
use crate::error::{arg, Result};
use crate::info::{entropy_of, mutual_information};
use crate::prob::Distribution;

/// Most grid points (pairs of input distributions) a single search visits.
pub const GRID_CAP: u128 = 4_000_000;
pub const BINARY_GRID_STEP: f64 = 1e-3;
pub const SIMPLEX_GRID_STEP: f64 = 0.02;
pub const REFINE_ITERS: usize = 50;
/// Below this `I(X1; X2 | Y)` counts as zero.
pub const MARKOV_TOL: f64 = 1e-9;

/// Every base quantity the regions need, at one product input distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoProfile {
    /// `I(X1; Y | X2)`
    pub i1: f64,
    /// `I(X2; Y | X1)`
    pub i2: f64,
    /// `I(X1, X2; Y)`
    pub i12: f64,
    /// `H(X1 | Y)`
    pub h1: f64,
    /// `H(X2 | Y)`
    pub h2: f64,
    /// `H(X1, X2 | Y)`
    pub h12: f64,
    /// `I(X1; X2 | Y)`
    pub i12_given_y: f64,
}

/// The profile of `kernel` driven by independent inputs `d1`, `d2`.
pub fn info_profile(kernel: &MacKernel, d1: &[f64], d2: &[f64]) -> InfoProfile {
    Evaluator::new(kernel).profile(d1, d2)
}

struct Evaluator<'a> {
    kernel: &'a MacKernel,
    // H(Y | X1 = a, X2 = b), row-major
    row_entropy: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(kernel: &'a MacKernel) -> Self {
        let mut row_entropy = Vec::with_capacity(kernel.x1_size() * kernel.x2_size());
        for a in 0..kernel.x1_size() {
            for b in 0..kernel.x2_size() {
                row_entropy.push(entropy_of(kernel.row(a, b)));
            }
        }
        Self { kernel, row_entropy }
    }

    fn profile(&self, d1: &[f64], d2: &[f64]) -> InfoProfile {
        let (n1, n2, ny) = (self.kernel.x1_size(), self.kernel.x2_size(), self.kernel.y_size());
        let mut py = vec![0.0; ny];
        let mut py_x1 = vec![0.0; n1 * ny];
        let mut py_x2 = vec![0.0; n2 * ny];
        let mut h_y_x12 = 0.0;
        for a in 0..n1 {
            for b in 0..n2 {
                let w = d1[a] * d2[b];
                if w == 0.0 {
                    continue;
                }
                h_y_x12 += w * self.row_entropy[a * n2 + b];
                for (y, v) in self.kernel.row(a, b).iter().enumerate() {
                    py_x1[a * ny + y] += d2[b] * v;
                    py_x2[b * ny + y] += d1[a] * v;
                    py[y] += w * v;
                }
            }
        }
        let h_x1 = entropy_of(d1);
        let h_x2 = entropy_of(d2);
        let h_y = entropy_of(&py);
        let h_y_x1: f64 = (0..n1).map(|a| d1[a] * entropy_of(&py_x1[a * ny..(a + 1) * ny])).sum();
        let h_y_x2: f64 = (0..n2).map(|b| d2[b] * entropy_of(&py_x2[b * ny..(b + 1) * ny])).sum();
        let h_x1y = h_x1 + h_y_x1;
        let h_x2y = h_x2 + h_y_x2;
        let h_x12y = h_x1 + h_x2 + h_y_x12;
        InfoProfile {
            i1: h_y_x2 - h_y_x12,
            i2: h_y_x1 - h_y_x12,
            i12: h_y - h_y_x12,
            h1: h_x1y - h_y,
            h2: h_x2y - h_y,
            h12: h_x12y - h_y,
            i12_given_y: h_x1y + h_x2y - h_x12y - h_y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    R1,
    R2,
    Sum,
}

impl Bound {
    pub const ALL: [Bound; 3] = [Bound::R1, Bound::R2, Bound::Sum];
}

/// A functional of the input distributions, maximized by the grid search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `I(X1; Y | X2)`
    MutualX1GivenX2,
    /// `I(X2; Y | X1)`
    MutualX2GivenX1,
    /// `I(X1, X2; Y)`
    MutualJoint,
    /// `H(X1 | Y)`
    EquivocationX1,
    /// `H(X2 | Y)`
    EquivocationX2,
    /// `H(X1, X2 | Y)`
    EquivocationJoint,
    /// Mutual information capped by the matching equivocation.
    HbcUpper(Bound),
    /// Half of mutual information plus `I(X1; X2 | Y)` on the individual
    /// bounds, half of `I(X1, X2; Y)` on the sum.
    Malicious(Bound),
    /// The malicious functional without the `I(X1; X2 | Y)` term.
    MaliciousMarkov(Bound),
}

impl Objective {
    pub fn evaluate(&self, p: &InfoProfile) -> f64 {
        let mutual = |b: Bound| match b {
            Bound::R1 => p.i1,
            Bound::R2 => p.i2,
            Bound::Sum => p.i12,
        };
        match *self {
            Objective::MutualX1GivenX2 => p.i1,
            Objective::MutualX2GivenX1 => p.i2,
            Objective::MutualJoint => p.i12,
            Objective::EquivocationX1 => p.h1,
            Objective::EquivocationX2 => p.h2,
            Objective::EquivocationJoint => p.h12,
            Objective::HbcUpper(b) => {
                let h = match b {
                    Bound::R1 => p.h1,
                    Bound::R2 => p.h2,
                    Bound::Sum => p.h12,
                };
                mutual(b).min(h)
            }
            Objective::Malicious(Bound::Sum) | Objective::MaliciousMarkov(Bound::Sum) => 0.5 * p.i12,
            Objective::Malicious(b) => 0.5 * (mutual(b) + p.i12_given_y),
            Objective::MaliciousMarkov(b) => 0.5 * mutual(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Grid,
    Refined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Grid resolution on each input simplex; `None` picks
    /// [`BINARY_GRID_STEP`] for binary alphabets, [`SIMPLEX_GRID_STEP`] otherwise.
    pub step: Option<f64>,
    pub refine_iters: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            step: None,
            refine_iters: REFINE_ITERS,
        }
    }
}

impl GridConfig {
    pub fn with_step(step: f64) -> Self {
        Self {
            step: Some(step),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Maximum {
    pub value: f64,
    /// Best value on the grid alone.
    pub grid_value: f64,
    pub argmax: [Distribution; 2],
    pub method: Method,
    /// Step actually used, after coarsening to respect [`GRID_CAP`].
    pub grid_step: f64,
}

/// Compositions of `total` into `parts` nonnegative integers, as points of
/// the probability simplex.
fn simplex_points(parts: usize, total: usize) -> Vec<Vec<f64>> {
    fn rec(parts: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(parts - 1, left - v, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(parts, total, &mut Vec::new(), &mut raw);
    raw.iter()
        .map(|c| c.iter().map(|v| *v as f64 / total as f64).collect())
        .collect()
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn simplex_count(parts: usize, total: usize) -> u128 {
    binomial((total + parts - 1) as u128, (parts - 1) as u128)
}

/// Number of subdivisions per unit of mass for the requested step, coarsened
/// until the product grid fits [`GRID_CAP`].
fn grid_resolution(n1: usize, n2: usize, step: f64) -> usize {
    let mut total = (1.0 / step).round().max(1.0) as usize;
    while total > 1 && simplex_count(n1, total).saturating_mul(simplex_count(n2, total)) > GRID_CAP {
        total = (total as f64 * 0.9).floor() as usize;
    }
    total
}

/// Maximizes each objective over product input distributions. One grid pass
/// serves all objectives; ties go to the lexicographically first grid point.
pub fn max_over_products_many(kernel: &MacKernel, objectives: &[Objective], cfg: &GridConfig) -> Result<Vec<Maximum>> {
    let (n1, n2) = (kernel.x1_size(), kernel.x2_size());
    let step = cfg.step.unwrap_or(if n1 <= 2 && n2 <= 2 { BINARY_GRID_STEP } else { SIMPLEX_GRID_STEP });
    if !(step > 0.0 && step <= 0.5) {
        return arg(format!("grid step {step} outside (0, 0.5]"));
    }
    if objectives.is_empty() {
        return Ok(Vec::new());
    }
    let total = grid_resolution(n1, n2, step);
    let g1 = simplex_points(n1, total);
    let g2 = simplex_points(n2, total);
    let eval = Evaluator::new(kernel);
    let m = objectives.len();

    // per row of the first grid: best (value, column) for each objective
    let rows: Vec<Vec<(f64, usize)>> = g1
        .par_iter()
        .map(|d1| {
            let mut best = vec![(f64::NEG_INFINITY, 0usize); m];
            for (j, d2) in g2.iter().enumerate() {
                let p = eval.profile(d1, d2);
                for (o, slot) in objectives.iter().zip(best.iter_mut()) {
                    let v = o.evaluate(&p);
                    if v > slot.0 {
                        *slot = (v, j);
                    }
                }
            }
            best
        })
        .collect();

    let mut out = Vec::with_capacity(m);
    for (k, objective) in objectives.iter().enumerate() {
        let (mut bi, mut bj, mut bv) = (0, 0, f64::NEG_INFINITY);
        for (i, row) in rows.iter().enumerate() {
            if row[k].0 > bv {
                (bi, bj, bv) = (i, row[k].1, row[k].0);
            }
        }
        let (value, argmax) = refine(&eval, objective, [g1[bi].clone(), g2[bj].clone()], bv, 1.0 / total as f64, cfg.refine_iters);
        out.push(Maximum {
            value,
            grid_value: bv,
            argmax: argmax.map(|d| Distribution::new(d).expect("refinement stays on the simplex")),
            method: if cfg.refine_iters > 0 { Method::Refined } else { Method::Grid },
            grid_step: 1.0 / total as f64,
        });
    }
    Ok(out)
}

/// Maximum of a single objective over product input distributions.
pub fn max_over_products(kernel: &MacKernel, objective: Objective, cfg: &GridConfig) -> Result<Maximum> {
    Ok(max_over_products_many(kernel, &[objective], cfg)?.remove(0))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Coordinate ascent: for each input and each pair of symbols, a golden-section
/// search over shifting up to `radius` mass between them. Only improvements
/// are kept, so the result never falls below the start.
fn refine(
    eval: &Evaluator,
    objective: &Objective,
    start: [Vec<f64>; 2],
    start_value: f64,
    radius: f64,
    iters: usize,
) -> (f64, [Vec<f64>; 2]) {
    let mut cur = start;
    let mut best = start_value;
    let score = |d: &[Vec<f64>; 2]| objective.evaluate(&eval.profile(&d[0], &d[1]));
    for _ in 0..iters {
        let before = best;
        for input in 0..2 {
            let len = cur[input].len();
            for a in 0..len {
                for b in a + 1..len {
                    let lo = -(cur[input][a].min(radius));
                    let hi = cur[input][b].min(radius);
                    if hi - lo <= 0.0 {
                        continue;
                    }
                    let at = |t: f64| {
                        let mut d = cur.clone();
                        d[input][a] += t;
                        d[input][b] -= t;
                        d[input][a] = d[input][a].clamp(0.0, 1.0);
                        d[input][b] = d[input][b].clamp(0.0, 1.0);
                        d
                    };
                    let (mut x0, mut x3) = (lo, hi);
                    let mut x1 = x3 - INV_PHI * (x3 - x0);
                    let mut x2 = x0 + INV_PHI * (x3 - x0);
                    let (mut f1, mut f2) = (score(&at(x1)), score(&at(x2)));
                    for _ in 0..40 {
                        if f1 >= f2 {
                            x3 = x2;
                            (x2, f2) = (x1, f1);
                            x1 = x3 - INV_PHI * (x3 - x0);
                            f1 = score(&at(x1));
                        } else {
                            x0 = x1;
                            (x1, f1) = (x2, f2);
                            x2 = x0 + INV_PHI * (x3 - x0);
                            f2 = score(&at(x2));
                        }
                    }
                    let t = if f1 >= f2 { x1 } else { x2 };
                    let cand = at(t);
                    let v = score(&cand);
                    if v > best {
                        best = v;
                        cur = cand;
                    }
                }
            }
        }
        if best <= before {
            break;
        }
    }
    (best, cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    /// Upper bound for honest-but-curious parties on a general channel.
    HbcUpper,
    /// Exact region for honest-but-curious parties on an erasure-mixture channel.
    Hbc,
    /// Achievable region against a malicious receiver.
    Malicious,
    /// Secret-key rate upper bound.
    Ska,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovReport {
    /// Whether `X1 - Y - X2` holds at uniform inputs.
    pub holds: bool,
    pub i12_given_y: f64,
    /// The region without the `I(X1; X2 | Y)` term, when the chain holds.
    pub simplified: Option<[f64; 3]>,
    /// Simplified and general regions agree within [`MARKOV_TOL`].
    pub agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegion {
    pub kind: RegionKind,
    pub r1_max: f64,
    pub r2_max: f64,
    pub sum_max: f64,
    /// Maximizing input pair for `r1_max`, `r2_max`, `sum_max` in that order.
    pub argmax: [[Distribution; 2]; 3],
    pub method: Method,
    pub grid_step: f64,
    /// The bounds are suprema of an open region.
    pub strict: bool,
    pub markov: Option<MarkovReport>,
}

impl RateRegion {
    pub fn bounds(&self) -> [f64; 3] {
        [self.r1_max, self.r2_max, self.sum_max]
    }

    pub fn contains(&self, r1: f64, r2: f64) -> bool {
        r1 >= 0.0 && r2 >= 0.0 && r1 <= self.r1_max && r2 <= self.r2_max && r1 + r2 <= self.sum_max
    }

    /// Entrywise comparison of the three bounds, with slack `tol`.
    pub fn within(&self, other: &RateRegion, tol: f64) -> bool {
        self.bounds().iter().zip(other.bounds()).all(|(a, b)| *a <= b + tol)
    }
}

fn region(kernel: &MacKernel, kind: RegionKind, objectives: [Objective; 3], cfg: &GridConfig) -> Result<RateRegion> {
    let mut m = max_over_products_many(kernel, &objectives, cfg)?;
    let (s, r2, r1) = (m.pop().expect("three"), m.pop().expect("three"), m.pop().expect("three"));
    // numerical noise can leave tiny negatives on zero-information channels
    Ok(RateRegion {
        kind,
        r1_max: r1.value.max(0.0),
        r2_max: r2.value.max(0.0),
        sum_max: s.value.max(0.0),
        method: r1.method,
        grid_step: r1.grid_step,
        argmax: [r1.argmax, r2.argmax, s.argmax],
        strict: false,
        markov: None,
    })
}

/// Upper bound on the OT region for honest-but-curious parties: each bound
/// maximizes the pointwise minimum of a mutual information and an equivocation.
pub fn region_hbc_upper(kernel: &MacKernel, cfg: &GridConfig) -> Result<RateRegion> {
    region(kernel, RegionKind::HbcUpper, Bound::ALL.map(Objective::HbcUpper), cfg)
}

fn mutual_objectives() -> [Objective; 3] {
    [Objective::MutualX1GivenX2, Objective::MutualX2GivenX1, Objective::MutualJoint]
}

/// OT region of an erasure-mixture channel for honest-but-curious parties.
pub fn region_hbc_capacity(sbc: &SbcParams, cfg: &GridConfig) -> Result<RateRegion> {
    region(&sbc.kernel(), RegionKind::Hbc, mutual_objectives(), cfg)
}

/// Secret-key rate upper bound; the same functionals as [`region_hbc_capacity`]
/// on an arbitrary kernel.
pub fn region_ska_upper(kernel: &MacKernel, cfg: &GridConfig) -> Result<RateRegion> {
    region(kernel, RegionKind::Ska, mutual_objectives(), cfg)
}

/// The three secret-key functionals evaluated on a fixed correlation.
pub fn ska_bounds_at(c: &Correlation) -> [f64; 3] {
    let j = c.joint();
    let mi = |a: &[usize], b: &[usize], g: &[usize]| mutual_information(j, a, b, g).expect("three axes").max(0.0);
    [mi(&[0], &[2], &[1]), mi(&[1], &[2], &[0]), mi(&[0, 1], &[2], &[])]
}

/// Achievable region against a malicious receiver, reported as suprema.
/// Also runs the `X1 - Y - X2` test and, when it passes, checks the
/// simplified region against the general one.
pub fn region_malicious(sbc: &SbcParams, cfg: &GridConfig) -> Result<RateRegion> {
    let kernel = sbc.kernel();
    let mut r = region(&kernel, RegionKind::Malicious, Bound::ALL.map(Objective::Malicious), cfg)?;
    r.strict = true;
    let c = kernel.uniform_correlation();
    let i = conditional_input_information(&c);
    let holds = i <= MARKOV_TOL;
    let (simplified, agrees) = if holds {
        let s = region(&kernel, RegionKind::Malicious, Bound::ALL.map(Objective::MaliciousMarkov), cfg)?;
        let agrees = r.bounds().iter().zip(s.bounds()).all(|(a, b)| (a - b).abs() <= MARKOV_TOL);
        (Some(s.bounds()), Some(agrees))
    } else {
        (None, None)
    };
    r.markov = Some(MarkovReport {
        holds,
        i12_given_y: i,
        simplified,
        agrees,
    });
    Ok(r)
}

fn conditional_input_information(c: &Correlation) -> f64 {
    mutual_information(c.joint(), &[0], &[1], &[2]).expect("three axes").max(0.0)
}

/// Whether `X1 - Y - X2` is a Markov chain under `c`.
pub fn markov_x1_y_x2(c: &Correlation) -> bool {
    conditional_input_information(c) <= MARKOV_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{adder_mac, bec, identity_mac, noisy_adder_mac, su_sbc, MacKernel, OutputSymbol};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn profile_matches_generic_entropies() {
        let k = noisy_adder_mac(0.7).unwrap();
        let (d1, d2) = (vec![0.3, 0.7], vec![0.6, 0.4]);
        let p = info_profile(&k, &d1, &d2);
        let c = k
            .correlation(&Distribution::new(d1).unwrap(), &Distribution::new(d2).unwrap())
            .unwrap();
        let [a, b, s] = ska_bounds_at(&c);
        assert!(close(p.i1, a, 1e-12) && close(p.i2, b, 1e-12) && close(p.i12, s, 1e-12));
        assert!(close(p.i12_given_y, conditional_input_information(&c), 1e-12));
    }

    #[test]
    fn adder_values() {
        let cfg = GridConfig::default();
        let k = adder_mac();
        assert!(close(max_over_products(&k, Objective::MutualJoint, &cfg).unwrap().value, 1.5, 1e-3));
        assert!(close(max_over_products(&k, Objective::EquivocationJoint, &cfg).unwrap().value, 0.5, 1e-3));
        assert!(close(region_hbc_upper(&k, &cfg).unwrap().sum_max, 0.5, 1e-3));
        let s = region_ska_upper(&k, &cfg).unwrap();
        assert!(close(s.r1_max, 1.0, 1e-3) && close(s.r2_max, 1.0, 1e-3) && close(s.sum_max, 1.5, 1e-3));
        assert!(!markov_x1_y_x2(&k.uniform_correlation()));
    }

    #[test]
    fn degenerate_inputs() {
        let cfg = GridConfig::default();
        let k = bec(0.3).unwrap();
        assert!(close(max_over_products(&k, Objective::MutualX2GivenX1, &cfg).unwrap().value, 0.0, 1e-12));
        let s = region_ska_upper(&k, &cfg).unwrap();
        assert!(close(s.r1_max, 0.7, 1e-9) && close(s.sum_max, 0.7, 1e-9));
        let id = region_hbc_upper(&identity_mac(), &cfg).unwrap();
        assert!(id.bounds().iter().all(|v| v.abs() < 1e-12));
        assert!(markov_x1_y_x2(&identity_mac().uniform_correlation()));
    }

    #[test]
    fn erasure_mixture_regions() {
        let cfg = GridConfig::default();
        let sbc = su_sbc(0.4, identity_mac()).unwrap();
        let h = region_hbc_capacity(&sbc, &cfg).unwrap();
        assert!(close(h.r1_max, 0.4, 1e-3) && close(h.r2_max, 0.4, 1e-3) && close(h.sum_max, 0.8, 1e-3));
        let m = region_malicious(&sbc, &cfg).unwrap();
        assert!(close(m.r1_max, 0.2, 1e-3) && close(m.sum_max, 0.4, 1e-3));
        assert!(m.strict);
        let mk = m.markov.unwrap();
        assert!(mk.holds && mk.agrees == Some(true));
        assert!(close(region_hbc_upper(&sbc.kernel(), &cfg).unwrap().sum_max, 0.8, 1e-3));
    }

    #[test]
    fn independent_output_kernel_is_useless() {
        let k = MacKernel::new(
            2,
            2,
            vec![OutputSymbol::plain("a"), OutputSymbol::plain("b")],
            vec![vec![0.3, 0.7]; 4],
        )
        .unwrap();
        let s = region_ska_upper(&k, &GridConfig::with_step(0.01)).unwrap();
        assert!(s.bounds().iter().all(|v| *v < 1e-9));
    }

    #[test]
    fn larger_alphabets_and_bad_step() {
        let k = MacKernel::new(
            3,
            2,
            vec![OutputSymbol::plain("0"), OutputSymbol::plain("1"), OutputSymbol::plain("2"), OutputSymbol::plain("3")],
            (0..6)
                .map(|r| {
                    let mut row = vec![0.0; 4];
                    row[(r / 2 + r % 2) % 4] = 1.0;
                    row
                })
                .collect(),
        )
        .unwrap();
        // deterministic output: I(X1, X2; Y) = max H(Y), reached near log2(3)
        let m = max_over_products(&k, Objective::MutualJoint, &GridConfig::default()).unwrap();
        assert!(m.value >= m.grid_value);
        assert!(m.value > 1.5 && m.value <= 2.0 + 1e-12);
        assert!(max_over_products(&k, Objective::MutualJoint, &GridConfig::with_step(0.7)).is_err());
    }

    #[test]
    fn grid_is_deterministic() {
        let k = noisy_adder_mac(0.5).unwrap();
        let cfg = GridConfig::with_step(0.01);
        assert_eq!(region_hbc_upper(&k, &cfg).unwrap(), region_hbc_upper(&k, &cfg).unwrap());
    }
}
