//! The two-universal family of linear maps `{0,1}^m -> {0,1}^k` (uniform
//! random binary matrices, no offset), with exhaustive checks of its
//! collision probability, the distributed leftover hash bound and the
//! Rényi-entropy bound on hashed Shannon entropy.

use rand::Rng;
use serde::Serialize;

use crate::error::{arg, size_check, Error, Result};
use crate::info::{entropy_of, renyi2_entropy, smooth_conditional_min_entropy};
use crate::prob::{BitString, Distribution, JointDistribution, SeededRng};

/// Most seeds any exhaustive check will enumerate.
pub const SEED_CAP: u128 = 1 << 16;
/// Most (seed, input, side information) atoms any exhaustive check will visit.
pub const ATOM_CAP: u128 = 1 << 20;

/// A `k x m` binary matrix; row `i` produces output bit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LinearHashSeed {
    rows: Vec<BitString>,
    cols: usize,
}

impl LinearHashSeed {
    pub fn from_rows(rows: Vec<BitString>, cols: usize) -> Result<Self> {
        if rows.is_empty() || cols == 0 {
            return arg("hash seed needs positive dimensions");
        }
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return arg(format!("row of length {} in a seed with {cols} columns", r.len()));
        }
        Ok(Self { rows, cols })
    }

    /// The `k = m` identity matrix.
    pub fn identity(m: usize) -> Self {
        let rows = (0..m)
            .map(|i| {
                let mut r = BitString::zeros(m);
                r.set(i, true);
                r
            })
            .collect();
        Self { rows, cols: m }
    }

    /// Seed number `index` in the enumeration order used by the exhaustive
    /// checks: bit `i * m + j` of `index` is entry `(i, j)`.
    pub fn from_index(k: usize, m: usize, index: u64) -> Self {
        assert!(k * m <= 64, "seed index only addresses k*m <= 64");
        let rows = (0..k)
            .map(|i| BitString::from_u64(index >> (i * m), m))
            .collect();
        Self { rows, cols: m }
    }

    pub fn output_len(&self) -> usize {
        self.rows.len()
    }

    pub fn input_len(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    /// Matrix-vector product over GF(2).
    pub fn apply(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.cols {
            return arg(format!("input of length {} for a seed with {} columns", x.len(), self.cols));
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &BitString) -> BitString {
        let mut out = BitString::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(x) {
                out.set(i, true);
            }
        }
        out
    }

    /// Applies the seed to an input given as the low `m` bits of an integer.
    pub(crate) fn apply_u64(&self, x: u64) -> u64 {
        let mut out = 0u64;
        for (i, r) in self.rows.iter().enumerate() {
            if (r.words()[0] & x).count_ones() & 1 == 1 {
                out |= 1 << i;
            }
        }
        out
    }
}

/// Draws a uniform `k x m` seed.
pub fn sample_seed<R: Rng + ?Sized>(k: usize, m: usize, rng: &mut R) -> Result<LinearHashSeed> {
    if k == 0 || k > m {
        return arg(format!("seed dimensions need 1 <= k <= m, got k={k}, m={m}"));
    }
    Ok(LinearHashSeed {
        rows: (0..k).map(|_| BitString::random(m, rng)).collect(),
        cols: m,
    })
}

pub fn apply(seed: &LinearHashSeed, x: &BitString) -> Result<BitString> {
    seed.apply(x)
}

/// Rank over GF(2) of a list of equal-length bit vectors.
pub fn gf2_rank(vectors: &[BitString]) -> usize {
    let mut basis: Vec<BitString> = Vec::new();
    for v in vectors {
        let mut v = v.clone();
        for b in &basis {
            let pivot = leading_bit(b).expect("basis vectors are nonzero");
            if v.get(pivot) {
                v = v.xor(b).expect("equal lengths");
            }
        }
        if let Some(p) = leading_bit(&v) {
            // keep the basis reduced so each pivot appears in one vector only
            for b in basis.iter_mut() {
                if b.get(p) {
                    *b = b.xor(&v).expect("equal lengths");
                }
            }
            basis.push(v);
        }
    }
    basis.len()
}

fn leading_bit(v: &BitString) -> Option<usize> {
    for (w, word) in v.words().iter().enumerate() {
        if *word != 0 {
            return Some(w * 64 + word.trailing_zeros() as usize);
        }
    }
    None
}

/// `Pr_seed[h(x0) = h(x1)]` over uniform `k x m` seeds. Enumerates all
/// `2^(km)` seeds when `km <= 16`; otherwise uses that each row annihilates
/// the nonzero difference `x0 ^ x1` independently with probability 1/2.
pub fn exact_collision_probability(k: usize, m: usize, x0: &BitString, x1: &BitString) -> Result<f64> {
    if x0.len() != m || x1.len() != m || k == 0 {
        return arg(format!("inputs must have length m={m} and k must be positive"));
    }
    if x0 == x1 {
        return arg("collision probability needs distinct inputs");
    }
    if k * m > 16 {
        return Ok(0.5f64.powi(k as i32));
    }
    let seeds = 1u64 << (k * m);
    let collisions = (0..seeds)
        .filter(|s| {
            let seed = LinearHashSeed::from_index(k, m, *s);
            seed.apply_unchecked(x0) == seed.apply_unchecked(x1)
        })
        .count();
    Ok(collisions as f64 / seeds as f64)
}

/// Joint collision probability of two independent seeds on two distinct pairs.
pub fn exact_pair_collision_probability(
    (k1, m1, x0, x1): (usize, usize, &BitString, &BitString),
    (k2, m2, y0, y1): (usize, usize, &BitString, &BitString),
) -> Result<f64> {
    size_check("seed pairs", 1u128 << (k1 * m1 + k2 * m2).min(127), SEED_CAP)?;
    let (s1, s2) = (1u64 << (k1 * m1), 1u64 << (k2 * m2));
    let mut hits = 0u64;
    let first: Vec<bool> = (0..s1)
        .map(|s| {
            let seed = LinearHashSeed::from_index(k1, m1, s);
            seed.apply_unchecked(x0) == seed.apply_unchecked(x1)
        })
        .collect();
    let second: Vec<bool> = (0..s2)
        .map(|s| {
            let seed = LinearHashSeed::from_index(k2, m2, s);
            seed.apply_unchecked(y0) == seed.apply_unchecked(y1)
        })
        .collect();
    for a in &first {
        for b in &second {
            hits += (*a && *b) as u64;
        }
    }
    Ok(hits as f64 / (s1 * s2) as f64)
}

/// One hashed source: inputs are `input_bits` long (axis size `2^input_bits`
/// in the joint) and are hashed to `output_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HashedSource {
    pub input_bits: usize,
    pub output_bits: usize,
}

/// Exact evaluation of the distributed leftover hash bound on one fixture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DlhlReport {
    /// Distance of (outputs, seeds, Z) from (uniform, seeds, Z).
    pub distance: f64,
    /// `2^m eps / 2 + 2^m eps'` for `m` sources.
    pub bound: f64,
    /// Whether every subset meets `H^eps'(X_S | Z) >= sum k_i + 2 log(1/eps)`.
    pub premise_holds: bool,
    /// Per source, `(I(g_i; T_i Z), its bound)`; empty when the
    /// combined `eps''` is zero.
    pub corollary: Vec<(f64, f64)>,
    pub within_bound: bool,
}

/// Exact distributed leftover hash check. `joint` has one axis per source
/// (values are the inputs as integers) followed by one axis for the side
/// information `Z`.
pub fn dlhl_distance_to_uniform(
    sources: &[HashedSource],
    joint: &JointDistribution,
    eps: f64,
    eps2: f64,
) -> Result<DlhlReport> {
    let m = sources.len();
    if m == 0 || joint.num_axes() != m + 1 {
        return arg("joint needs one axis per source plus one for side information");
    }
    if !(eps > 0.0) || eps2 < 0.0 {
        return arg("need eps > 0 and eps' >= 0");
    }
    for (i, s) in sources.iter().enumerate() {
        if s.output_bits == 0 || s.output_bits > s.input_bits || s.input_bits > 16 {
            return arg(format!("source {i} has invalid lengths {s:?}"));
        }
        if joint.shape()[i] != 1 << s.input_bits {
            return arg(format!("axis {i} has size {} but source has {} input bits", joint.shape()[i], s.input_bits));
        }
    }
    let seed_bits: usize = sources.iter().map(|s| s.output_bits * s.input_bits).sum();
    let n_seeds = 1u128 << seed_bits.min(127);
    size_check("hash seed tuples", n_seeds, SEED_CAP)?;
    size_check("leftover hash atoms", n_seeds * joint.probs().len() as u128, ATOM_CAP)?;

    let z_size = joint.shape()[m];
    let out_bits: usize = sources.iter().map(|s| s.output_bits).sum();
    let n_out = 1usize << out_bits;
    let pz = joint.marginal(m)?;

    let atoms = support_atoms(joint);
    let mut total = 0.0;
    let mut table = vec![0.0; n_out * z_size];
    for seed_idx in 0..n_seeds as u64 {
        let seeds = split_seed_index(sources, seed_idx);
        table.iter_mut().for_each(|v| *v = 0.0);
        for (xs, z, p) in &atoms {
            let g = hash_tuple(sources, &seeds, xs);
            table[g * z_size + z] += p;
        }
        let mut d = 0.0;
        for g in 0..n_out {
            for z in 0..z_size {
                d += (table[g * z_size + z] - pz.prob(z) / n_out as f64).abs();
            }
        }
        total += 0.5 * d;
    }
    let distance = total / n_seeds as f64;
    let scale = (1u64 << m) as f64;
    let bound = scale * eps / 2.0 + scale * eps2;

    let premise_holds = dlhl_premise(sources, joint, eps, eps2)?;
    let corollary = if bound > 0.0 {
        (0..m)
            .map(|i| dlhl_corollary(sources, joint, i, bound))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok(DlhlReport {
        distance,
        bound,
        premise_holds,
        corollary,
        within_bound: distance <= bound + 1e-12,
    })
}

fn support_atoms(joint: &JointDistribution) -> Vec<(Vec<u64>, usize, f64)> {
    let shape = joint.shape().to_vec();
    let mut out = Vec::new();
    for (flat, p) in joint.probs().iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let mut rem = flat;
        let mut idx = vec![0usize; shape.len()];
        for (slot, s) in idx.iter_mut().zip(&shape).rev() {
            *slot = rem % s;
            rem /= s;
        }
        let z = idx.pop().expect("side information axis");
        out.push((idx.into_iter().map(|v| v as u64).collect(), z, *p));
    }
    out
}

fn split_seed_index(sources: &[HashedSource], mut idx: u64) -> Vec<LinearHashSeed> {
    sources
        .iter()
        .map(|s| {
            let bits = s.output_bits * s.input_bits;
            let seed = LinearHashSeed::from_index(s.output_bits, s.input_bits, idx & ((1u64 << bits) - 1));
            idx >>= bits;
            seed
        })
        .collect()
}

fn hash_tuple(sources: &[HashedSource], seeds: &[LinearHashSeed], xs: &[u64]) -> usize {
    let mut g = 0usize;
    for ((s, seed), x) in sources.iter().zip(seeds).zip(xs) {
        g = (g << s.output_bits) | seed.apply_u64(*x) as usize;
    }
    g
}

fn dlhl_premise(sources: &[HashedSource], joint: &JointDistribution, eps: f64, eps2: f64) -> Result<bool> {
    let m = sources.len();
    let log_term = 2.0 * (1.0 / eps).log2();
    for mask in 1u32..(1 << m) {
        let subset: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let need: usize = subset.iter().map(|i| sources[*i].output_bits).sum();
        let mut keep = subset.clone();
        keep.push(m);
        let inner: Vec<usize> = (0..subset.len()).collect();
        let xz = joint.marginalize(&keep)?.regroup(&[&inner, &[subset.len()]])?;
        let h = if eps2 < 1.0 {
            smooth_conditional_min_entropy(&xz, eps2)?
        } else {
            (xz.shape()[0] as f64).log2()
        };
        if h + 1e-12 < need as f64 + log_term {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `I(g_i(T_i, X_i); T_i Z)` computed exactly, paired with
/// `-eps'' log(eps'' / (2^k_i |Z| |T_i|))`.
fn dlhl_corollary(sources: &[HashedSource], joint: &JointDistribution, i: usize, eps3: f64) -> Result<(f64, f64)> {
    let m = sources.len();
    let s = sources[i];
    let xz = joint.marginalize(&[i, m])?;
    let z_size = xz.shape()[1];
    let n_seeds = 1u64 << (s.output_bits * s.input_bits);
    let n_out = 1usize << s.output_bits;
    // H(g) - H(g | T Z), with T uniform
    let mut pg = vec![0.0; n_out];
    let mut h_cond = 0.0;
    let mut cell = vec![0.0; n_out * z_size];
    for t in 0..n_seeds {
        let seed = LinearHashSeed::from_index(s.output_bits, s.input_bits, t);
        cell.iter_mut().for_each(|v| *v = 0.0);
        for x in 0..xz.shape()[0] {
            let g = seed.apply_u64(x as u64) as usize;
            for z in 0..z_size {
                cell[g * z_size + z] += xz.get(&[x, z]);
            }
        }
        for g in 0..n_out {
            for z in 0..z_size {
                pg[g] += cell[g * z_size + z] / n_seeds as f64;
            }
        }
        // H(g, Z | T = t) - H(Z)
        h_cond += entropy_of(&cell) / n_seeds as f64;
    }
    let hz = entropy_of(xz.marginal(1)?.probs());
    let mi = entropy_of(&pg) - (h_cond - hz);
    let denom = (n_out * z_size) as f64 * n_seeds as f64;
    Ok((mi, -eps3 * (eps3 / denom).log2()))
}

/// `l - 2^(l-c) / ln 2`.
pub fn bennet_entropy_bound(l: usize, c: f64) -> f64 {
    l as f64 - 2f64.powf(l as f64 - c) / std::f64::consts::LN_2
}

/// The tighter form `l - log2(1 + 2^(l-c))`.
pub fn bennet_entropy_bound_tight(l: usize, c: f64) -> f64 {
    l as f64 - (1.0 + 2f64.powf(l as f64 - c)).log2()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BennetReport {
    /// `H(kappa(X) | kappa, Y = y)`.
    pub hashed_entropy: f64,
    /// `H_2(X | Y = y)`.
    pub renyi2: f64,
    pub bound: f64,
    /// False when seeds were sampled rather than enumerated.
    pub exact: bool,
    pub holds: bool,
}

/// Checks the hashed-entropy bound for `X` given `Y = y` under `l`-bit linear
/// hashing. `joint` is over `(X, Y)` with `X` an integer-coded bit string.
/// Enumerates all seeds within [`SEED_CAP`], otherwise averages `trials`
/// sampled seeds.
pub fn bennet_check(joint: &JointDistribution, y: usize, l: usize, trials: usize, rng: &mut SeededRng) -> Result<BennetReport> {
    let nx = joint.shape()[0];
    if joint.num_axes() != 2 || !nx.is_power_of_two() {
        return arg("joint must be over (X, Y) with |X| a power of two");
    }
    let m = nx.trailing_zeros() as usize;
    if l == 0 || l > m {
        return arg(format!("output length {l} must be in 1..={m}"));
    }
    let px = joint.condition(1, y)?.flatten();
    let c = renyi2_entropy(&px);
    let exact = (l * m) as u32 <= SEED_CAP.trailing_zeros();
    let seeds: Box<dyn Iterator<Item = LinearHashSeed>> = if exact {
        Box::new((0..1u64 << (l * m)).map(move |s| LinearHashSeed::from_index(l, m, s)))
    } else {
        if trials == 0 {
            return Err(Error::Size { what: "hash seeds".into(), needed: 1 << (l * m).min(127), cap: SEED_CAP });
        }
        let v: Vec<_> = (0..trials).map(|_| sample_seed(l, m, rng)).collect::<Result<_>>()?;
        Box::new(v.into_iter())
    };
    let (mut sum, mut count) = (0.0, 0usize);
    let mut out = vec![0.0; 1 << l];
    for seed in seeds {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (x, p) in px.probs().iter().enumerate() {
            out[seed.apply_u64(x as u64) as usize] += p;
        }
        sum += entropy_of(&out);
        count += 1;
    }
    let hashed_entropy = sum / count as f64;
    let bound = bennet_entropy_bound(l, c);
    Ok(BennetReport {
        hashed_entropy,
        renyi2: c,
        bound,
        exact,
        holds: hashed_entropy >= bound - 1e-12,
    })
}

/// Uniform distribution over `m`-bit strings, as used by the fixtures.
pub fn uniform_bits(m: usize) -> Distribution {
    Distribution::uniform(1 << m).expect("positive size")
}
