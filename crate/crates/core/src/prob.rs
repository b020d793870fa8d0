//! Finite probability primitives: distributions over small alphabets, dense
//! joint tables, packed bit strings and reproducible seeded randomness.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

/// Tolerance on total mass when validating distributions.
pub const NORM_TOL: f64 = 1e-12;

fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return arg("distribution must have a nonempty alphabet");
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return arg(format!("probability {p} is negative or not finite"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORM_TOL * (probs.len() as f64).max(1.0) {
        return arg(format!("probabilities sum to {total}, not 1"));
    }
    Ok(())
}

/// A probability distribution over `{0, .., alphabet_size - 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probs(&probs)?;
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return arg("weights must be finite and nonnegative");
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Domain("weights have zero total mass".into()));
        }
        Ok(Self {
            probs: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return arg("uniform distribution needs a positive alphabet size");
        }
        Ok(Self {
            probs: vec![1.0 / size as f64; size],
        })
    }

    pub fn point_mass(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return arg(format!("point mass at {at} outside alphabet of size {size}"));
        }
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    /// Binary distribution with `P(1) = p1`.
    pub fn bernoulli(p1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return arg(format!("bernoulli parameter {p1} outside [0,1]"));
        }
        Ok(Self {
            probs: vec![1.0 - p1, p1],
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probs.get(symbol).copied().unwrap_or(0.0)
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|p| **p > 0.0).count()
    }
}

/// A dense joint distribution over a product of finite alphabets, stored in
/// row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    shape: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(shape: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return arg(format!("invalid joint shape {shape:?}"));
        }
        let len: usize = shape.iter().product();
        if len != probs.len() {
            return arg(format!(
                "shape {shape:?} needs {len} entries, got {}",
                probs.len()
            ));
        }
        check_probs(&probs)?;
        Ok(Self { shape, probs })
    }

    /// Builds a joint table by normalizing nonnegative weights.
    pub fn from_weights(shape: Vec<usize>, weights: &[f64]) -> Result<Self> {
        let d = Distribution::from_weights(weights)?;
        Self::new(shape, d.probs)
    }

    /// Builds `P(x, y) = P(x) W(y|x)` style tables from a function of the full index.
    pub fn from_fn(shape: Vec<usize>, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let len: usize = shape.iter().product();
        let mut probs = Vec::with_capacity(len);
        let mut idx = vec![0usize; shape.len()];
        for flat in 0..len {
            unflatten(&shape, flat, &mut idx);
            probs.push(f(&idx));
        }
        Self::new(shape, probs)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_axes(&self) -> usize {
        self.shape.len()
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.probs[flatten(&self.shape, idx)]
    }

    /// Collapses the table into a distribution over flat (row-major) indices.
    pub fn flatten(&self) -> Distribution {
        Distribution {
            probs: self.probs.clone(),
        }
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        for (i, a) in axes.iter().enumerate() {
            if *a >= self.shape.len() {
                return arg(format!("axis {a} out of range for {} axes", self.shape.len()));
            }
            if axes[..i].contains(a) {
                return arg(format!("axis {a} listed twice"));
            }
        }
        Ok(())
    }

    /// Sums out every axis not in `keep`; the result's axes follow the order of `keep`.
    pub fn marginalize(&self, keep: &[usize]) -> Result<JointDistribution> {
        self.check_axes(keep)?;
        if keep.is_empty() {
            return arg("must keep at least one axis");
        }
        let shape: Vec<usize> = keep.iter().map(|a| self.shape[*a]).collect();
        let mut probs = vec![0.0; shape.iter().product()];
        let mut idx = vec![0usize; self.shape.len()];
        let mut sub = vec![0usize; keep.len()];
        for (flat, p) in self.probs.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            unflatten(&self.shape, flat, &mut idx);
            for (s, a) in sub.iter_mut().zip(keep) {
                *s = idx[*a];
            }
            probs[flatten(&shape, &sub)] += p;
        }
        Ok(JointDistribution { shape, probs })
    }

    /// Marginal distribution of a single axis.
    pub fn marginal(&self, axis: usize) -> Result<Distribution> {
        Ok(self.marginalize(&[axis])?.flatten())
    }

    /// `P(rest | axis = value)`, normalized, over the remaining axes in order.
    pub fn condition(&self, axis: usize, value: usize) -> Result<JointDistribution> {
        self.check_axes(&[axis])?;
        if value >= self.shape[axis] {
            return arg(format!("value {value} outside axis {axis} of size {}", self.shape[axis]));
        }
        if self.shape.len() < 2 {
            return arg("conditioning needs at least two axes");
        }
        let shape: Vec<usize> = self
            .shape
            .iter()
            .enumerate()
            .filter(|(a, _)| *a != axis)
            .map(|(_, s)| *s)
            .collect();
        let mut probs = vec![0.0; shape.iter().product()];
        let mut idx = vec![0usize; self.shape.len()];
        let mut sub = Vec::with_capacity(shape.len());
        let mut mass = 0.0;
        for (flat, p) in self.probs.iter().enumerate() {
            unflatten(&self.shape, flat, &mut idx);
            if idx[axis] != value {
                continue;
            }
            sub.clear();
            sub.extend(idx.iter().enumerate().filter(|(a, _)| *a != axis).map(|(_, v)| *v));
            probs[flatten(&shape, &sub)] += p;
            mass += p;
        }
        if mass <= 0.0 {
            return Err(Error::Domain(format!(
                "conditioning event axis {axis} = {value} has zero probability"
            )));
        }
        for p in probs.iter_mut() {
            *p /= mass;
        }
        Ok(JointDistribution { shape, probs })
    }

    /// Reorders and groups axes: each group becomes one axis of the result,
    /// with the group's members flattened row-major. Every axis must appear
    /// in exactly one group.
    pub fn regroup(&self, groups: &[&[usize]]) -> Result<JointDistribution> {
        let all: Vec<usize> = groups.iter().flat_map(|g| g.iter().copied()).collect();
        self.check_axes(&all)?;
        if all.len() != self.shape.len() || groups.iter().any(|g| g.is_empty()) {
            return arg("regroup must use every axis exactly once in nonempty groups");
        }
        let shape: Vec<usize> = groups
            .iter()
            .map(|g| g.iter().map(|a| self.shape[*a]).product())
            .collect();
        let mut probs = vec![0.0; self.probs.len()];
        let mut idx = vec![0usize; self.shape.len()];
        let mut out = vec![0usize; groups.len()];
        for (flat, p) in self.probs.iter().enumerate() {
            unflatten(&self.shape, flat, &mut idx);
            for (o, g) in out.iter_mut().zip(groups) {
                let mut v = 0;
                for a in g.iter() {
                    v = v * self.shape[*a] + idx[*a];
                }
                *o = v;
            }
            probs[flatten(&shape, &out)] = *p;
        }
        Ok(JointDistribution { shape, probs })
    }

    /// The n-fold i.i.d. product of a two-axis joint `P(x, y)`, returned as a
    /// two-axis joint over `(X^n, Y^n)` with sequences indexed row-major.
    pub fn iid_power(&self, n: u32) -> Result<JointDistribution> {
        if self.shape.len() != 2 || n == 0 {
            return arg("iid_power needs a two-axis joint and n >= 1");
        }
        let (nx, ny) = (self.shape[0], self.shape[1]);
        let sx = nx.checked_pow(n).ok_or_else(|| Error::Argument("alphabet overflow".into()))?;
        let sy = ny.checked_pow(n).ok_or_else(|| Error::Argument("alphabet overflow".into()))?;
        crate::error::size_check("iid product table", (sx as u128) * (sy as u128), 1 << 22)?;
        let mut probs = vec![0.0; sx * sy];
        for xs in 0..sx {
            for ys in 0..sy {
                let (mut a, mut b, mut p) = (xs, ys, 1.0);
                for _ in 0..n {
                    p *= self.probs[(a % nx) * ny + b % ny];
                    a /= nx;
                    b /= ny;
                }
                probs[xs * sy + ys] = p;
            }
        }
        // Products of n factors drift by a few ulps; renormalize exactly.
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(JointDistribution {
            shape: vec![sx, sy],
            probs,
        })
    }
}

fn flatten(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (i, s)| acc * s + i)
}

fn unflatten(shape: &[usize], mut flat: usize, idx: &mut [usize]) {
    for (slot, s) in idx.iter_mut().zip(shape).rev() {
        *slot = flat % s;
        flat /= s;
    }
}

/// Independent product `P(x1, x2) = P(x1) P(x2)`.
pub fn product(d1: &Distribution, d2: &Distribution) -> JointDistribution {
    let mut probs = Vec::with_capacity(d1.probs.len() * d2.probs.len());
    for a in &d1.probs {
        for b in &d2.probs {
            probs.push(a * b);
        }
    }
    JointDistribution {
        shape: vec![d1.probs.len(), d2.probs.len()],
        probs,
    }
}

/// Draws one symbol from `dist`.
pub fn sample<R: Rng + ?Sized>(dist: &Distribution, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, p) in dist.probs.iter().enumerate() {
        if *p > 0.0 {
            last_positive = i;
            acc += p;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

/// A fixed-length string of bits, packed little-endian into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut s = Self::zeros(bits.len());
        for (i, b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => s.set(i, true),
                _ => return arg(format!("bit value {b} at position {i} is not 0 or 1")),
            }
        }
        Ok(s)
    }

    /// Parses strings like `"0110"`.
    pub fn parse(text: &str) -> Result<Self> {
        let bits: Vec<u8> = text
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Argument(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<_>>()?;
        Self::from_bits(&bits)
    }

    /// The low `len` bits of `value`, bit `i` of the string being bit `i` of the value.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        let mut s = Self::zeros(len);
        if len > 0 {
            s.words[0] = if len == 64 { value } else { value & ((1u64 << len) - 1) };
        }
        s
    }

    /// Inverse of [`BitString::from_u64`]; only valid for strings of at most 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 supports at most 64 bits");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut s = Self::zeros(len);
        for w in s.words.iter_mut() {
            *w = rng.gen();
        }
        s.mask_tail();
        s
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return arg(format!("xor of lengths {} and {}", self.len, other.len));
        }
        Ok(BitString {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        })
    }

    /// Parity of the bitwise AND, i.e. the inner product over GF(2).
    pub fn dot(&self, other: &BitString) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Bits at the given positions, in the order given.
    pub fn restrict(&self, positions: &[usize]) -> BitString {
        let mut out = BitString::zeros(positions.len());
        for (j, p) in positions.iter().enumerate() {
            if self.get(*p) {
                out.set(j, true);
            }
        }
        out
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BitString {
    type Error = crate::Error;

    fn try_from(s: String) -> Result<Self> {
        BitString::parse(&s)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Mixes a list of stream identifiers into one 64-bit value (splitmix64 finalizer).
pub fn mix_ids(ids: &[u64]) -> u64 {
    let mut h = 0x9E37_79B9_7F4A_7C15u64;
    for id in ids {
        let mut z = h ^ id.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}

/// Deterministic randomness addressed by `(master_seed, stream_id)`.
///
/// Streams are ChaCha8 keystreams: the master seed fixes the key and the
/// stream id selects an independent nonce, so per-trial streams can be
/// consumed in any order or in parallel with identical results.
#[derive(Debug, Clone)]
pub struct SeededRng {
    master_seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            inner,
        }
    }

    /// A stream addressed by a path of identifiers below this rng's address.
    pub fn substream(&self, ids: &[u64]) -> SeededRng {
        let mut path = vec![self.stream_id];
        path.extend_from_slice(ids);
        SeededRng::new(self.master_seed, mix_ids(&path))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Uniformly random `k`-subset of `items`, returned sorted.
pub fn sample_subset<R: Rng + ?Sized>(items: &[usize], k: usize, rng: &mut R) -> Vec<usize> {
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, items.len(), k.min(items.len()))
        .into_iter()
        .map(|i| items[i])
        .collect();
    picked.sort_unstable();
    picked
}
