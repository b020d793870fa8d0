//! Memoryless multiple-access channels with labeled, erasure-aware outputs,
//! the symmetric erasure correlations built on top of them, and the
//! structural analyses (perfectness, redundancy, reductions).

mod reduction;
mod spec;
mod structure;

pub use reduction::{reduce_suco_to_sbc, reduce_to_suco, SbcReduction, SbcSample, SucoSamples};
pub use spec::{BranchSpec, ChannelSpec, KernelTable};
pub use structure::{
    find_redundant_inputs, is_perfect, is_perfect_kernel, merge_redundant_outputs, remove_redundancy,
    REDUNDANCY_TOL,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::prob::{sample, Distribution, JointDistribution, NORM_TOL};

/// One output symbol of a channel and which senders' inputs it hides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputSymbol {
    pub label: String,
    #[serde(default)]
    pub erased1: bool,
    #[serde(default)]
    pub erased2: bool,
}

impl OutputSymbol {
    pub fn plain(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            erased1: false,
            erased2: false,
        }
    }

    pub fn erasing(label: impl Into<String>, erased1: bool, erased2: bool) -> Self {
        Self {
            label: label.into(),
            erased1,
            erased2,
        }
    }
}

/// Transition kernel `W(y | x1, x2)`; rows are indexed by `x1 * x2_size + x2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacKernel {
    x1_size: usize,
    x2_size: usize,
    outputs: Vec<OutputSymbol>,
    w: Vec<f64>,
}

impl MacKernel {
    pub fn new(x1_size: usize, x2_size: usize, outputs: Vec<OutputSymbol>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if x1_size == 0 || x2_size == 0 || outputs.is_empty() {
            return arg("kernel alphabets must be nonempty");
        }
        if rows.len() != x1_size * x2_size {
            return arg(format!("expected {} rows, got {}", x1_size * x2_size, rows.len()));
        }
        for (i, o) in outputs.iter().enumerate() {
            if outputs[..i].iter().any(|p| p.label == o.label) {
                return arg(format!("duplicate output label '{}'", o.label));
            }
        }
        let y = outputs.len();
        let mut w = Vec::with_capacity(rows.len() * y);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != y {
                return arg(format!("row {r} has {} entries, expected {y}", row.len()));
            }
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return arg(format!("row {r} has a negative or non-finite entry"));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > NORM_TOL * y as f64 {
                return arg(format!("row {r} sums to {s}"));
            }
            w.extend_from_slice(row);
        }
        Ok(Self {
            x1_size,
            x2_size,
            outputs,
            w,
        })
    }

    pub fn x1_size(&self) -> usize {
        self.x1_size
    }

    pub fn x2_size(&self) -> usize {
        self.x2_size
    }

    pub fn y_size(&self) -> usize {
        self.outputs.len()
    }

    pub fn outputs(&self) -> &[OutputSymbol] {
        &self.outputs
    }

    pub fn row(&self, x1: usize, x2: usize) -> &[f64] {
        let y = self.outputs.len();
        let r = x1 * self.x2_size + x2;
        &self.w[r * y..(r + 1) * y]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.w.chunks(self.outputs.len()).map(|c| c.to_vec()).collect()
    }

    /// `W(y | x1, x2)`.
    pub fn prob(&self, y: usize, x1: usize, x2: usize) -> f64 {
        self.row(x1, x2)[y]
    }

    /// Joint `P(x1, x2, y) = P1(x1) P2(x2) W(y | x1, x2)`.
    pub fn correlation(&self, d1: &Distribution, d2: &Distribution) -> Result<Correlation> {
        if d1.alphabet_size() != self.x1_size || d2.alphabet_size() != self.x2_size {
            return arg("input distributions do not match the kernel's alphabets");
        }
        let joint = JointDistribution::from_fn(vec![self.x1_size, self.x2_size, self.y_size()], |i| {
            d1.prob(i[0]) * d2.prob(i[1]) * self.prob(i[2], i[0], i[1])
        })?;
        Ok(Correlation {
            joint,
            labels: self.outputs.iter().map(|o| o.label.clone()).collect(),
        })
    }

    /// Correlation at uniform inputs.
    pub fn uniform_correlation(&self) -> Correlation {
        self.correlation(
            &Distribution::uniform(self.x1_size).expect("nonempty"),
            &Distribution::uniform(self.x2_size).expect("nonempty"),
        )
        .expect("matching alphabets")
    }

    /// The input of sender 1 (resp. 2) that output `y` pins down, if it is
    /// not erased for that sender and exactly one input value is consistent.
    pub fn revealed_inputs(&self, y: usize) -> (Option<usize>, Option<usize>) {
        let mut s1 = Vec::new();
        let mut s2 = Vec::new();
        for x1 in 0..self.x1_size {
            for x2 in 0..self.x2_size {
                if self.prob(y, x1, x2) > 0.0 {
                    if !s1.contains(&x1) {
                        s1.push(x1);
                    }
                    if !s2.contains(&x2) {
                        s2.push(x2);
                    }
                }
            }
        }
        let o = &self.outputs[y];
        let h1 = (!o.erased1 && s1.len() == 1).then(|| s1[0]);
        let h2 = (!o.erased2 && s2.len() == 1).then(|| s2[0]);
        (h1, h2)
    }

    /// True when every reachable output determines the inputs it does not
    /// erase, so a receiver can read inputs directly off the outputs.
    pub fn determines_inputs(&self) -> bool {
        (0..self.y_size()).all(|y| {
            let reachable = self.w.chunks(self.y_size()).any(|r| r[y] > 0.0);
            if !reachable {
                return true;
            }
            let (h1, h2) = self.revealed_inputs(y);
            let o = &self.outputs[y];
            (o.erased1 || h1.is_some()) && (o.erased2 || h2.is_some())
        })
    }

    pub fn sample_output<R: Rng + ?Sized>(&self, x1: usize, x2: usize, rng: &mut R) -> usize {
        let row = Distribution::from_weights(self.row(x1, x2)).expect("stochastic row");
        sample(&row, rng)
    }

    fn check_inputs(&self, x1: usize, x2: usize) -> Result<()> {
        if x1 >= self.x1_size || x2 >= self.x2_size {
            return arg(format!(
                "input pair ({x1}, {x2}) outside alphabets {}x{}",
                self.x1_size, self.x2_size
            ));
        }
        Ok(())
    }
}

/// What the receiver sees for one channel use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MacSymbolOut {
    pub y: usize,
    pub erased1: bool,
    pub erased2: bool,
    pub hat_x1: Option<usize>,
    pub hat_x2: Option<usize>,
}

/// Sends two equal-length input sequences through the memoryless kernel.
pub fn transmit<R: Rng + ?Sized>(
    kernel: &MacKernel,
    x1seq: &[usize],
    x2seq: &[usize],
    rng: &mut R,
) -> Result<Vec<MacSymbolOut>> {
    if x1seq.len() != x2seq.len() {
        return arg(format!("input lengths differ: {} vs {}", x1seq.len(), x2seq.len()));
    }
    let rows: Vec<Distribution> = kernel
        .w
        .chunks(kernel.y_size())
        .map(|r| Distribution::from_weights(r).expect("stochastic row"))
        .collect();
    let revealed: Vec<_> = (0..kernel.y_size()).map(|y| kernel.revealed_inputs(y)).collect();
    x1seq
        .iter()
        .zip(x2seq)
        .map(|(a, b)| {
            kernel.check_inputs(*a, *b)?;
            let y = sample(&rows[a * kernel.x2_size + b], rng);
            let o = &kernel.outputs[y];
            Ok(MacSymbolOut {
                y,
                erased1: o.erased1,
                erased2: o.erased2,
                hat_x1: revealed[y].0,
                hat_x2: revealed[y].1,
            })
        })
        .collect()
}

/// A joint distribution over `(X1, X2, Y)` with output labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correlation {
    joint: JointDistribution,
    labels: Vec<String>,
}

impl Correlation {
    pub fn new(joint: JointDistribution) -> Result<Self> {
        if joint.num_axes() != 3 {
            return arg("a correlation is a joint over (X1, X2, Y)");
        }
        let labels = (0..joint.shape()[2]).map(|y| y.to_string()).collect();
        Ok(Self { joint, labels })
    }

    pub fn with_labels(joint: JointDistribution, labels: Vec<String>) -> Result<Self> {
        let c = Self::new(joint)?;
        if labels.len() != c.joint.shape()[2] {
            return arg("one label per output symbol is required");
        }
        Ok(Self { labels, ..c })
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn x1_size(&self) -> usize {
        self.joint.shape()[0]
    }

    pub fn x2_size(&self) -> usize {
        self.joint.shape()[1]
    }

    pub fn y_size(&self) -> usize {
        self.joint.shape()[2]
    }

    pub fn input_mass(&self, x1: usize, x2: usize) -> f64 {
        (0..self.y_size()).map(|y| self.joint.get(&[x1, x2, y])).sum()
    }

    /// `P(y | x1, x2)`; `None` where the input pair has no mass.
    pub fn conditional_row(&self, x1: usize, x2: usize) -> Option<Vec<f64>> {
        let m = self.input_mass(x1, x2);
        (m > 0.0).then(|| (0..self.y_size()).map(|y| self.joint.get(&[x1, x2, y]) / m).collect())
    }
}

/// Erasure-mixture parameters: with probability `p` the inputs go through
/// `w`, otherwise they are erased (jointly, or with the optional partial
/// branch `w_prime`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SbcParams {
    pub p: f64,
    pub w: MacKernel,
    pub w_prime: Option<MacKernel>,
    /// Fraction of positions a slightly unfair party may deviate in.
    pub delta: f64,
}

/// Label of the joint-erasure output symbol.
pub const ERASURE: &str = "e";

impl SbcParams {
    /// The composite kernel Bob actually observes.
    pub fn kernel(&self) -> MacKernel {
        match &self.w_prime {
            None => erasure_mixture(self.p, &self.w),
            Some(wp) => full_mixture(self.p, &self.w, wp),
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return arg(format!("unfairness budget {delta} outside [0,1)"));
        }
        self.delta = delta;
        Ok(self)
    }
}

/// `W` with probability `p`, joint erasure otherwise. `p = 1` omits the
/// erasure symbol altogether.
fn erasure_mixture(p: f64, w: &MacKernel) -> MacKernel {
    let mut outputs = w.outputs.clone();
    let keep_erasure = p < 1.0;
    if keep_erasure {
        outputs.push(OutputSymbol::erasing(ERASURE, true, true));
    }
    let rows = w
        .rows()
        .into_iter()
        .map(|r| {
            let mut row: Vec<f64> = r.iter().map(|v| v * p).collect();
            if keep_erasure {
                row.push(1.0 - p);
            }
            row
        })
        .collect();
    MacKernel::new(w.x1_size, w.x2_size, outputs, rows).expect("mixture of stochastic rows")
}

fn full_mixture(p: f64, w: &MacKernel, wp: &MacKernel) -> MacKernel {
    let (pe, pp, pw) = ((1.0 - p) * (1.0 - p), 2.0 * p * (1.0 - p), p * p);
    let mut outputs = w.outputs.clone();
    outputs.extend(wp.outputs.iter().cloned());
    outputs.push(OutputSymbol::erasing(ERASURE, true, true));
    let rows = w
        .rows()
        .into_iter()
        .zip(wp.rows())
        .map(|(a, b)| {
            let mut row: Vec<f64> = a.iter().map(|v| v * pw).collect();
            row.extend(b.iter().map(|v| v * pp));
            row.push(pe);
            row
        })
        .collect();
    MacKernel::new(w.x1_size, w.x2_size, outputs, rows).expect("mixture of stochastic rows")
}

fn check_open_unit(p: f64, what: &str) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return arg(format!("{what} {p} outside (0,1)"));
    }
    Ok(())
}

/// Point-to-point binary erasure channel seen as a kernel with a single
/// dummy second input. `p_erase = 0` and `1` are accepted as limits.
pub fn bec(p_erase: f64) -> Result<MacKernel> {
    if !(0.0..=1.0).contains(&p_erase) {
        return arg(format!("erasure probability {p_erase} outside [0,1]"));
    }
    let q = 1.0 - p_erase;
    MacKernel::new(
        2,
        1,
        vec![OutputSymbol::plain("0"), OutputSymbol::plain("1"), OutputSymbol::erasing(ERASURE, true, false)],
        vec![vec![q, 0.0, p_erase], vec![0.0, q, p_erase]],
    )
}

/// `Y = X1 + X2` over binary inputs.
pub fn adder_mac() -> MacKernel {
    MacKernel::new(
        2,
        2,
        vec![OutputSymbol::plain("0"), OutputSymbol::plain("1"), OutputSymbol::plain("2")],
        vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ],
    )
    .expect("static kernel")
}

/// The sum with probability `p`, erasure otherwise; `p = 1` is the adder.
pub fn noisy_adder_mac(p: f64) -> Result<MacKernel> {
    if !(p > 0.0 && p <= 1.0) {
        return arg(format!("non-erasure probability {p} outside (0,1]"));
    }
    Ok(erasure_mixture(p, &adder_mac()))
}

/// `Y = (X1, X2)`.
pub fn identity_mac() -> MacKernel {
    let outputs = ["00", "01", "10", "11"].into_iter().map(OutputSymbol::plain).collect();
    let rows = (0..4)
        .map(|r| {
            let mut row = vec![0.0; 4];
            row[r] = 1.0;
            row
        })
        .collect();
    MacKernel::new(2, 2, outputs, rows).expect("static kernel")
}

/// Partial erasure channel: with probability 1/2 Bob sees `(x1, e)`,
/// otherwise `(e, x2)`.
pub fn special_bemac() -> MacKernel {
    let outputs = vec![
        OutputSymbol::erasing("0e", false, true),
        OutputSymbol::erasing("1e", false, true),
        OutputSymbol::erasing("e0", true, false),
        OutputSymbol::erasing("e1", true, false),
    ];
    let rows = (0..4)
        .map(|r| {
            let (x1, x2) = (r / 2, r % 2);
            let mut row = vec![0.0; 4];
            row[x1] = 0.5;
            row[2 + x2] = 0.5;
            row
        })
        .collect();
    MacKernel::new(2, 2, outputs, rows).expect("static kernel")
}

fn check_revealing_branch(w: &MacKernel) -> Result<()> {
    if w.outputs.iter().any(|o| o.erased1 || o.erased2) {
        return arg("the revealed branch must not contain erasure outputs");
    }
    if w.outputs.iter().any(|o| o.label == ERASURE) {
        return arg(format!("output label '{ERASURE}' is reserved for the erasure symbol"));
    }
    Ok(())
}

/// Joint-erasure correlation: `W` with probability `p`, erasure with `1 - p`.
pub fn su_sbc(p: f64, w: MacKernel) -> Result<SbcParams> {
    check_open_unit(p, "non-erasure probability")?;
    check_revealing_branch(&w)?;
    Ok(SbcParams {
        p,
        w,
        w_prime: None,
        delta: 0.0,
    })
}

/// Three-branch correlation: erasure `(1-p)^2`, partial erasure `W'` with
/// `2p(1-p)`, `W` with `p^2`. Every `W'` output must erase exactly one sender.
pub fn su_sbc_full(p: f64, w: MacKernel, w_prime: MacKernel) -> Result<SbcParams> {
    check_open_unit(p, "non-erasure probability")?;
    check_revealing_branch(&w)?;
    if (w_prime.x1_size, w_prime.x2_size) != (w.x1_size, w.x2_size) {
        return arg("W and W' must share input alphabets");
    }
    if w_prime.outputs.iter().any(|o| o.erased1 == o.erased2) {
        return arg("every partial-erasure output must erase exactly one sender");
    }
    if w_prime.outputs.iter().any(|o| w.outputs.iter().any(|q| q.label == o.label) || o.label == ERASURE) {
        return arg("W and W' output labels must be distinct");
    }
    let sbc = SbcParams {
        p,
        w,
        w_prime: Some(w_prime),
        delta: 0.0,
    };
    let k = sbc.kernel();
    for x1 in 0..k.x1_size {
        for x2 in 0..k.x2_size {
            let erased: f64 = k
                .outputs
                .iter()
                .zip(k.row(x1, x2))
                .filter(|(o, _)| o.erased1 || o.erased2)
                .map(|(_, v)| v)
                .sum();
            if (erased - (1.0 - p * p)).abs() > 1e-12 {
                return Err(Error::Domain(format!("erasure mass {erased} differs from 1 - p^2")));
            }
        }
    }
    Ok(sbc)
}

/// Independent per-sender erasures: sender `i` is revealed with probability
/// `p_i`, and `W` applies when both are.
pub fn su_sbc_independent(p1: f64, p2: f64, w: MacKernel) -> Result<MacKernel> {
    check_open_unit(p1, "sender-1 non-erasure probability")?;
    check_open_unit(p2, "sender-2 non-erasure probability")?;
    check_revealing_branch(&w)?;
    let (n1, n2) = (w.x1_size, w.x2_size);
    let mut outputs = w.outputs.clone();
    let only1: Vec<usize> = (0..n1).map(|x| outputs.len() + x).collect();
    outputs.extend((0..n1).map(|x| OutputSymbol::erasing(format!("{x}e"), false, true)));
    let only2: Vec<usize> = (0..n2).map(|x| outputs.len() + x).collect();
    outputs.extend((0..n2).map(|x| OutputSymbol::erasing(format!("e{x}"), true, false)));
    outputs.push(OutputSymbol::erasing(ERASURE, true, true));
    let y = outputs.len();
    let mut rows = Vec::new();
    for x1 in 0..n1 {
        for x2 in 0..n2 {
            let mut row = vec![0.0; y];
            for (j, v) in w.row(x1, x2).iter().enumerate() {
                row[j] = p1 * p2 * v;
            }
            row[only1[x1]] = p1 * (1.0 - p2);
            row[only2[x2]] = (1.0 - p1) * p2;
            row[y - 1] = (1.0 - p1) * (1.0 - p2);
            rows.push(row);
        }
    }
    MacKernel::new(n1, n2, outputs, rows)
}

/// Binary symmetric noise on each component of the identity channel:
/// `(x1, x2)` is reported with each bit flipped independently w.p. `nu`.
pub fn noisy_identity_mac(nu: f64) -> Result<MacKernel> {
    if !(0.0..0.5).contains(&nu) {
        return arg(format!("flip probability {nu} outside [0, 1/2)"));
    }
    let outputs = ["00", "01", "10", "11"].into_iter().map(OutputSymbol::plain).collect();
    let rows = (0..4usize)
        .map(|r| {
            (0..4usize)
                .map(|o| {
                    let d = (r ^ o).count_ones() as i32;
                    nu.powi(d) * (1.0 - nu).powi(2 - d)
                })
                .collect()
        })
        .collect();
    MacKernel::new(2, 2, outputs, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{conditional_entropy, mutual_information};
    use crate::prob::SeededRng;

    fn all_rows_stochastic(k: &MacKernel) -> bool {
        k.rows().iter().all(|r| (r.iter().sum::<f64>() - 1.0).abs() <= 1e-12)
    }

    #[test]
    fn builder_examples() {
        assert_eq!(adder_mac().prob(1, 0, 1), 1.0);
        let na = noisy_adder_mac(0.5).unwrap();
        let e = na.y_size() - 1;
        assert_eq!(na.outputs()[e].label, "e");
        assert_eq!(na.prob(e, 0, 0), 0.5);
        assert_eq!(na.prob(0, 0, 0), 0.5);
        let b = bec(0.5).unwrap();
        assert!((0..2).all(|x| b.prob(2, x, 0) == 0.5));
        assert_eq!(noisy_adder_mac(1.0).unwrap(), adder_mac());
        assert!(noisy_adder_mac(0.0).is_err());
        assert!(su_sbc(1.0, identity_mac()).is_err());
        assert!(su_sbc(0.0, identity_mac()).is_err());
    }

    #[test]
    fn builders_are_stochastic() {
        let kernels = vec![
            bec(0.3).unwrap(),
            adder_mac(),
            noisy_adder_mac(0.7).unwrap(),
            identity_mac(),
            special_bemac(),
            su_sbc(0.4, identity_mac()).unwrap().kernel(),
            su_sbc_full(0.4, identity_mac(), special_bemac()).unwrap().kernel(),
            su_sbc_independent(0.3, 0.6, identity_mac()).unwrap(),
            noisy_identity_mac(0.1).unwrap(),
        ];
        assert!(kernels.iter().all(all_rows_stochastic));
    }

    #[test]
    fn full_mixture_branch_masses() {
        let k = su_sbc_full(0.4, identity_mac(), special_bemac()).unwrap().kernel();
        let row = k.row(1, 0);
        let joint_e = row[k.y_size() - 1];
        assert!((joint_e - 0.36).abs() < 1e-12);
        let partial: f64 = k.outputs().iter().zip(row).filter(|(o, _)| o.erased1 != o.erased2).map(|(_, v)| v).sum();
        assert!((partial - 0.48).abs() < 1e-12);
        assert!(su_sbc_full(0.4, identity_mac(), identity_mac()).is_err());
    }

    #[test]
    fn noisy_adder_information_closed_forms() {
        for p in [0.2, 0.5, 0.8] {
            let j = noisy_adder_mac(p).unwrap().uniform_correlation();
            let i12 = mutual_information(j.joint(), &[0, 1], &[2], &[]).unwrap();
            let i1 = mutual_information(j.joint(), &[0], &[2], &[1]).unwrap();
            assert!((i12 - 1.5 * p).abs() <= 1e-9);
            assert!((i1 - p).abs() <= 1e-9);
        }
    }

    #[test]
    fn transmit_examples() {
        let mut rng = SeededRng::new(3, 0);
        let x1 = [0, 1, 1, 0, 1];
        let x2 = [1, 1, 0, 0, 0];
        let out = transmit(&identity_mac(), &x1, &x2, &mut rng).unwrap();
        for (i, o) in out.iter().enumerate() {
            assert_eq!((o.hat_x1, o.hat_x2), (Some(x1[i]), Some(x2[i])));
        }
        let b = bec(0.0).unwrap();
        let out = transmit(&b, &[0, 1, 1], &[0, 0, 0], &mut rng).unwrap();
        assert!(out.iter().all(|o| !o.erased1));

        let k = su_sbc(0.5, identity_mac()).unwrap().kernel();
        let n = 10_000;
        let xs: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let out = transmit(&k, &xs, &xs, &mut rng).unwrap();
        let erased = out.iter().filter(|o| o.erased1 && o.erased2).count() as f64 / n as f64;
        assert!((0.48..=0.52).contains(&erased));
        assert!(transmit(&k, &[0, 2], &[0, 0], &mut rng).is_err());
        assert!(transmit(&k, &[0], &[0, 0], &mut rng).is_err());
    }

    #[test]
    fn revealed_inputs_follow_structure() {
        let na = noisy_adder_mac(0.5).unwrap();
        assert_eq!(na.revealed_inputs(0), (Some(0), Some(0)));
        assert_eq!(na.revealed_inputs(1), (None, None));
        assert!(!na.determines_inputs());
        assert!(su_sbc(0.5, identity_mac()).unwrap().kernel().determines_inputs());
        let sb = special_bemac();
        assert_eq!(sb.revealed_inputs(1), (Some(1), None));
    }

    #[test]
    fn adder_conditional_entropy() {
        let c = adder_mac().uniform_correlation();
        assert!((conditional_entropy(c.joint(), &[0, 1], &[2]).unwrap() - 0.5).abs() <= 1e-12);
    }
}
