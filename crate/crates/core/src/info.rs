//! Entropy measures in bits and the quantitative bounds built on them.
//!
//! Conditional min-entropy is the worst case over conditioning values,
//! `H_inf(X|Y) = min_y H_inf(X|Y=y)`, and conditional zero-entropy the
//! corresponding maximum. Smoothing of conditional quantities keeps the
//! conditioning marginal fixed, which turns the optimization into a one
//! dimensional threshold search solved exactly; the value is therefore a
//! lower bound on smoothing over unrestricted joints.

use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::prob::{Distribution, JointDistribution};

/// Slack used by the inequality checks below.
pub const CHECK_TOL: f64 = 1e-9;

fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of a probability vector; mass need not be normalized.
pub fn entropy_of(probs: &[f64]) -> f64 {
    -probs.iter().map(|p| xlog2x(*p)).sum::<f64>()
}

pub fn shannon_entropy(d: &Distribution) -> f64 {
    entropy_of(d.probs())
}

pub fn binary_entropy(p: f64) -> f64 {
    entropy_of(&[p, 1.0 - p])
}

/// `H(axes)` of a joint table.
pub fn joint_entropy(j: &JointDistribution, axes: &[usize]) -> Result<f64> {
    if axes.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy_of(j.marginalize(axes)?.probs()))
}

fn disjoint(a: &[usize], b: &[usize]) -> Result<()> {
    if a.iter().any(|x| b.contains(x)) {
        return arg(format!("axis sets {a:?} and {b:?} overlap"));
    }
    Ok(())
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

/// `H(target | given) = H(target, given) - H(given)`.
pub fn conditional_entropy(j: &JointDistribution, target: &[usize], given: &[usize]) -> Result<f64> {
    if target.is_empty() {
        return arg("conditional entropy needs a nonempty target");
    }
    disjoint(target, given)?;
    Ok(joint_entropy(j, &union(target, given))? - joint_entropy(j, given)?)
}

/// `I(A; B | C)`; pass an empty `given` for the unconditional version.
pub fn mutual_information(
    j: &JointDistribution,
    a: &[usize],
    b: &[usize],
    given: &[usize],
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return arg("mutual information needs nonempty axis sets");
    }
    disjoint(a, b)?;
    disjoint(a, given)?;
    disjoint(b, given)?;
    let h_ac = joint_entropy(j, &union(a, given))?;
    let h_bc = joint_entropy(j, &union(b, given))?;
    let h_abc = joint_entropy(j, &union(&union(a, b), given))?;
    let h_c = joint_entropy(j, given)?;
    Ok(h_ac + h_bc - h_abc - h_c)
}

/// Half the L1 distance between two distributions on the same alphabet.
pub fn statistical_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.alphabet_size() != q.alphabet_size() {
        return arg(format!(
            "alphabet sizes differ: {} vs {}",
            p.alphabet_size(),
            q.alphabet_size()
        ));
    }
    Ok(0.5 * p.probs().iter().zip(q.probs()).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

pub fn min_entropy(d: &Distribution) -> f64 {
    let max = d.probs().iter().cloned().fold(0.0, f64::max);
    -max.log2()
}

pub fn zero_entropy(d: &Distribution) -> f64 {
    (d.support_size() as f64).log2()
}

pub fn collision_probability(d: &Distribution) -> f64 {
    d.probs().iter().map(|p| p * p).sum()
}

pub fn renyi2_entropy(d: &Distribution) -> f64 {
    -collision_probability(d).log2()
}

fn two_axes(j: &JointDistribution) -> Result<(usize, usize)> {
    match j.shape() {
        [x, y] => Ok((*x, *y)),
        s => arg(format!("expected a two-axis joint (X, Y), got shape {s:?}")),
    }
}

/// Slices `P(., y)` for every `y` with positive mass, as `(P(y), P(.|y))`.
fn slices(j: &JointDistribution) -> Result<Vec<(f64, Vec<f64>)>> {
    let (nx, ny) = two_axes(j)?;
    let p = j.probs();
    let mut out = Vec::new();
    for y in 0..ny {
        let py: f64 = (0..nx).map(|x| p[x * ny + y]).sum();
        if py > 0.0 {
            out.push((py, (0..nx).map(|x| p[x * ny + y] / py).collect()));
        }
    }
    if out.is_empty() {
        return arg("joint has no mass");
    }
    Ok(out)
}

/// `min_y H_inf(X | Y = y)` over `y` with positive mass, for a joint over `(X, Y)`.
pub fn conditional_min_entropy(j: &JointDistribution) -> Result<f64> {
    let worst = slices(j)?
        .iter()
        .map(|(_, s)| s.iter().cloned().fold(0.0, f64::max))
        .fold(0.0, f64::max);
    Ok(-worst.log2())
}

/// `max_y H_0(X | Y = y)` over `y` with positive mass, for a joint over `(X, Y)`.
pub fn conditional_zero_entropy(j: &JointDistribution) -> Result<f64> {
    let widest = slices(j)?
        .iter()
        .map(|(_, s)| s.iter().filter(|p| **p > 0.0).count())
        .max()
        .unwrap_or(1);
    Ok((widest as f64).log2())
}

/// Smallest `t >= floor` with `sum_i w_i * max(c_i - t, 0) <= eps`.
///
/// The left side is piecewise linear and decreasing in `t` with breakpoints
/// at the `c_i`, so the root is found by walking the sorted breakpoints.
fn cap_threshold(mut items: Vec<(f64, f64)>, eps: f64, floor: f64) -> f64 {
    items.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut sum_wc, mut sum_w) = (0.0, 0.0);
    for i in 0..items.len() {
        let (c, w) = items[i];
        sum_wc += w * c;
        sum_w += w;
        let next = items.get(i + 1).map_or(0.0, |x| x.0);
        let t = (sum_wc - eps) / sum_w;
        if t >= next {
            return t.max(floor);
        }
    }
    floor
}

fn smooth_min_entropy_unchecked(d: &Distribution, eps: f64) -> f64 {
    let floor = 1.0 / d.alphabet_size() as f64;
    let items = d.probs().iter().map(|p| (*p, 1.0)).collect();
    -cap_threshold(items, eps, floor).log2()
}

/// Exact `H_inf^eps(X)`: the best distribution within distance `eps` caps the
/// largest masses at a common level and spreads the excess below it.
pub fn smooth_min_entropy(d: &Distribution, eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return arg(format!("smoothing parameter {eps} outside [0,1)"));
    }
    Ok(smooth_min_entropy_unchecked(d, eps))
}

/// Cap on `|X| * |Y|` for exact conditional smoothing.
pub const SMOOTH_COND_CAP: u128 = 1 << 20;

pub(crate) fn smooth_conditional_unchecked(j: &JointDistribution, eps: f64) -> Result<f64> {
    let (nx, _) = two_axes(j)?;
    let items = slices(j)?
        .into_iter()
        .flat_map(|(py, s)| s.into_iter().map(move |c| (c, py)))
        .collect();
    Ok(-cap_threshold(items, eps, 1.0 / nx as f64).log2())
}

/// `H_inf^eps(X | Y)` for a joint over `(X, Y)`, smoothing within each
/// `Y = y` slice while holding `P(y)` fixed.
pub fn smooth_conditional_min_entropy(j: &JointDistribution, eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return arg(format!("smoothing parameter {eps} outside [0,1)"));
    }
    crate::error::size_check("conditional smoothing table", j.probs().len() as u128, SMOOTH_COND_CAP)?;
    smooth_conditional_unchecked(j, eps)
}

/// Both sides of the min-entropy versus smooth min-entropy sandwich
/// `H^eps - log(1/eps) <= H_inf <= H^eps` for a joint over `(U, V)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichCheck {
    pub min_entropy: f64,
    pub smooth: f64,
    pub log_term: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub fn check_lemma1(j: &JointDistribution, eps: f64) -> Result<SandwichCheck> {
    if !(eps > 0.0 && eps < 1.0) {
        return arg(format!("smoothing parameter {eps} outside (0,1)"));
    }
    let h = conditional_min_entropy(j)?;
    let hs = smooth_conditional_min_entropy(j, eps)?;
    let log_term = (1.0 / eps).log2();
    Ok(SandwichCheck {
        min_entropy: h,
        smooth: hs,
        log_term,
        lower_holds: hs - log_term <= h + CHECK_TOL,
        upper_holds: h <= hs + CHECK_TOL,
    })
}

/// Lower bound on `H_inf^eps(X^n | Y^n)` for i.i.d. pairs:
/// `n H(X|Y) - 4 sqrt(n log(1/eps)) log|X|`. May be negative.
pub fn iid_smooth_lower_bound(n: u32, h_cond: f64, eps: f64, alphabet: usize) -> f64 {
    let n = n as f64;
    n * h_cond - 4.0 * (n * (1.0 / eps).log2()).sqrt() * (alphabet as f64).log2()
}

/// One inequality of the chain-rule report: `lhs >= rhs` is claimed and
/// `margin = lhs - rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

impl Inequality {
    fn ge(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            margin: lhs - rhs,
            holds: lhs >= rhs - CHECK_TOL,
        }
    }
}

/// The chain rules for smooth min-entropy over a joint of `(U, V, W)`.
///
/// * `first`: `H^{e+e'}(U|VW) >= H_inf(U|W) + H^e(V|UW) - H_0(V|W) - log(1/e')`
/// * `second_lower`: `H^e(UV|W) >= H^{e+e'}(U|VW) + H_0(V|W) + log(1/e')`
/// * `second_upper`: `H_inf(U|W) + H^e(V|UW) >= H^e(UV|W)`
/// * `third`: `H^e(UV|W) >= H_inf(U|W) + H^e(V|UW)`
///
/// `second_lower` and `second_upper` are stated as one sandwich; they fail on
/// simple inputs (independent uniform bits already break the lower half), and
/// the report records the margins rather than asserting them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainRuleReport {
    pub first: Inequality,
    pub second_lower: Inequality,
    pub second_upper: Inequality,
    pub third: Inequality,
}

pub fn chain_rule_bounds(j3: &JointDistribution, eps: f64, eps2: f64) -> Result<ChainRuleReport> {
    if j3.num_axes() != 3 {
        return arg("chain rule bounds need a joint over (U, V, W)");
    }
    for e in [eps, eps2] {
        if !(e > 0.0 && e < 1.0) {
            return arg(format!("smoothing parameter {e} outside (0,1)"));
        }
    }
    let u_given_vw = j3.regroup(&[&[0], &[1, 2]])?;
    let v_given_uw = j3.regroup(&[&[1], &[0, 2]])?;
    let uv_given_w = j3.regroup(&[&[0, 1], &[2]])?;
    let u_given_w = j3.marginalize(&[0, 2])?;
    let v_given_w = j3.marginalize(&[1, 2])?;

    let h_u_vw = smooth_conditional_unchecked(&u_given_vw, eps + eps2)?;
    let h_u_w = conditional_min_entropy(&u_given_w)?;
    let h_v_uw = smooth_conditional_unchecked(&v_given_uw, eps)?;
    let h0_v_w = conditional_zero_entropy(&v_given_w)?;
    let h_uv_w = smooth_conditional_unchecked(&uv_given_w, eps)?;
    let log_term = (1.0 / eps2).log2();

    Ok(ChainRuleReport {
        first: Inequality::ge(h_u_vw, h_u_w + h_v_uw - h0_v_w - log_term),
        second_lower: Inequality::ge(h_uv_w, h_u_vw + h0_v_w + log_term),
        second_upper: Inequality::ge(h_u_w + h_v_uw, h_uv_w),
        third: Inequality::ge(h_uv_w, h_u_w + h_v_uw),
    })
}

/// `1 + 3 log|X| sqrt((p + q) ln2 / (2pq) * I)`.
pub fn continuity_bound_value(p: f64, q: f64, mutual_info: f64, x_size: usize) -> f64 {
    let inner = (p + q) * std::f64::consts::LN_2 / (2.0 * p * q) * mutual_info.max(0.0);
    1.0 + 3.0 * (x_size as f64).log2() * inner.sqrt()
}

/// The bound on `|H(X|Y,Z=z1) - H(X|Y,Z=z2)|` for a joint over `(X, Y, Z)`.
pub fn entropy_continuity_bound(j3: &JointDistribution, z1: usize, z2: usize) -> Result<f64> {
    Ok(continuity_check(j3, z1, z2)?.bound)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityCheck {
    pub difference: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn continuity_check(j3: &JointDistribution, z1: usize, z2: usize) -> Result<ContinuityCheck> {
    if j3.num_axes() != 3 {
        return arg("continuity bound needs a joint over (X, Y, Z)");
    }
    let pz = j3.marginal(2)?;
    let (p, q) = (pz.prob(z1), pz.prob(z2));
    if p <= 0.0 || q <= 0.0 {
        return Err(Error::Domain(format!(
            "conditioning values {z1}, {z2} need positive mass (got {p}, {q})"
        )));
    }
    let mi = mutual_information(j3, &[0, 1], &[2], &[])?;
    let bound = continuity_bound_value(p, q, mi, j3.shape()[0]);
    let h1 = conditional_entropy(&j3.condition(2, z1)?, &[0], &[1])?;
    let h2 = conditional_entropy(&j3.condition(2, z2)?, &[0], &[1])?;
    let difference = (h1 - h2).abs();
    Ok(ContinuityCheck {
        difference,
        bound,
        holds: difference <= bound + CHECK_TOL,
    })
}

/// `h(e1) + h(e2) + log2(|S1| - 1) + log2(|S2| - 1)`.
pub fn fano_key_bound(eps1: f64, eps2: f64, s1_card: usize, s2_card: usize) -> Result<f64> {
    if s1_card < 2 || s2_card < 2 {
        return arg("key alphabets need at least two elements");
    }
    for e in [eps1, eps2] {
        if !(0.0..=1.0).contains(&e) {
            return arg(format!("error probability {e} outside [0,1]"));
        }
    }
    Ok(binary_entropy(eps1)
        + binary_entropy(eps2)
        + ((s1_card - 1) as f64).log2()
        + ((s2_card - 1) as f64).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::product;

    fn d(p: &[f64]) -> Distribution {
        Distribution::new(p.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn adder() -> JointDistribution {
        JointDistribution::from_fn(vec![2, 2, 3], |i| if i[0] + i[1] == i[2] { 0.25 } else { 0.0 })
            .unwrap()
    }

    #[test]
    fn shannon_examples() {
        assert!(close(shannon_entropy(&d(&[0.5, 0.5])), 1.0, 1e-15));
        assert_eq!(shannon_entropy(&d(&[1.0, 0.0])), 0.0);
        assert!(close(shannon_entropy(&d(&[0.25, 0.5, 0.25])), 1.5, 1e-15));
        assert!(close(binary_entropy(0.5), 1.0, 1e-15));
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!(close(binary_entropy(0.11), 0.4999, 1e-3));
    }

    #[test]
    fn conditional_and_mutual_examples() {
        let j = adder();
        assert!(close(conditional_entropy(&j, &[0, 1], &[2]).unwrap(), 0.5, 1e-12));
        assert!(close(mutual_information(&j, &[0, 1], &[2], &[]).unwrap(), 1.5, 1e-12));
        assert!(close(mutual_information(&j, &[0], &[1], &[2]).unwrap(), 0.5, 1e-12));

        // noisy adder p = 0.5: erase with prob 0.5, else the sum
        let noisy = JointDistribution::from_fn(vec![2, 2, 4], |i| {
            let s = i[0] + i[1];
            0.25 * if i[2] == 3 { 0.5 } else if i[2] == s { 0.5 } else { 0.0 }
        })
        .unwrap();
        assert!(close(conditional_entropy(&noisy, &[0], &[2]).unwrap(), 0.75, 1e-12));

        // BEC(0.5) uniform: I = 0.5
        let bec = JointDistribution::new(vec![2, 3], vec![0.25, 0.0, 0.25, 0.0, 0.25, 0.25]).unwrap();
        assert!(close(mutual_information(&bec, &[0], &[1], &[]).unwrap(), 0.5, 1e-12));

        let ind = product(&d(&[0.3, 0.7]), &d(&[0.6, 0.4]));
        assert!(close(mutual_information(&ind, &[0], &[1], &[]).unwrap(), 0.0, 1e-12));
        assert!(conditional_entropy(&j, &[0], &[0]).is_err());
        assert!(mutual_information(&j, &[0], &[5], &[]).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(statistical_distance(&d(&[0.2, 0.8]), &d(&[0.2, 0.8])).unwrap(), 0.0);
        assert_eq!(statistical_distance(&d(&[1.0, 0.0]), &d(&[0.0, 1.0])).unwrap(), 1.0);
        assert!(close(statistical_distance(&d(&[0.6, 0.4]), &d(&[0.5, 0.5])).unwrap(), 0.1, 1e-15));
        assert!(statistical_distance(&d(&[1.0]), &d(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn renyi_examples() {
        assert_eq!(min_entropy(&Distribution::uniform(4).unwrap()), 2.0);
        assert_eq!(min_entropy(&d(&[0.5, 0.25, 0.25])), 1.0);
        assert_eq!(zero_entropy(&d(&[0.5, 0.5, 0.0, 0.0])), 1.0);
        assert_eq!(collision_probability(&d(&[0.5, 0.5])), 0.5);
        assert_eq!(renyi2_entropy(&d(&[0.5, 0.5])), 1.0);
        assert_eq!(renyi2_entropy(&d(&[1.0, 0.0])), 0.0);
        assert!(close(collision_probability(&d(&[0.75, 0.25])), 0.625, 1e-15));
        assert!(close(renyi2_entropy(&d(&[0.75, 0.25])), 0.678, 1e-3));
    }

    #[test]
    fn smooth_examples() {
        let x = d(&[0.7, 0.2, 0.1]);
        assert_eq!(smooth_min_entropy(&x, 0.0).unwrap(), min_entropy(&x));
        assert!(close(smooth_min_entropy(&d(&[0.6, 0.4]), 0.1).unwrap(), 1.0, 1e-12));
        assert!(close(smooth_min_entropy(&x, 0.1).unwrap(), -(0.6f64).log2(), 1e-12));
        assert!(smooth_min_entropy(&x, 1.0).is_err());
        // headroom: smoothing can never exceed log|X|
        assert!(close(smooth_min_entropy(&d(&[0.6, 0.4]), 0.5).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn smooth_conditional_examples() {
        let j = JointDistribution::new(vec![2, 2], vec![0.3, 0.25, 0.2, 0.25]).unwrap();
        assert!(close(
            smooth_conditional_min_entropy(&j, 0.0).unwrap(),
            conditional_min_entropy(&j).unwrap(),
            1e-12
        ));
        let u = JointDistribution::new(vec![2, 2], vec![0.25; 4]).unwrap();
        for eps in [0.0, 0.1, 0.3, 0.49] {
            assert!(smooth_conditional_min_entropy(&u, eps).unwrap() >= 1.0 - 1e-12);
        }
        // slices [0.6,0.4] and [0.5,0.5] with P(y) = 1/2: removing 0.05 of
        // joint mass lowers the first slice's top to 0.5 exactly
        assert!(close(smooth_conditional_min_entropy(&j, 0.05).unwrap(), 1.0, 1e-12));
        assert!(close(smooth_conditional_min_entropy(&j, 0.02).unwrap(), -(0.56f64).log2(), 1e-12));
    }

    #[test]
    fn conditional_min_and_zero() {
        let j = adder().regroup(&[&[0, 1], &[2]]).unwrap();
        assert_eq!(conditional_min_entropy(&j).unwrap(), 0.0);
        assert_eq!(conditional_zero_entropy(&j).unwrap(), 1.0);
    }

    #[test]
    fn sandwich_examples() {
        let u = JointDistribution::new(vec![2, 2], vec![0.25; 4]).unwrap();
        let c = check_lemma1(&u, 0.1).unwrap();
        assert!(c.lower_holds && c.upper_holds);
        let j = JointDistribution::new(vec![2, 2], vec![0.3, 0.25, 0.2, 0.25]).unwrap();
        let c = check_lemma1(&j, 1e-12).unwrap();
        assert!(close(c.smooth, c.min_entropy, 1e-9));
    }

    #[test]
    fn iid_lower_bound_examples() {
        assert!(close(iid_smooth_lower_bound(4, 0.5, 1.0 - 1e-15, 2), 2.0, 1e-6));
        assert!(close(iid_smooth_lower_bound(4, 0.5, 1.0 / 16.0, 2), -14.0, 1e-12));
    }

    #[test]
    fn chain_rule_independent_bits() {
        let j = JointDistribution::new(vec![2, 2, 2], vec![0.125; 8]).unwrap();
        let r = chain_rule_bounds(&j, 0.1, 0.1).unwrap();
        assert!(r.first.holds && r.third.holds && r.second_upper.holds);
        // H^e(UV|W) = 2 cannot reach 1 + 1 + log(10)
        assert!(!r.second_lower.holds);
        assert!(close(r.second_lower.margin, -(10f64).log2(), 1e-12));
    }

    #[test]
    fn continuity_examples() {
        let ind = JointDistribution::new(vec![2, 2, 2], vec![0.125; 8]).unwrap();
        let c = continuity_check(&ind, 0, 1).unwrap();
        assert!(close(c.bound, 1.0, 1e-12) && c.difference < 1e-12);
        let v = continuity_bound_value(0.5, 0.5, 0.5, 2);
        let oracle = 1.0 + 3.0 * (1.0f64 * std::f64::consts::LN_2 / 0.5 * 0.5).sqrt();
        assert!(close(v, oracle, 1e-12));
        let degenerate = JointDistribution::from_fn(vec![2, 2, 2], |i| if i[2] == 0 { 0.25 } else { 0.0 })
            .unwrap();
        assert!(matches!(continuity_check(&degenerate, 0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn fano_examples() {
        assert_eq!(fano_key_bound(0.0, 0.0, 2, 2).unwrap(), 0.0);
        assert!(close(fano_key_bound(0.5, 0.5, 2, 2).unwrap(), 2.0, 1e-15));
        let v = fano_key_bound(0.11, 0.11, 4, 4).unwrap();
        assert!(close(v, 2.0 * (binary_entropy(0.11) + 3f64.log2()), 1e-12));
        assert!(fano_key_bound(0.1, 0.1, 1, 4).is_err());
    }
}
