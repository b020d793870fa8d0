use super::{Correlation, MacKernel};
use crate::info::conditional_entropy;
use crate::prob::JointDistribution;

/// Tolerance for row equality, hull membership and posterior comparison.
pub const REDUNDANCY_TOL: f64 = 1e-9;

/// True when the output determines both inputs: `H(X1, X2 | Y) <= 1e-9`.
pub fn is_perfect(c: &Correlation) -> bool {
    conditional_entropy(c.joint(), &[0, 1], &[2]).is_ok_and(|h| h <= REDUNDANCY_TOL)
}

/// Kernel-level perfectness: no output is reachable from two input pairs.
pub fn is_perfect_kernel(kernel: &MacKernel) -> bool {
    (0..kernel.y_size()).all(|y| {
        let reach = (0..kernel.x1_size())
            .flat_map(|a| (0..kernel.x2_size()).map(move |b| (a, b)))
            .filter(|(a, b)| kernel.prob(y, *a, *b) > 0.0)
            .count();
        reach <= 1
    })
}

/// Every input pair whose output row is a convex combination of the other
/// rows. Exact duplicates flag the lexicographically larger pair; the rest
/// are decided by hull membership against the remaining distinct rows.
pub fn find_redundant_inputs(kernel: &MacKernel) -> Vec<(usize, usize)> {
    let rows = kernel.rows();
    let active = vec![true; rows.len()];
    redundant_rows(&rows, &active)
        .into_iter()
        .map(|r| (r / kernel.x2_size(), r % kernel.x2_size()))
        .collect()
}

fn rows_equal(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= REDUNDANCY_TOL)
}

fn redundant_rows(rows: &[Vec<f64>], active: &[bool]) -> Vec<usize> {
    let mut flagged = vec![false; rows.len()];
    for i in 0..rows.len() {
        if active[i] && (0..i).any(|j| active[j] && rows_equal(&rows[i], &rows[j])) {
            flagged[i] = true;
        }
    }
    let distinct: Vec<usize> = (0..rows.len()).filter(|i| active[*i] && !flagged[*i]).collect();
    let mut hull_flags = Vec::new();
    for &i in &distinct {
        let others: Vec<&[f64]> = distinct.iter().filter(|j| **j != i).map(|j| rows[*j].as_slice()).collect();
        if in_convex_hull(&rows[i], &others) {
            hull_flags.push(i);
        }
    }
    for i in hull_flags {
        flagged[i] = true;
    }
    (0..rows.len()).filter(|i| flagged[*i]).collect()
}

/// Hull membership by Carathéodory: a point in the hull of points in a
/// `d`-dimensional affine space is a convex combination of at most `d + 1`
/// affinely independent ones, so it suffices to solve the equality system
/// on every affinely independent subset of that size and check the weights
/// are nonnegative.
fn in_convex_hull(target: &[f64], points: &[&[f64]]) -> bool {
    let max_support = target.len().min(points.len());
    let mut subset = Vec::new();
    (1..=max_support).any(|size| search_subsets(target, points, size, 0, &mut subset))
}

fn search_subsets(target: &[f64], points: &[&[f64]], size: usize, start: usize, subset: &mut Vec<usize>) -> bool {
    if subset.len() == size {
        return convex_weights(target, points, subset).is_some();
    }
    for i in start..points.len() {
        subset.push(i);
        if search_subsets(target, points, size, i + 1, subset) {
            return true;
        }
        subset.pop();
    }
    false
}

/// Solves `sum_j l_j * points[j] = target`, `sum_j l_j = 1` by Gaussian
/// elimination; returns the weights when the system has a unique solution
/// that is nonnegative and consistent.
fn convex_weights(target: &[f64], points: &[&[f64]], subset: &[usize]) -> Option<Vec<f64>> {
    let s = subset.len();
    let mut m: Vec<Vec<f64>> = (0..target.len())
        .map(|y| {
            let mut r: Vec<f64> = subset.iter().map(|j| points[*j][y]).collect();
            r.push(target[y]);
            r
        })
        .collect();
    let mut ones = vec![1.0; s];
    ones.push(1.0);
    m.push(ones);

    let mut row = 0;
    for col in 0..s {
        let pivot = (row..m.len()).max_by(|a, b| m[*a][col].abs().total_cmp(&m[*b][col].abs()))?;
        if m[pivot][col].abs() <= REDUNDANCY_TOL {
            // affinely dependent subset; a smaller subset covers this case
            return None;
        }
        m.swap(row, pivot);
        let p = m[row][col];
        for v in m[row].iter_mut() {
            *v /= p;
        }
        for r in 0..m.len() {
            if r != row {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..=s {
                        m[r][c] -= f * m[row][c];
                    }
                }
            }
        }
        row += 1;
    }
    if m[row..].iter().any(|r| r[s].abs() > REDUNDANCY_TOL) {
        return None;
    }
    let weights: Vec<f64> = (0..s).map(|c| m[c][s]).collect();
    weights.iter().all(|w| *w >= -REDUNDANCY_TOL).then_some(weights)
}

/// Merges output symbols whose posteriors over input pairs agree within
/// [`REDUNDANCY_TOL`]; zero-mass outputs are left alone.
pub fn merge_redundant_outputs(c: &Correlation) -> Correlation {
    let (n1, n2, ny) = (c.x1_size(), c.x2_size(), c.y_size());
    let j = c.joint();
    let mass: Vec<f64> = (0..ny)
        .map(|y| (0..n1 * n2).map(|r| j.get(&[r / n2, r % n2, y])).sum())
        .collect();
    let posterior = |y: usize| -> Vec<f64> { (0..n1 * n2).map(|r| j.get(&[r / n2, r % n2, y]) / mass[y]).collect() };

    let mut group_of: Vec<usize> = Vec::with_capacity(ny);
    let mut reps: Vec<usize> = Vec::new();
    for y in 0..ny {
        let found = if mass[y] > 0.0 {
            let py = posterior(y);
            reps.iter().position(|r| mass[*r] > 0.0 && rows_equal(&posterior(*r), &py))
        } else {
            None
        };
        match found {
            Some(g) => group_of.push(g),
            None => {
                group_of.push(reps.len());
                reps.push(y);
            }
        }
    }
    if reps.len() == ny {
        return c.clone();
    }
    let mut labels: Vec<Vec<&str>> = vec![Vec::new(); reps.len()];
    for (y, g) in group_of.iter().enumerate() {
        labels[*g].push(&c.labels()[y]);
    }
    let mut probs = vec![0.0; n1 * n2 * reps.len()];
    for x in 0..n1 * n2 {
        for (y, g) in group_of.iter().enumerate() {
            probs[x * reps.len() + g] += j.get(&[x / n2, x % n2, y]);
        }
    }
    let joint = JointDistribution::new(vec![n1, n2, reps.len()], probs).expect("merging preserves mass");
    Correlation::with_labels(joint, labels.into_iter().map(|l| l.join("|")).collect()).expect("label per output")
}

/// Drops redundant input pairs (among those with positive mass), renormalizes
/// and merges redundant outputs. Idempotent.
pub fn remove_redundancy(c: &Correlation) -> Correlation {
    let (n1, n2, ny) = (c.x1_size(), c.x2_size(), c.y_size());
    let rows: Vec<Vec<f64>> = (0..n1 * n2)
        .map(|r| c.conditional_row(r / n2, r % n2).unwrap_or_else(|| vec![0.0; ny]))
        .collect();
    let active: Vec<bool> = (0..n1 * n2).map(|r| c.input_mass(r / n2, r % n2) > 0.0).collect();
    let drop = redundant_rows(&rows, &active);
    let dropped = if drop.is_empty() {
        c.clone()
    } else {
        let j = c.joint();
        let weights: Vec<f64> = j
            .probs()
            .iter()
            .enumerate()
            .map(|(i, p)| if drop.contains(&(i / ny)) { 0.0 } else { *p })
            .collect();
        let joint = JointDistribution::from_weights(j.shape().to_vec(), &weights).expect("some mass remains");
        Correlation::with_labels(joint, c.labels().to_vec()).expect("same outputs")
    };
    merge_redundant_outputs(&dropped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{adder_mac, bec, identity_mac, noisy_adder_mac, OutputSymbol};

    fn planted() -> MacKernel {
        let outputs = ["a", "b", "c"].into_iter().map(OutputSymbol::plain).collect();
        MacKernel::new(
            2,
            2,
            outputs,
            vec![
                vec![0.7, 0.2, 0.1],
                vec![0.1, 0.3, 0.6],
                vec![0.2, 0.2, 0.6],
                vec![0.4, 0.25, 0.35],
            ],
        )
        .unwrap()
    }

    #[test]
    fn perfectness_examples() {
        assert!(is_perfect(&identity_mac().uniform_correlation()));
        assert!(!is_perfect(&adder_mac().uniform_correlation()));
        assert!(!is_perfect(&bec(0.3).unwrap().uniform_correlation()));
        assert!(is_perfect_kernel(&identity_mac()));
        assert!(!is_perfect_kernel(&adder_mac()));
    }

    #[test]
    fn redundancy_examples() {
        assert!(find_redundant_inputs(&identity_mac()).is_empty());
        assert_eq!(find_redundant_inputs(&planted()), vec![(1, 1)]);
        // equal rows: the adder's (0,1) and (1,0)
        assert_eq!(find_redundant_inputs(&adder_mac()), vec![(1, 0)]);
        let na = noisy_adder_mac(0.5).unwrap();
        assert_eq!(find_redundant_inputs(&na), vec![(1, 0)]);
    }

    #[test]
    fn hull_weights_oracle() {
        let k = planted();
        let rows = k.rows();
        let pts: Vec<&[f64]> = vec![&rows[0], &rows[1]];
        let w = convex_weights(&rows[3], &pts, &[0, 1]).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
        assert!(convex_weights(&rows[2], &pts, &[0, 1]).is_none());
    }

    #[test]
    fn merge_examples() {
        // columns 0 and 1 are duplicates
        let dup = Correlation::new(
            JointDistribution::new(vec![2, 1, 3], vec![0.1, 0.1, 0.3, 0.2, 0.2, 0.1]).unwrap(),
        )
        .unwrap();
        let m = merge_redundant_outputs(&dup);
        assert_eq!(m.y_size(), 2);
        assert!((m.joint().get(&[0, 0, 0]) - 0.2).abs() < 1e-15);
        assert_eq!(m.labels()[0], "0|1");

        let id = identity_mac().uniform_correlation();
        assert_eq!(merge_redundant_outputs(&id), id);
    }

    #[test]
    fn three_outputs_two_share_posterior() {
        // outputs 0 and 1 both have posterior (0.5, 0.5, 0, 0)
        let j = JointDistribution::from_fn(vec![2, 2, 3], |i| match (i[0], i[1], i[2]) {
            (0, 0, 0) | (0, 1, 0) => 0.1,
            (0, 0, 1) | (0, 1, 1) => 0.15,
            (1, _, 2) => 0.25,
            _ => 0.0,
        })
        .unwrap();
        let m = merge_redundant_outputs(&Correlation::new(j).unwrap());
        assert_eq!(m.y_size(), 2);
    }

    #[test]
    fn pipeline_is_idempotent() {
        for c in [
            planted().uniform_correlation(),
            adder_mac().uniform_correlation(),
            noisy_adder_mac(0.3).unwrap().uniform_correlation(),
        ] {
            let once = remove_redundancy(&c);
            assert_eq!(remove_redundancy(&once), once);
        }
    }
}
