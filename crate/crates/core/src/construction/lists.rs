use std::collections::HashMap;

use rayon::prelude::*;

use super::{binomial, FiniteCode, ENUMERATION_BUDGET};
use crate::geometry::sq_dist;
use crate::{Error, Result};

/// Every `L`-subset of `points` (ascending indices, lexicographic order) whose
/// average squared radius is at most `threshold`, paired with that radius.
///
/// A pair at squared distance `d2` forces the average squared radius of any
/// list containing it up to at least `d2 / (2L)`, so only cliques of the
/// graph with edges `d2 <= 2L threshold` are searched.
pub fn lists_below(points: &[Vec<f64>], list_len: usize, threshold: f64) -> Vec<(Vec<usize>, f64)> {
    if list_len < 2 || points.len() < list_len {
        return Vec::new();
    }
    let edge = 2.0 * list_len as f64 * threshold * (1.0 + 1e-9);
    let adj = forward_neighbours(points, edge);
    let scale = (list_len * list_len) as f64;
    let per_root: Vec<Vec<(Vec<usize>, f64)>> = (0..points.len())
        .into_par_iter()
        .map(|root| {
            let mut out = Vec::new();
            let mut chosen = vec![root];
            extend(points, &adj, list_len, threshold * scale, &mut chosen, &adj[root], 0.0, &mut out);
            out.into_iter().map(|(l, s)| (l, s / scale)).collect()
        })
        .collect();
    per_root.into_iter().flatten().collect()
}

#[allow(clippy::too_many_arguments)]
fn extend(
    points: &[Vec<f64>],
    adj: &[Vec<usize>],
    list_len: usize,
    limit: f64,
    chosen: &mut Vec<usize>,
    candidates: &[usize],
    pair_sum: f64,
    out: &mut Vec<(Vec<usize>, f64)>,
) {
    for (pos, &c) in candidates.iter().enumerate() {
        let sum = pair_sum + chosen.iter().map(|&a| sq_dist(&points[a], &points[c])).sum::<f64>();
        if sum > limit {
            continue;
        }
        chosen.push(c);
        if chosen.len() == list_len {
            out.push((chosen.clone(), sum));
        } else {
            let next = intersect(&candidates[pos + 1..], &adj[c]);
            if next.len() + chosen.len() >= list_len {
                extend(points, adj, list_len, limit, chosen, &next, sum, out);
            }
        }
        chosen.pop();
    }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// For each `i`, the sorted indices `j > i` with `|x_i - x_j|^2 <= bound`.
fn forward_neighbours(points: &[Vec<f64>], bound: f64) -> Vec<Vec<usize>> {
    let m = points.len();
    let dim = points.first().map_or(0, Vec::len);
    let cells_visited = 3f64.powi(dim as i32);
    if bound <= 0.0 || cells_visited >= m as f64 {
        return (0..m)
            .into_par_iter()
            .map(|i| ((i + 1)..m).filter(|&j| sq_dist(&points[i], &points[j]) <= bound).collect())
            .collect();
    }
    let side = bound.sqrt();
    let key = |p: &[f64]| -> Vec<i64> { p.iter().map(|v| (v / side).floor() as i64).collect() };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }
    (0..m)
        .into_par_iter()
        .map(|i| {
            let base = key(&points[i]);
            let mut found = Vec::new();
            let mut offset = vec![-1i64; dim];
            loop {
                let cell: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
                if let Some(members) = grid.get(&cell) {
                    found
                        .extend(members.iter().copied().filter(|&j| j > i && sq_dist(&points[i], &points[j]) <= bound));
                }
                if !advance(&mut offset) {
                    break;
                }
            }
            found.sort_unstable();
            found
        })
        .collect()
}

fn advance(offset: &mut [i64]) -> bool {
    for o in offset.iter_mut() {
        if *o < 1 {
            *o += 1;
            return true;
        }
        *o = -1;
    }
    false
}

/// All `L`-subsets of the code with average squared radius `<= nN`, in
/// lexicographic order.
pub fn find_bad_lists(code: &FiniteCode) -> Result<Vec<Vec<usize>>> {
    let subsets = binomial(code.len(), code.list_len);
    if subsets > ENUMERATION_BUDGET {
        return Err(Error::Budget(format!(
            "C({}, {}) = {subsets:.3e} exceeds the enumeration budget {ENUMERATION_BUDGET:e}",
            code.len(),
            code.list_len
        )));
    }
    Ok(lists_below(&code.points, code.list_len, code.threshold()).into_iter().map(|(l, _)| l).collect())
}

/// Greedily removes the point lying in the most surviving bad lists (lowest
/// index on ties) until none survive.
pub fn expurgate(code: &FiniteCode, bad: &[Vec<usize>]) -> Result<FiniteCode> {
    let m = code.len();
    let mut member_of: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (li, list) in bad.iter().enumerate() {
        if list.len() != code.list_len || list.iter().any(|&i| i >= m) {
            return Err(Error::InvalidInput(format!(
                "bad list {li} does not index an {}-subset of the code",
                code.list_len
            )));
        }
        for &i in list {
            member_of[i].push(li);
        }
    }
    let mut count: Vec<usize> = member_of.iter().map(Vec::len).collect();
    let mut alive = vec![true; bad.len()];
    let mut removed = vec![false; m];
    loop {
        let (best, &hits) = count.iter().enumerate().rev().max_by_key(|&(_, c)| c).expect("non-empty code");
        if hits == 0 {
            break;
        }
        removed[best] = true;
        for &li in &member_of[best] {
            if std::mem::replace(&mut alive[li], false) {
                for &i in &bad[li] {
                    count[i] -= 1;
                }
            }
        }
    }
    let points: Vec<Vec<f64>> = code.points.iter().zip(&removed).filter(|(_, &r)| !r).map(|(p, _)| p.clone()).collect();
    let dropped = m - points.len();
    Ok(FiniteCode { points, expurgated_count: code.expurgated_count + dropped, ..code.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{sample_code, SampleParams};
    use crate::geometry::{avg_sq_radius, AvgRadiusFormula, PointList};

    fn brute(points: &[Vec<f64>], l: usize, t: f64) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut idx: Vec<usize> = (0..l).collect();
        let m = points.len();
        loop {
            let list = PointList::new(idx.iter().map(|&i| points[i].clone()).collect()).unwrap();
            if avg_sq_radius(&list, AvgRadiusFormula::Centroid) <= t {
                out.push(idx.clone());
            }
            let mut k = l;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if idx[k] < m - l + k {
                    idx[k] += 1;
                    for r in k + 1..l {
                        idx[r] = idx[r - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn code(dim: usize, l: usize, size: usize, seed: u64) -> FiniteCode {
        sample_code(SampleParams {
            dim,
            list_len: l,
            noise: 0.05,
            half_width: 1.0,
            rate_margin: 0.0,
            seed,
            size: Some(size),
        })
        .unwrap()
    }

    #[test]
    fn matches_exhaustive_search() {
        for (dim, l, size) in [(2, 2, 60), (2, 3, 40), (3, 3, 50), (1, 4, 25), (3, 4, 30)] {
            for seed in 0..3 {
                let c = code(dim, l, size, seed);
                let found = find_bad_lists(&c).unwrap();
                assert_eq!(found, brute(&c.points, l, c.threshold()), "dim {dim} L {l} seed {seed}");
            }
        }
    }

    #[test]
    fn grid_and_brute_neighbours_agree() {
        let c = code(2, 2, 400, 1);
        let bound = 0.05;
        let grid = forward_neighbours(&c.points, bound);
        for (i, row) in grid.iter().enumerate() {
            let direct: Vec<usize> =
                ((i + 1)..c.len()).filter(|&j| sq_dist(&c.points[i], &c.points[j]) <= bound).collect();
            assert_eq!(row, &direct);
        }
    }

    #[test]
    fn boundary_list_counts_as_bad() {
        let c = FiniteCode::new(vec![vec![0.0, 0.0], vec![0.5, 0.0], vec![0.9, 0.9]], 2, 2, 0.03125, 1.0, 0).unwrap();
        // two points 0.5 apart: avg radius 0.0625 = nN
        assert_eq!(find_bad_lists(&c).unwrap(), vec![vec![0, 1]]);
    }

    #[test]
    fn expurgation_clears_every_list() {
        for (l, seed) in [(2, 0), (3, 1), (3, 2), (4, 3)] {
            let c = code(2, l, 80, seed);
            let bad = find_bad_lists(&c).unwrap();
            assert!(!bad.is_empty());
            let clean = expurgate(&c, &bad).unwrap();
            assert!(find_bad_lists(&clean).unwrap().is_empty());
            assert_eq!(clean.len() + clean.expurgated_count, c.len());
            assert!(clean.expurgated_count <= bad.len());
        }
    }

    #[test]
    fn greedy_prefers_shared_point_then_lowest_index() {
        let c = FiniteCode::new(vec![vec![0.0], vec![0.1], vec![0.2], vec![0.9]], 1, 2, 0.01, 1.0, 0).unwrap();
        let hub = expurgate(&c, &[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(hub.points, vec![vec![0.0], vec![0.2], vec![0.9]]);
        let tie = expurgate(&c, &[vec![2, 3]]).unwrap();
        assert_eq!(tie.points, vec![vec![0.0], vec![0.1], vec![0.9]]);
    }

    #[test]
    fn budget_guard() {
        let c = code(2, 4, 400, 0);
        assert!(matches!(find_bad_lists(&c), Err(Error::Budget(_))));
    }
}
