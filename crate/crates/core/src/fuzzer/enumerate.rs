//! Subsets, HB-respecting permutations of them, and an independent counter.

use crate::hb::HbRelation;

/// Event subsets as bitmasks over event indices.
pub type Subset = u64;

/// Hard limit imposed by the bitmask representation.
pub const MAX_EVENTS: usize = 64;

pub fn members(s: Subset) -> Vec<usize> {
    (0..MAX_EVENTS).filter(|i| s >> i & 1 == 1).collect()
}

/// All subsets of size `kmin..=kmax` over `names.len()` events, ordered:
/// subsets whose events all have distinct function names first, then the
/// rest; within each class by size, then lexicographically by index list.
pub fn ordered_subsets(names: &[&str], kmin: usize, kmax: usize) -> Vec<Subset> {
    let n = names.len();
    assert!(n <= MAX_EVENTS, "at most {MAX_EVENTS} events");
    let mut distinct = Vec::new();
    let mut mixed = Vec::new();
    for k in kmin..=kmax.min(n) {
        for_each_combination(n, k, |idx| {
            let mask = idx.iter().fold(0u64, |m, i| m | 1 << i);
            let mut seen: Vec<&str> = idx.iter().map(|&i| names[i]).collect();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() == idx.len() {
                distinct.push(mask);
            } else {
                mixed.push(mask);
            }
        });
    }
    distinct.extend(mixed);
    distinct
}

/// Visits `k`-combinations of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Per member position, the positions (within the subset) that must precede it.
pub fn local_preds(idx: &[usize], r: &HbRelation) -> Vec<u32> {
    idx.iter()
        .map(|&j| {
            idx.iter()
                .enumerate()
                .filter(|&(_, &i)| r.contains(i, j))
                .fold(0u32, |m, (p, _)| m | 1 << p)
        })
        .collect()
}

/// Number of orderings of the subset that respect `r`.
pub fn count_extensions(idx: &[usize], r: &HbRelation) -> u64 {
    let k = idx.len();
    assert!(k < 32, "subset too large");
    let preds = local_preds(idx, r);
    let full = (1u32 << k) - 1;
    // ways[m]: orderings of the remaining members once `m` is placed.
    let mut ways = vec![0u64; 1 << k];
    ways[full as usize] = 1;
    for m in (0..full).rev() {
        let mut total = 0u64;
        for p in 0..k {
            if m >> p & 1 == 0 && preds[p] & !m == 0 {
                total += ways[(m | 1 << p) as usize];
            }
        }
        ways[m as usize] = total;
    }
    ways[0]
}

/// All orderings of the subset that respect `r`, in lexicographic order.
pub fn linear_extensions(idx: &[usize], r: &HbRelation) -> Vec<Vec<usize>> {
    fn go(idx: &[usize], preds: &[u32], placed: u32, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == idx.len() {
            out.push(cur.clone());
            return;
        }
        for p in 0..idx.len() {
            if placed >> p & 1 == 0 && preds[p] & !placed == 0 {
                cur.push(idx[p]);
                go(idx, preds, placed | 1 << p, cur, out);
                cur.pop();
            }
        }
    }
    let preds = local_preds(idx, r);
    let mut out = Vec::new();
    go(idx, &preds, 0, &mut Vec::new(), &mut out);
    out
}

/// Every HB-respecting sequence of distinct events with length in
/// `kmin..=kmax`, grouped by subset in [`ordered_subsets`] order.
pub fn enumerate_traces(names: &[&str], r: &HbRelation, kmin: usize, kmax: usize) -> Vec<Vec<usize>> {
    ordered_subsets(names, kmin, kmax)
        .into_iter()
        .flat_map(|s| linear_extensions(&members(s), r))
        .collect()
}

/// Σ_k n!/(n-k)! for k in `kmin..=kmax`: the count without any HB pruning.
pub fn unconstrained_count(n: usize, kmin: usize, kmax: usize) -> u64 {
    (kmin..=kmax.min(n))
        .map(|k| ((n - k + 1)..=n).map(|x| x as u64).product::<u64>())
        .sum()
}

/// Brute force: every sequence of distinct events, checked pair by pair
/// against `r`. Shares no code with the enumerator.
pub fn count_traces(n: usize, r: &HbRelation, kmin: usize, kmax: usize) -> u64 {
    fn go(n: usize, r: &HbRelation, kmin: usize, kmax: usize, seq: &mut Vec<usize>, used: &mut Vec<bool>) -> u64 {
        let mut total = 0;
        if seq.len() >= kmin && respects(seq, r) {
            total += 1;
        }
        if seq.len() == kmax {
            return total;
        }
        for e in 0..n {
            if !used[e] {
                used[e] = true;
                seq.push(e);
                total += go(n, r, kmin, kmax, seq, used);
                seq.pop();
                used[e] = false;
            }
        }
        total
    }
    fn respects(seq: &[usize], r: &HbRelation) -> bool {
        for (a, &x) in seq.iter().enumerate() {
            for &y in &seq[a + 1..] {
                if r.contains(y, x) {
                    return false;
                }
            }
        }
        true
    }
    go(n, r, kmin, kmax, &mut Vec::new(), &mut vec![false; n])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    fn refs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }

    #[test]
    fn unconstrained_formula() {
        assert_eq!(unconstrained_count(7, 2, 6), 8652);
        assert_eq!(unconstrained_count(3, 3, 3), 6);
        assert_eq!(unconstrained_count(2, 3, 6), 0);
    }

    #[test]
    fn appendix_counts() {
        let n = names(7);
        let r = HbRelation::new([(1, 2), (3, 4), (1, 5), (3, 6)]);
        assert_eq!(enumerate_traces(&refs(&n), &r, 2, 6).len(), 2560);
        assert_eq!(count_traces(7, &r, 2, 6), 2560);
        let empty = HbRelation::default();
        assert_eq!(enumerate_traces(&refs(&n), &empty, 2, 6).len(), 8652);
        assert_eq!(count_traces(7, &empty, 2, 6), 8652);
    }

    #[test]
    fn total_order_has_one_trace() {
        let r = HbRelation::new([(0, 1), (1, 2)]);
        assert_eq!(count_traces(3, &r, 3, 3), 1);
        assert_eq!(enumerate_traces(&refs(&names(3)), &r, 3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn two_events_ordered() {
        let r = HbRelation::new([(0, 1)]);
        assert_eq!(enumerate_traces(&["a", "b"], &r, 2, 2), vec![vec![0, 1]]);
    }

    #[test]
    fn distinct_names_come_first() {
        let subsets = ordered_subsets(&["a", "a", "b"], 2, 2);
        let lists: Vec<Vec<usize>> = subsets.into_iter().map(members).collect();
        assert_eq!(lists, vec![vec![0, 2], vec![1, 2], vec![0, 1]]);
    }

    #[test]
    fn extensions_are_lexicographic_and_counted() {
        let r = HbRelation::new([(2, 0)]);
        let ext = linear_extensions(&[0, 1, 2], &r);
        assert_eq!(ext, vec![vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]]);
        assert_eq!(count_extensions(&[0, 1, 2], &r), 3);
    }
}
