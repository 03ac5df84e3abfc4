//! Mutation and crossover operators on permutations.
//!
//! Every operator maps permutations to permutations. Segment bounds are
//! inclusive unless noted otherwise.

use rand::seq::SliceRandom;
use rand::Rng;

/// Exchanges the values at positions `i` and `j`.
pub fn swap_positions(perm: &mut [usize], i: usize, j: usize) {
    perm.swap(i, j);
}

/// Reverses `perm[lo..=hi]`.
pub fn reverse_segment(perm: &mut [usize], lo: usize, hi: usize) {
    perm[lo..=hi].reverse();
}

/// Shuffles `perm[lo..=hi]` in place.
pub fn shuffle_segment<R: Rng + ?Sized>(perm: &mut [usize], lo: usize, hi: usize, rng: &mut R) {
    perm[lo..=hi].shuffle(rng);
}

/// Two distinct positions, ordered, drawn uniformly. Needs `n >= 2`.
pub(crate) fn random_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i.min(j), i.max(j))
}

/// Ordered crossover. Each child keeps its own parent's values at
/// `lo..=hi`; the remaining positions are filled, starting after `hi` and
/// wrapping around, with the other parent's values in the order they occur
/// there after `hi`.
pub fn ordered_crossover(
    a: &[usize],
    b: &[usize],
    lo: usize,
    hi: usize,
) -> (Vec<usize>, Vec<usize>) {
    (ox_child(a, b, lo, hi), ox_child(b, a, lo, hi))
}

fn ox_child(keep: &[usize], donor: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    let n = keep.len();
    let mut child = keep.to_vec();
    let mut taken = vec![false; n];
    for &v in &keep[lo..=hi] {
        taken[v] = true;
    }
    let mut pos = (hi + 1) % n;
    for off in 1..=n {
        let v = donor[(hi + off) % n];
        if !taken[v] {
            child[pos] = v;
            pos = (pos + 1) % n;
        }
    }
    child
}

/// Partially matched crossover over the half-open cut `lo..hi`. The first
/// child takes `b`'s values inside the cut and `a`'s values outside it,
/// repaired through the mapping defined by the two cut sections; the second
/// child is symmetric.
pub fn pmx_crossover(a: &[usize], b: &[usize], lo: usize, hi: usize) -> (Vec<usize>, Vec<usize>) {
    (pmx_child(a, b, lo, hi), pmx_child(b, a, lo, hi))
}

fn pmx_child(outer: &[usize], inner: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    let n = outer.len();
    // mapping[v] = the outer value displaced by inner value v inside the cut
    let mut mapping = vec![usize::MAX; n];
    for k in lo..hi {
        mapping[inner[k]] = outer[k];
    }
    let mut child = outer.to_vec();
    child[lo..hi].copy_from_slice(&inner[lo..hi]);
    for k in (0..lo).chain(hi..n) {
        let mut v = outer[k];
        while mapping[v] != usize::MAX {
            v = mapping[v];
        }
        child[k] = v;
    }
    child
}

/// Uniform partially matched crossover: every position is selected
/// independently with probability `p`; for a selected position the two
/// values found there are exchanged within each child, so each child takes
/// the other parent's value at that position.
pub fn upmx_crossover<R: Rng + ?Sized>(
    a: &[usize],
    b: &[usize],
    p: f64,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let n = a.len();
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    let mut pos1 = vec![0; n];
    let mut pos2 = vec![0; n];
    for k in 0..n {
        pos1[c1[k]] = k;
        pos2[c2[k]] = k;
    }
    for k in 0..n {
        if rng.random::<f64>() >= p {
            continue;
        }
        let (x, y) = (c1[k], c2[k]);
        if x == y {
            continue;
        }
        // child 1: put y at k, move x to where y was
        let j = pos1[y];
        c1.swap(k, j);
        pos1[x] = j;
        pos1[y] = k;
        // child 2: put x at k, move y to where x was
        let j = pos2[x];
        c2.swap(k, j);
        pos2[y] = j;
        pos2[x] = k;
    }
    (c1, c2)
}

/// Whether `perm` holds each of `0..perm.len()` exactly once.
pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter()
        .all(|&v| v < seen.len() && !std::mem::replace(&mut seen[v], true))
}
