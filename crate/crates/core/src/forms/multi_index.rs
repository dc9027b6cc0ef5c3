//! Lexicographic indexing of strictly increasing multi-indices.
//!
//! A degree-`p` form on an `n`-dimensional space stores one coefficient per
//! subset `i1 < i2 < ... < ip` of `{0, .., n-1}`, ordered lexicographically.

/// Binomial coefficient; sizes here never exceed C(8,4) = 70.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Lexicographic rank of a strictly increasing index set.
pub fn rank(n: usize, idx: &[usize]) -> usize {
    let p = idx.len();
    let mut r = 0;
    let mut prev = 0;
    for (slot, &i) in idx.iter().enumerate() {
        for j in prev..i {
            r += binomial(n - j - 1, p - slot - 1);
        }
        prev = i + 1;
    }
    r
}

/// Inverse of [`rank`]: the `r`-th subset of size `p` in lexicographic order.
pub fn unrank(n: usize, p: usize, mut r: usize, out: &mut [usize]) {
    let mut start = 0;
    for slot in 0..p {
        let mut i = start;
        loop {
            let c = binomial(n - i - 1, p - slot - 1);
            if r < c {
                break;
            }
            r -= c;
            i += 1;
        }
        out[slot] = i;
        start = i + 1;
    }
}

/// Iterator over all size-`p` subsets of `{0..n}` in lexicographic order.
pub struct Subsets {
    n: usize,
    p: usize,
    current: Vec<usize>,
    done: bool,
}

impl Subsets {
    pub fn new(n: usize, p: usize) -> Self {
        let current: Vec<usize> = (0..p).collect();
        Subsets {
            n,
            p,
            done: p > n,
            current,
        }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let item = self.current.clone();
        // advance to the next lexicographic subset
        let (n, p) = (self.n, self.p);
        if p == 0 {
            self.done = true;
            return Some(item);
        }
        let mut i = p;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < n - (p - i) {
                self.current[i] += 1;
                for j in (i + 1)..p {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(item)
    }
}

/// Sorts `idx` in place and returns the sign of the sorting permutation,
/// or 0.0 when two entries coincide.
pub fn sort_sign(idx: &mut [usize]) -> f64 {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return 0.0;
        }
    }
    sign
}

/// Sign of merging two disjoint increasing sets `a` and `b` into increasing
/// order, i.e. the parity of the shuffle; 0.0 when they intersect.
pub fn merge_sign(a: &[usize], b: &[usize], out: &mut Vec<usize>) -> f64 {
    out.clear();
    let mut sign = 1.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return 0.0;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining entries of a
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    sign
}

/// Complement of an increasing set inside `{0..n}`, with the permutation sign
/// of `(idx, complement)` relative to `(0, 1, .., n-1)`.
pub fn complement_sign(n: usize, idx: &[usize], comp: &mut Vec<usize>) -> f64 {
    comp.clear();
    let mut mask = [false; 8];
    for &i in idx {
        mask[i] = true;
    }
    for i in 0..n {
        if !mask[i] {
            comp.push(i);
        }
    }
    // each pair (idx_k, comp_l) with comp_l < idx_k is one inversion of the
    // concatenated word (idx, comp)
    let mut inv = 0;
    for &i in idx {
        inv += comp.iter().filter(|&&c| c < i).count();
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
