//! Even positive-definite lattices: the pairing, cosets of `2L`, the
//! sublattice `R = {a : <a, L> ⊆ 2Z}`, short-vector enumeration and the
//! isometry group `O(L)`.
//!
//! Vectors are integer coordinate tuples with respect to a fixed basis;
//! the Gram matrix carries the bilinear form. The isometry search is a
//! norm-shell backtracking and is practical for rank <= 8, which covers
//! the desk-scale lattices this engine is built for.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use alloc::collections::BTreeMap;
use num_traits::{One, Signed, Zero};

use crate::linalg;
use crate::scalar::{rat, Rat};

/// Integer coordinates of a lattice vector in the fixed basis.
pub type LatticeVector = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    /// The Gram matrix is not symmetric.
    NotSymmetric,
    /// A diagonal entry is odd, so the lattice is not even.
    NotEven,
    /// A leading principal minor is not positive.
    NotPositiveDefinite,
    /// Vector length does not match the rank.
    DimensionMismatch,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::NotSymmetric => write!(f, "NotSymmetric: gram matrix is not symmetric"),
            LatticeError::NotEven => write!(f, "NotEven: gram matrix has an odd diagonal entry"),
            LatticeError::NotPositiveDefinite => {
                write!(f, "NotPositiveDefinite: a leading principal minor is <= 0")
            }
            LatticeError::DimensionMismatch => {
                write!(f, "DimensionMismatch: vector length does not match the rank")
            }
        }
    }
}

impl core::error::Error for LatticeError {}

/// The Gram matrix of an even positive-definite lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix {
    entries: Vec<Vec<i64>>,
}

/// Checks the lattice axioms: symmetric, even diagonal, positive definite.
pub fn validate(entries: &[Vec<i64>]) -> Result<(), LatticeError> {
    let d = entries.len();
    if d == 0 || entries.iter().any(|row| row.len() != d) {
        return Err(LatticeError::DimensionMismatch);
    }
    for i in 0..d {
        for j in 0..d {
            if entries[i][j] != entries[j][i] {
                return Err(LatticeError::NotSymmetric);
            }
        }
    }
    if (0..d).any(|i| entries[i][i] % 2 != 0) {
        return Err(LatticeError::NotEven);
    }
    // positive definiteness via leading principal minors
    for k in 1..=d {
        let minor: Vec<Vec<Rat>> =
            (0..k).map(|i| (0..k).map(|j| rat(entries[i][j])).collect()).collect();
        if !linalg::det_rat(&minor).is_positive() {
            return Err(LatticeError::NotPositiveDefinite);
        }
    }
    Ok(())
}

impl GramMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        validate(&entries)?;
        Ok(GramMatrix { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// The pairing `x^T G y`; errors on mismatched dimensions.
    pub fn inner(&self, x: &[i64], y: &[i64]) -> Result<i64, LatticeError> {
        if x.len() != self.dim() || y.len() != self.dim() {
            return Err(LatticeError::DimensionMismatch);
        }
        Ok(self.ip(x, y))
    }

    /// The pairing for trusted in-range inputs.
    pub fn ip(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            let row = &self.entries[i];
            let mut s = 0;
            for (j, yj) in y.iter().enumerate() {
                s += row[j] * yj;
            }
            acc += xi * s;
        }
        acc
    }

    pub fn norm(&self, x: &[i64]) -> i64 {
        self.ip(x, x)
    }

    /// `G v` as an integer vector (the coordinates of `<., v>`).
    pub fn pairing_vector(&self, v: &[i64]) -> Vec<i64> {
        self.entries.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// The inverse Gram matrix, exact.
    pub fn inverse(&self) -> Vec<Vec<Rat>> {
        linalg::invert_rat(&linalg::to_rat_matrix(&self.entries))
            .expect("positive-definite matrix is invertible")
    }
}

pub fn vec_add(a: &[i64], b: &[i64]) -> LatticeVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[i64], b: &[i64]) -> LatticeVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_neg(a: &[i64]) -> LatticeVector {
    a.iter().map(|x| -x).collect()
}

pub fn vec_scale(a: &[i64], c: i64) -> LatticeVector {
    a.iter().map(|x| c * x).collect()
}

pub fn is_zero_vec(a: &[i64]) -> bool {
    a.iter().all(|&x| x == 0)
}

/// Coordinates mod 2, the key identifying a coset of `2L`.
pub fn coset_key(v: &[i64]) -> Vec<u8> {
    v.iter().map(|x| (x.rem_euclid(2)) as u8).collect()
}

/// Tie-break ordering for coset representatives: compare coordinatewise
/// with `0 < 1 < -1 < 2 < -2 < ...`, so among `±v` the nonnegative-leading
/// vector wins.
fn rep_order_key(v: &[i64]) -> Vec<(i64, bool)> {
    v.iter().map(|&x| (x.abs(), x < 0)).collect()
}

/// The `2^d` cosets of `2L` in `L`, each with a fixed minimal-norm
/// representative (`reps[0] = 0`).
#[derive(Clone, Debug)]
pub struct CosetTable {
    reps: Vec<LatticeVector>,
    index: BTreeMap<Vec<u8>, usize>,
}

impl CosetTable {
    pub fn count(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[LatticeVector] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> &LatticeVector {
        &self.reps[i]
    }

    /// Index of the coset containing `v`.
    pub fn index_of(&self, v: &[i64]) -> usize {
        self.index[&coset_key(v)]
    }
}

/// Builds the coset table of `2L` in `L` with minimal-norm representatives.
///
/// Every key `k ∈ {0,1}^d` is itself in its coset, so the minimum norm in
/// each coset is bounded by `max_k <k,k>`; a single short-vector sweep up
/// to that bound finds all candidates.
pub fn cosets_mod_2l(gram: &GramMatrix) -> CosetTable {
    let d = gram.dim();
    let mut best: BTreeMap<Vec<u8>, LatticeVector> = BTreeMap::new();
    let mut bound = 0i64;
    for bits in 0..(1u64 << d) {
        let key: Vec<i64> = (0..d).map(|i| ((bits >> i) & 1) as i64).collect();
        bound = bound.max(gram.norm(&key));
    }
    for norm in 0..=bound {
        for v in vectors_of_norm(gram, norm) {
            let key = coset_key(&v);
            match best.get(&key) {
                None => {
                    best.insert(key, v);
                }
                Some(cur) => {
                    let cn = gram.norm(cur);
                    let vn = gram.norm(&v);
                    if vn < cn || (vn == cn && rep_order_key(&v) < rep_order_key(cur)) {
                        best.insert(key, v);
                    }
                }
            }
        }
    }
    debug_assert_eq!(best.len(), 1 << d);
    // order: zero coset first, then by key
    let mut reps: Vec<LatticeVector> = Vec::with_capacity(1 << d);
    let mut index = BTreeMap::new();
    let zero_key = vec![0u8; d];
    reps.push(best[&zero_key].clone());
    index.insert(zero_key.clone(), 0);
    for (key, v) in &best {
        if *key == zero_key {
            continue;
        }
        index.insert(key.clone(), reps.len());
        reps.push(v.clone());
    }
    CosetTable { reps, index }
}

/// The sublattice `R` on which the pairing with all of `L` is even, with
/// a Z-basis and the positions of the `R/2L` representatives inside the
/// coset table.
#[derive(Clone, Debug)]
pub struct SublatticeR {
    /// Hermite-normal-form Z-basis of R.
    pub basis: Vec<LatticeVector>,
    /// Indices (into the coset table) of the cosets contained in R.
    pub rep_indices: Vec<usize>,
    /// F2-basis of R/2L as 0/1 key vectors.
    pub kernel_basis: Vec<Vec<u8>>,
}

/// Computes `R` as the kernel of the mod-2 Gram pairing pulled back to `L`.
pub fn compute_r(gram: &GramMatrix, cosets: &CosetTable) -> SublatticeR {
    let d = gram.dim();
    // kernel of (G mod 2) over F2
    let mut rows: Vec<Vec<u8>> = gram
        .entries()
        .iter()
        .map(|row| row.iter().map(|&x| (x.rem_euclid(2)) as u8).collect())
        .collect();
    // Gauss-Jordan over F2, tracking pivot columns
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..d {
        if let Some(p) = (r..d).find(|&i| rows[i][c] == 1) {
            rows.swap(r, p);
            for i in 0..d {
                if i != r && rows[i][c] == 1 {
                    for j in 0..d {
                        rows[i][j] ^= rows[r][j];
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    let mut kernel_basis: Vec<Vec<u8>> = Vec::new();
    for c in 0..d {
        if pivots.contains(&c) {
            continue;
        }
        let mut v = vec![0u8; d];
        v[c] = 1;
        for (pr, &pc) in pivots.iter().enumerate() {
            if rows[pr][c] == 1 {
                v[pc] = 1;
            }
        }
        kernel_basis.push(v);
    }
    // Z-basis: 2L generators plus kernel lifts, row HNF
    let mut gens: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 2 } else { 0 }).collect())
        .collect();
    for k in &kernel_basis {
        gens.push(k.iter().map(|&b| b as i64).collect());
    }
    let basis = linalg::hermite_normal_form(&gens);
    // membership of each coset rep: key in the F2 span of kernel_basis
    let in_span = |key: &[u8]| -> bool {
        // brute force over the span (|kernel| <= 2^d, d <= 8)
        let kdim = kernel_basis.len();
        for mask in 0..(1u64 << kdim) {
            let mut acc = vec![0u8; key.len()];
            for (i, kb) in kernel_basis.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    for (a, b) in acc.iter_mut().zip(kb) {
                        *a ^= b;
                    }
                }
            }
            if acc == key {
                return true;
            }
        }
        false
    };
    let rep_indices: Vec<usize> = (0..cosets.count())
        .filter(|&i| in_span(&coset_key(cosets.rep(i))))
        .collect();
    SublatticeR { basis, rep_indices, kernel_basis }
}

/// All lattice vectors of the given norm, by bounded enumeration with an
/// exact rational Cholesky bound (Fincke–Pohst style). Closed under
/// negation by construction.
pub fn short_vectors(gram: &GramMatrix, norm: i64) -> Vec<LatticeVector> {
    let mut out = vectors_of_norm(gram, norm);
    out.sort_by_key(|v| rep_order_key(v));
    out
}

/// All `v` with `<v,v> = norm` (norm 0 gives the zero vector only).
pub fn vectors_of_norm(gram: &GramMatrix, norm: i64) -> Vec<LatticeVector> {
    let d = gram.dim();
    if norm < 0 {
        return Vec::new();
    }
    if norm == 0 {
        return vec![vec![0; d]];
    }
    // exact LDL^T decomposition: G = L D L^T with unit lower-triangular L
    let mut dvals: Vec<Rat> = vec![Rat::zero(); d];
    let mut l: Vec<Vec<Rat>> = vec![vec![Rat::zero(); d]; d];
    for j in 0..d {
        let mut dj = rat(gram.entries()[j][j]);
        for k in 0..j {
            let t = &l[j][k] * &l[j][k] * &dvals[k];
            dj -= t;
        }
        dvals[j] = dj;
        l[j][j] = Rat::one();
        for i in j + 1..d {
            let mut x = rat(gram.entries()[i][j]);
            for k in 0..j {
                let t = &l[i][k] * &l[j][k] * &dvals[k];
                x -= t;
            }
            l[i][j] = x / &dvals[j];
        }
    }
    // Q(x) = sum_j d_j (x_j + sum_{i>j} l_ij x_i)^2; enumerate from the last
    // coordinate down, pruning with the exact remaining budget.
    let mut out = Vec::new();
    let mut x = vec![0i64; d];
    fn recurse(
        gram: &GramMatrix,
        dvals: &[Rat],
        l: &[Vec<Rat>],
        norm: i64,
        budget: Rat,
        j: usize,
        x: &mut Vec<i64>,
        out: &mut Vec<LatticeVector>,
    ) {
        // offset c_j = sum_{i>j} l_ij x_i
        let d = x.len();
        let mut c = Rat::zero();
        for i in j + 1..d {
            c += &l[i][j] * rat(x[i]);
        }
        // d_j (x_j + c)^2 <= budget
        let lim = &budget / &dvals[j];
        // integer window: |x_j + c| <= sqrt(lim)
        let mut t = 0i64;
        let bound_holds = |t: i64, c: &Rat| {
            let v = rat(t) + c;
            &v * &v <= lim
        };
        // find window around -c
        while bound_holds(t, &c) || bound_holds(-t, &c) {
            t += 1;
            if t > 1_000_000 {
                break;
            }
        }
        let center = -(c.clone());
        let center_floor = center.floor().to_integer();
        let lo = i64::try_from(center_floor.clone()).unwrap_or(0) - t - 1;
        let hi = i64::try_from(center_floor).unwrap_or(0) + t + 1;
        for xj in lo..=hi {
            let v = rat(xj) + &c;
            let used = &dvals[j] * &v * &v;
            if used > budget {
                continue;
            }
            x[j] = xj;
            if j == 0 {
                let n = gram.norm(x);
                if n == norm && !is_zero_vec(x) {
                    out.push(x.clone());
                }
            } else {
                let rem = &budget - &used;
                recurse(gram, dvals, l, norm, rem, j - 1, x, out);
            }
        }
        x[j] = 0;
    }
    recurse(gram, &dvals, &l, norm, rat(norm), d - 1, &mut x, &mut out);
    out
}

/// All isometries of the lattice: integer matrices `s` with
/// `s^T G s = G`, found by backtracking over images of basis vectors
/// within matching norm shells. Practical for rank <= 8.
pub fn isometry_group(gram: &GramMatrix) -> Vec<Vec<Vec<i64>>> {
    let d = gram.dim();
    let shells: Vec<Vec<LatticeVector>> =
        (0..d).map(|i| vectors_of_norm(gram, gram.entries()[i][i])).collect();
    let mut images: Vec<LatticeVector> = Vec::with_capacity(d);
    let mut out = Vec::new();
    fn extend(
        gram: &GramMatrix,
        shells: &[Vec<LatticeVector>],
        images: &mut Vec<LatticeVector>,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) {
        let d = gram.dim();
        let k = images.len();
        if k == d {
            // columns are the images
            let m: Vec<Vec<i64>> = (0..d).map(|r| (0..d).map(|c| images[c][r]).collect()).collect();
            out.push(m);
            return;
        }
        'cand: for cand in &shells[k] {
            for (j, img) in images.iter().enumerate() {
                if gram.ip(cand, img) != gram.entries()[k][j] {
                    continue 'cand;
                }
            }
            images.push(cand.clone());
            extend(gram, shells, images, out);
            images.pop();
        }
    }
    extend(gram, &shells, &mut images, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn a1() -> GramMatrix {
        GramMatrix::new(vec![vec![2]]).unwrap()
    }

    pub fn a2() -> GramMatrix {
        GramMatrix::new(vec![vec![2, -1], vec![-1, 2]]).unwrap()
    }

    pub fn d2() -> GramMatrix {
        GramMatrix::new(vec![vec![2, 0], vec![0, 2]]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&[vec![2]]).is_ok());
        assert!(validate(&[vec![2, -1], vec![-1, 2]]).is_ok());
        assert_eq!(validate(&[vec![1]]), Err(LatticeError::NotEven));
        assert_eq!(validate(&[vec![2, 1], vec![0, 2]]), Err(LatticeError::NotSymmetric));
        assert_eq!(
            validate(&[vec![2, 3], vec![3, 2]]),
            Err(LatticeError::NotPositiveDefinite)
        );
        assert_eq!(validate(&[vec![2, 0]]), Err(LatticeError::DimensionMismatch));
    }

    #[test]
    fn inner_examples() {
        let g = a1();
        assert_eq!(g.inner(&[1], &[1]).unwrap(), 2);
        let g2 = a2();
        assert_eq!(g2.inner(&[1, 0], &[0, 1]).unwrap(), -1);
        assert_eq!(g2.inner(&[0, 0], &[5, -3]).unwrap(), 0);
        assert_eq!(g2.inner(&[1], &[0, 1]), Err(LatticeError::DimensionMismatch));
    }

    #[test]
    fn inner_symmetric_bilinear_randomized() {
        let g = a2();
        let mut rng = crate::rng::XorShift::new(42);
        for _ in 0..200 {
            let x: Vec<i64> = (0..2).map(|_| rng.range_i64(-4, 4)).collect();
            let y: Vec<i64> = (0..2).map(|_| rng.range_i64(-4, 4)).collect();
            let z: Vec<i64> = (0..2).map(|_| rng.range_i64(-4, 4)).collect();
            assert_eq!(g.ip(&x, &y), g.ip(&y, &x));
            assert_eq!(g.ip(&vec_add(&x, &z), &y), g.ip(&x, &y) + g.ip(&z, &y));
        }
    }

    #[test]
    fn cosets_small_lattices() {
        let t = cosets_mod_2l(&a1());
        assert_eq!(t.reps(), &[vec![0], vec![1]]);
        let t2 = cosets_mod_2l(&a2());
        assert_eq!(t2.count(), 4);
        assert_eq!(t2.rep(0), &vec![0, 0]);
        let mut reps = t2.reps().to_vec();
        reps.sort();
        assert_eq!(reps, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn coset_reps_minimal_and_consistent() {
        // brute force: every vector in a window maps to a rep in its coset
        // with v - rep in 2L and norm(rep) minimal
        for g in [a1(), a2(), d2()] {
            let t = cosets_mod_2l(&g);
            let d = g.dim();
            let mut coords = vec![-2i64; d];
            loop {
                let v = coords.clone();
                let idx = t.index_of(&v);
                let rep = t.rep(idx);
                let diff = vec_sub(&v, rep);
                assert!(diff.iter().all(|x| x % 2 == 0));
                assert!(g.norm(rep) <= g.norm(&v));
                // advance odometer
                let mut i = 0;
                loop {
                    if i == d {
                        return;
                    }
                    coords[i] += 1;
                    if coords[i] <= 2 {
                        break;
                    }
                    coords[i] = -2;
                    i += 1;
                }
            }
        }
    }

    #[test]
    fn r_sublattice_examples() {
        let g = a1();
        let r = compute_r(&g, &cosets_mod_2l(&g));
        assert_eq!(r.rep_indices.len(), 2); // R = L
        assert_eq!(r.basis, vec![vec![1]]);

        let g = a2();
        let r = compute_r(&g, &cosets_mod_2l(&g));
        assert_eq!(r.rep_indices, vec![0]); // R = 2L
        assert_eq!(r.basis, vec![vec![2, 0], vec![0, 2]]);

        let g = d2();
        let r = compute_r(&g, &cosets_mod_2l(&g));
        assert_eq!(r.rep_indices.len(), 4); // R = L
    }

    #[test]
    fn r_membership_criterion() {
        // a in R iff <a, basis_j> even for all j; and 2L inside R
        for g in [a2(), d2()] {
            let t = cosets_mod_2l(&g);
            let r = compute_r(&g, &t);
            let d = g.dim();
            for i in 0..t.count() {
                let rep = t.rep(i);
                let even_pairing = (0..d).all(|j| {
                    let mut e = vec![0i64; d];
                    e[j] = 1;
                    g.ip(rep, &e) % 2 == 0
                });
                assert_eq!(r.rep_indices.contains(&i), even_pairing);
            }
            // 2L ⊆ R: doubled basis vectors land in the 0 coset, which is in R
            assert!(r.rep_indices.contains(&0));
        }
    }

    #[test]
    fn short_vector_counts() {
        assert_eq!(short_vectors(&a1(), 2), vec![vec![1], vec![-1]]);
        assert_eq!(short_vectors(&a2(), 2).len(), 6);
        assert_eq!(short_vectors(&d2(), 2).len(), 4);
        assert_eq!(short_vectors(&d2(), 4).len(), 4); // (±1,±1)
        // closed under negation
        for v in short_vectors(&a2(), 6) {
            assert!(short_vectors(&a2(), 6).contains(&vec_neg(&v)));
        }
    }

    #[test]
    fn isometry_group_orders() {
        let o1 = isometry_group(&a1());
        assert_eq!(o1.len(), 2);
        let o2 = isometry_group(&a2());
        assert_eq!(o2.len(), 12);
        let od2 = isometry_group(&d2());
        assert_eq!(od2.len(), 8);
        // identity present
        let id = vec![vec![1, 0], vec![0, 1]];
        assert!(o2.contains(&id));
        // closure under product and inverse; shells preserved setwise
        let g = a2();
        let shell: Vec<LatticeVector> = short_vectors(&g, 2);
        for m in &o2 {
            assert_eq!(linalg::mat_mul_int(&linalg::transpose_int(m), &linalg::mat_mul_int(g.entries(), m)), g.entries().to_vec());
            let inv = linalg::invert_unimodular(m).unwrap();
            assert!(o2.contains(&inv));
            for n in &o2 {
                assert!(o2.contains(&linalg::mat_mul_int(m, n)));
            }
            for v in &shell {
                assert!(shell.contains(&linalg::mat_apply_int(m, v)));
            }
        }
    }
}
