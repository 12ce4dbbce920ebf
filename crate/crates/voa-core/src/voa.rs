//! Untwisted vertex-operator modes on `V_L`, Virasoro operators, and the
//! weight-one Lie algebra.
//!
//! The generating operators are
//! `Y(ι(a), z) = exp(-Σ_{n<0} ā(n)/n z^{-n}) exp(-Σ_{n>0} ā(n)/n z^{-n}) a z^{ā}`
//! and `Y(h(-1)1, z) = h(z)`; modes of arbitrary basis monomials are
//! reconstructed through normal-ordered products
//! `:∂^{(n_1-1)}a_1(z) ... ∂^{(n_k-1)}a_k(z) Y(ι(a),z):` with creation
//! modes to the left and annihilation (and zero) modes to the right of
//! the generator. All mode windows are derived from weights, so every
//! coefficient extraction is a finite exact sum. No memoization cache is
//! kept; every operation is a pure function.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::extension::{ExtElement, Extension};
use crate::fock::{
    annihilation_expansion, apply_annihilation_partition, apply_creation_partition,
    heisenberg_act, iota, Monomial, UState,
};
use crate::lattice::{vec_add, vectors_of_norm, LatticeVector};
use crate::scalar::{binom_int, rat, Rat};

/// Applies the group element `a` to the label part of every monomial:
/// `a · (M ⊗ ι(e_γ)) = ε(ā, γ) M ⊗ ι(e_{ā+γ})` times the sign of `a`.
pub fn mul_label(ext: &Extension, a: &ExtElement, v: &UState) -> UState {
    let mut out = UState::zero();
    for (m, c) in v.terms() {
        let sign = a.sign * ext.eps(&a.vec, &m.label);
        let nm = Monomial { modes: m.modes.clone(), label: vec_add(&a.vec, &m.label) };
        out.add_term(nm, c * rat(sign as i64));
    }
    out
}

/// The involution θ on states: modes pick up `(-1)^k`, labels map through
/// `θ` on the extension.
pub fn theta_state(ext: &Extension, v: &UState) -> UState {
    let mut out = UState::zero();
    for (m, c) in v.terms() {
        let t = ext.theta_ext(&ExtElement::section(m.label.clone()));
        let mut coeff = c * rat(t.sign as i64);
        if m.len() % 2 == 1 {
            coeff = -coeff;
        }
        out.add_term(Monomial { modes: m.modes.clone(), label: t.vec }, coeff);
    }
    out
}

/// The coefficient of `z^q` in `Y(ι(a), z) v`, computed exactly through
/// the Schur expansions of both exponentials.
pub fn exp_mode_power(ext: &Extension, a: &ExtElement, q: i64, v: &UState) -> UState {
    let g = &ext.gram;
    let mut out = UState::zero();
    for (mono, coeff) in v.terms() {
        // z^{ā} on the original label, then the group element
        let p0 = g.ip(&a.vec, &mono.label);
        let sign = a.sign * ext.eps(&a.vec, &mono.label);
        let shifted =
            Monomial { modes: mono.modes.clone(), label: vec_add(&a.vec, &mono.label) };
        let base = UState::from_term(shifted, coeff * rat(sign as i64));
        // annihilation degree s is bounded by the mode weight present
        let s_max: i64 = mono.modes.iter().map(|&(_, n2)| -(n2 as i64) / 2).sum();
        for s in 0..=s_max {
            let r = q - p0 + s;
            if r < 0 {
                continue;
            }
            let mut annihilated = UState::zero();
            if s == 0 {
                annihilated.add_assign(&base);
            } else {
                for (parts2, w) in annihilation_expansion(2 * s as u32, 0) {
                    let applied = apply_annihilation_partition(g, &a.vec, &parts2, &base);
                    annihilated.add_scaled(&applied, &w);
                }
            }
            if annihilated.is_zero() {
                continue;
            }
            if r == 0 {
                out.add_assign(&annihilated);
            } else {
                for (parts2, w) in crate::fock::creation_expansion(2 * r as u32, 0) {
                    let applied = apply_creation_partition(g, &a.vec, &parts2, &annihilated);
                    out.add_scaled(&applied, &w);
                }
            }
        }
    }
    out
}

/// `ι(a)_n v`: the coefficient of `z^{-n-1}` in `Y(ι(a), z) v`.
pub fn exp_mode(ext: &Extension, a: &ExtElement, n: i64, v: &UState) -> UState {
    exp_mode_power(ext, a, -n - 1, v)
}

/// `u_n v` for an arbitrary state `u` (extended linearly over its basis
/// monomials) and state `v`.
pub fn general_mode(ext: &Extension, u: &UState, n: i64, v: &UState) -> UState {
    let g = &ext.gram;
    let mut out = UState::zero();
    let v_max_wt = match v.max_weight(g) {
        Some(w) => w,
        None => return out,
    };
    for (mono, coeff) in u.terms() {
        // doubled creation budget: created modes all survive into the
        // result, whose weight is wt(u) + wt(v) + q
        let w = mono.weight(g) + &v_max_wt + rat(-n - 1);
        if w.is_negative() {
            continue;
        }
        let budget2 = i64::try_from((w * rat(2)).floor().to_integer()).unwrap_or(0);
        let generator = ExtElement::section(mono.label.clone());
        let part = w_mode_factors(ext, &mono.modes, &generator, 2 * (-n - 1), budget2, v);
        out.add_scaled(&part, coeff);
    }
    out
}

/// Coefficient of `z^{q}` (doubled: `q2 = 2q`) in the normal-ordered
/// product of the derivative fields over `factors` with the generator
/// `Y(ι(a), z)`, applied to `v`.
///
/// `∂^{(n-1)} a_i(z) = Σ_m binom(-m-1, n-1) a_i(m) z^{-m-n}`; each factor
/// splits into a creation part (prepended after recursion) and an
/// annihilation/zero part (applied to `v` before recursion).
fn w_mode_factors(
    ext: &Extension,
    factors: &[(u8, i32)],
    a: &ExtElement,
    q2: i64,
    budget2: i64,
    v: &UState,
) -> UState {
    let g = &ext.gram;
    let Some((&(i, nt2), rest)) = factors.split_first() else {
        debug_assert_eq!(q2.rem_euclid(2), 0);
        return exp_mode_power(ext, a, q2 / 2, v);
    };
    let nt = (-nt2 / 2) as i64; // field is ∂^{(nt-1)} a_i(z)
    let mut unit = vec![0i64; g.dim()];
    unit[i as usize] = 1;
    let mut out = UState::zero();
    // annihilation and zero modes act on v first (rightmost block)
    let depth_max = (v.max_depth2() / 2) as i64;
    for m in 0..=depth_max {
        let b = binom_int(-m - 1, (nt - 1) as u64);
        if b.is_zero() {
            continue;
        }
        let applied = heisenberg_act(g, &unit, 2 * m as i32, v).expect("untwisted parity");
        if applied.is_zero() {
            continue;
        }
        let inner = w_mode_factors(ext, rest, a, q2 + 2 * (m + nt), budget2, &applied);
        out.add_scaled(&inner, &b);
    }
    // creation modes survive to the result: bounded by the weight budget
    for m in 1..=(budget2 / 2).max(0) {
        let b = binom_int(m - 1, (nt - 1) as u64);
        if b.is_zero() {
            continue;
        }
        let inner = w_mode_factors(ext, rest, a, q2 + 2 * (-m + nt), budget2 - 2 * m, v);
        if inner.is_zero() {
            continue;
        }
        let created =
            heisenberg_act(g, &unit, (-2 * m) as i32, &inner).expect("untwisted parity");
        out.add_scaled(&created, &b);
    }
    out
}

/// The Virasoro element `ω = 1/2 Σ_{ij} (G^{-1})_{ij} a_i(-1) a_j(-1) 1`.
pub fn omega(ext: &Extension) -> UState {
    let d = ext.dim();
    let mut out = UState::zero();
    for i in 0..d {
        for j in 0..d {
            let c = &ext.gram_inv[i][j] / rat(2);
            let m = Monomial::new(vec![(i as u8, -2), (j as u8, -2)], vec![0i64; d]);
            out.add_term(m, c);
        }
    }
    out
}

/// `L(n) v`, the mode `ω_{n+1} v`.
pub fn virasoro_mode(ext: &Extension, n: i64, v: &UState) -> UState {
    general_mode(ext, &omega(ext), n + 1, v)
}

/// All basis monomials of `V_L` of exact weight `w >= 0`.
pub fn basis_of_weight(ext: &Extension, w: i64) -> Vec<Monomial<LatticeVector>> {
    let g = &ext.gram;
    let mut out = Vec::new();
    if w < 0 {
        return out;
    }
    for label_wt in 0..=w {
        let labels = if label_wt == 0 {
            vec![vec![0i64; g.dim()]]
        } else {
            vectors_of_norm(g, 2 * label_wt)
        };
        if labels.is_empty() {
            continue;
        }
        let mode_sets = colored_mode_multisets(g.dim() as u8, w - label_wt);
        for label in labels {
            for modes in &mode_sets {
                out.push(Monomial::new(modes.clone(), label.clone()));
            }
        }
    }
    out
}

/// All sorted multisets of (basis index, doubled negative mode) with total
/// mode weight `w` (integer modes).
pub fn colored_mode_multisets(d: u8, w: i64) -> Vec<Vec<(u8, i32)>> {
    fn go(
        d: u8,
        remaining2: i64,
        min_pair: (u8, i32),
        prefix: &mut Vec<(u8, i32)>,
        out: &mut Vec<Vec<(u8, i32)>>,
    ) {
        if remaining2 == 0 {
            out.push(prefix.clone());
            return;
        }
        for i in 0..d {
            let mut n2 = -remaining2;
            if n2.rem_euclid(2) == 1 {
                n2 += 1;
            }
            while n2 <= -2 {
                let pair = (i, n2 as i32);
                if pair >= min_pair {
                    prefix.push(pair);
                    go(d, remaining2 + n2, pair, prefix, out);
                    prefix.pop();
                }
                n2 += 2;
            }
        }
    }
    let mut out = Vec::new();
    go(d, 2 * w, (0, i32::MIN), &mut Vec::new(), &mut out);
    out
}

/// Seeded random state: a sum of `terms` basis monomials of weight up to
/// `max_weight` with small nonzero rational coefficients. Used by the
/// randomized verification suites; fully determined by the generator
/// state.
pub fn sample_state(
    ext: &Extension,
    rng: &mut crate::rng::XorShift,
    max_weight: i64,
    terms: usize,
) -> UState {
    let mut out = UState::zero();
    for _ in 0..terms {
        let w = rng.range_i64(0, max_weight);
        let basis = basis_of_weight(ext, w);
        let mono = basis[rng.below(basis.len() as u64) as usize].clone();
        let num = rng.range_i64(1, 3) * if rng.below(2) == 0 { 1 } else { -1 };
        let den = rng.range_i64(1, 2);
        out.add_term(mono, crate::scalar::ratq(num, den));
    }
    out
}

/// Weight-one Lie algebra data: basis `{a_i(-1)1} ∪ {ι(e_α) : <α,α> = 2}`,
/// structure constants of the bracket `[u,v] = u_0 v`, and the invariant
/// form `(u|v) 1 = u_1 v`.
#[derive(Clone, Debug)]
pub struct LieAlgebraData {
    pub dim: usize,
    pub root_count: usize,
    pub basis: Vec<UState>,
    /// bracket[i][j] = coordinates of [b_i, b_j] in the basis
    pub bracket: Vec<Vec<Vec<Rat>>>,
    /// form[i][j] = (b_i | b_j)
    pub form: Vec<Vec<Rat>>,
}

/// Coordinates of a weight-one state in the standard basis.
fn weight_one_coords(ext: &Extension, roots: &[LatticeVector], state: &UState) -> Option<Vec<Rat>> {
    let d = ext.dim();
    let zero = vec![0i64; d];
    let mut coords = vec![Rat::zero(); d + roots.len()];
    for (m, c) in state.terms() {
        if m.label == zero && m.len() == 1 && m.modes[0].1 == -2 {
            coords[m.modes[0].0 as usize] += c;
        } else if m.is_bare() {
            let pos = roots.iter().position(|r| r == &m.label)?;
            coords[d + pos] += c;
        } else {
            return None;
        }
    }
    Some(coords)
}

pub fn weight_one_lie_algebra(ext: &Extension) -> LieAlgebraData {
    let g = &ext.gram;
    let d = ext.dim();
    let roots = crate::lattice::short_vectors(g, 2);
    let mut basis: Vec<UState> = Vec::new();
    for i in 0..d {
        let m = Monomial::new(vec![(i as u8, -2)], vec![0i64; d]);
        basis.push(UState::from_term(m, Rat::one()));
    }
    for r in &roots {
        basis.push(iota(&ExtElement::section(r.clone())));
    }
    let n = basis.len();
    let mut bracket = vec![vec![Vec::new(); n]; n];
    let mut form = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let br = general_mode(ext, &basis[i], 0, &basis[j]);
            bracket[i][j] =
                weight_one_coords(ext, &roots, &br).expect("bracket closes on weight one");
            let fv = general_mode(ext, &basis[i], 1, &basis[j]);
            let mut val = Rat::zero();
            for (m, c) in fv.terms() {
                debug_assert!(m.is_bare() && crate::lattice::is_zero_vec(&m.label));
                val += c;
            }
            form[i][j] = val;
        }
    }
    LieAlgebraData { dim: n, root_count: roots.len(), basis, bracket, form }
}
