//! Graded Fock states over exact scalars.
//!
//! A monomial is `a_{i1}(n1) ... a_{ik}(nk) ⊗ label` with strictly negative
//! modes; modes are stored doubled (`n2 = 2n`) so the untwisted sector
//! (integer modes, even `n2`) and the twisted sector (half-integer modes,
//! odd `n2`) share one representation. Untwisted labels are lattice
//! vectors (the `ι(e_γ)` part); twisted labels index a basis of `T_χ`.
//!
//! Heisenberg contractions are carried out in the lattice basis frame:
//! `[a_i(m), a_j(n)] = m <a_i, a_j> δ_{m+n,0}` with the Gram pairing, and
//! frame sums `Σ_i h_i(m) h_i(n)` over an orthonormal basis become
//! `Σ_{ij} (G^{-1})_{ij} a_i(m) a_j(n)`, keeping everything rational.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::lattice::{GramMatrix, LatticeVector};
use crate::scalar::{
    partition_weight_half, partitions, partitions_doubled, rat, ratq, Coeff, GaussRat, Rat,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FockError {
    /// A mode of the wrong parity for the state's sector was applied.
    SectorMismatch,
    /// The state mixes different weights.
    NotHomogeneous,
}

impl fmt::Display for FockError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FockError::SectorMismatch => {
                write!(f, "SectorMismatch: mode parity does not match sector")
            }
            FockError::NotHomogeneous => write!(f, "NotHomogeneous: state mixes weights"),
        }
    }
}

impl core::error::Error for FockError {}

/// Sector-specific label behaviour.
pub trait SectorLabel: Ord + Clone + fmt::Debug {
    /// Doubled-mode parity: 0 for integer modes, 1 for half-integer modes.
    const MODE_PARITY: i32;
    /// Eigenvalue of the zero mode `v(0)` on this label (untwisted only).
    fn zero_mode(&self, v: &[i64], gram: &GramMatrix) -> Rat;
    /// Weight of the label itself.
    fn weight_offset(&self, gram: &GramMatrix) -> Rat;
}

impl SectorLabel for LatticeVector {
    const MODE_PARITY: i32 = 0;
    fn zero_mode(&self, v: &[i64], gram: &GramMatrix) -> Rat {
        rat(gram.ip(v, self))
    }
    fn weight_offset(&self, gram: &GramMatrix) -> Rat {
        ratq(gram.norm(self), 2)
    }
}

/// Twisted labels index a basis of the top level `T_χ`; the grading offset
/// is `d/16` independent of the label.
impl SectorLabel for usize {
    const MODE_PARITY: i32 = 1;
    fn zero_mode(&self, _v: &[i64], _gram: &GramMatrix) -> Rat {
        unreachable!("half-integer sector has no zero modes")
    }
    fn weight_offset(&self, gram: &GramMatrix) -> Rat {
        ratq(gram.dim() as i64, 16)
    }
}

/// Basis monomial: sorted multiset of (basis index, doubled negative mode)
/// plus a label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial<L> {
    /// Sorted ascending; each entry is `(basis index, n2)` with `n2 < 0`.
    pub modes: Vec<(u8, i32)>,
    pub label: L,
}

impl<L: SectorLabel> Monomial<L> {
    pub fn new(mut modes: Vec<(u8, i32)>, label: L) -> Self {
        debug_assert!(modes.iter().all(|&(_, n2)| n2 < 0 && n2.rem_euclid(2) == L::MODE_PARITY));
        modes.sort_unstable();
        Monomial { modes, label }
    }

    pub fn bare(label: L) -> Self {
        Monomial { modes: Vec::new(), label }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn is_bare(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn weight(&self, gram: &GramMatrix) -> Rat {
        let mode_sum: i64 = self.modes.iter().map(|&(_, n2)| -(n2 as i64)).sum();
        ratq(mode_sum, 2) + self.label.weight_offset(gram)
    }

    /// Deepest mode magnitude (doubled); 0 when bare.
    pub fn max_depth2(&self) -> i32 {
        self.modes.iter().map(|&(_, n2)| -n2).max().unwrap_or(0)
    }

    pub fn with_mode(&self, i: u8, n2: i32) -> Self {
        let mut modes = self.modes.clone();
        let pos = modes.partition_point(|&m| m < (i, n2));
        modes.insert(pos, (i, n2));
        Monomial { modes, label: self.label.clone() }
    }

    fn without_index(&self, idx: usize) -> Self {
        let mut modes = self.modes.clone();
        modes.remove(idx);
        Monomial { modes, label: self.label.clone() }
    }
}

/// Finite linear combination of monomials with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State<L: SectorLabel, S: Coeff> {
    terms: BTreeMap<Monomial<L>, S>,
}

/// Untwisted states: lattice labels, rational coefficients.
pub type UState = State<LatticeVector, Rat>;
/// Twisted states: `T_χ` basis labels, Gaussian-rational coefficients.
pub type TState = State<usize, GaussRat>;

impl<L: SectorLabel, S: Coeff> State<L, S> {
    pub fn zero() -> Self {
        State { terms: BTreeMap::new() }
    }

    pub fn from_term(m: Monomial<L>, c: S) -> Self {
        let mut s = State::zero();
        s.add_term(m, c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial<L>, &S)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial<L>, S)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial<L>) -> Option<&S> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: Monomial<L>, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                existing.add_assign_ref(&c);
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &S) {
        if factor.is_zero() {
            return;
        }
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c.mul_ref(factor));
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = State::zero();
        out.add_scaled(self, factor);
        out
    }

    pub fn scale_rat(&self, factor: &Rat) -> Self {
        let mut out = State::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c.mul_rat(factor));
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = State::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c.neg_ref());
        }
        out
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c.neg_ref());
        }
    }

    /// Common weight of all monomials, or `NotHomogeneous`.
    pub fn weight(&self, gram: &GramMatrix) -> Result<Rat, FockError> {
        let mut it = self.terms.keys();
        let first = it.next().ok_or(FockError::NotHomogeneous)?.weight(gram);
        for m in it {
            if m.weight(gram) != first {
                return Err(FockError::NotHomogeneous);
            }
        }
        Ok(first)
    }

    /// Largest monomial weight present; zero state gives None.
    pub fn max_weight(&self, gram: &GramMatrix) -> Option<Rat> {
        self.terms.keys().map(|m| m.weight(gram)).max()
    }

    /// Deepest mode magnitude (doubled) over all monomials.
    pub fn max_depth2(&self) -> i32 {
        self.terms.keys().map(|m| m.max_depth2()).max().unwrap_or(0)
    }
}

/// `ι(a)` for an extension element: the bare monomial over `ā` with the
/// element's sign.
pub fn iota(a: &crate::extension::ExtElement) -> UState {
    State::from_term(Monomial::bare(a.vec.clone()), rat(a.sign as i64))
}

/// Vacuum state of the untwisted sector.
pub fn vacuum(dim: usize) -> UState {
    State::from_term(Monomial::bare(vec![0i64; dim]), Rat::one())
}

/// Top-level twisted state `1 ⊗ t_idx`.
pub fn top_state(idx: usize) -> TState {
    State::from_term(Monomial::bare(idx), GaussRat::one())
}

/// Action of the Heisenberg mode `v(n)` of the lattice vector `v` on a
/// state: creation for `n2 < 0`, contraction for `n2 > 0`, and the label
/// pairing for `n2 = 0` (untwisted only).
pub fn heisenberg_act<L: SectorLabel, S: Coeff>(
    gram: &GramMatrix,
    v: &[i64],
    n2: i32,
    state: &State<L, S>,
) -> Result<State<L, S>, FockError> {
    if n2.rem_euclid(2) != L::MODE_PARITY {
        return Err(FockError::SectorMismatch);
    }
    let mut out = State::zero();
    for (m, c) in state.terms() {
        heisenberg_act_term(gram, v, n2, m, c, &mut out);
    }
    Ok(out)
}

fn heisenberg_act_term<L: SectorLabel, S: Coeff>(
    gram: &GramMatrix,
    v: &[i64],
    n2: i32,
    m: &Monomial<L>,
    c: &S,
    out: &mut State<L, S>,
) {
    if n2 < 0 {
        // creation: v(n) = Σ_i v_i a_i(n)
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            out.add_term(m.with_mode(i as u8, n2), c.mul_rat(&rat(vi)));
        }
    } else if n2 == 0 {
        let eig = m.label.zero_mode(v, gram);
        if !eig.is_zero() {
            out.add_term(m.clone(), c.mul_rat(&eig));
        }
    } else {
        // annihilation: contract against each matching negative mode;
        // [v(n), a_j(-n)] = n <v, a_j>
        let pairing = gram.pairing_vector(v);
        for (idx, &(j, m2)) in m.modes.iter().enumerate() {
            if m2 != -n2 {
                continue;
            }
            let factor = ratq(n2 as i64, 2) * rat(pairing[j as usize]);
            if factor.is_zero() {
                continue;
            }
            out.add_term(m.without_index(idx), c.mul_rat(&factor));
        }
    }
}

/// Applies the creation product `Π_k v(-k)` over a doubled partition.
pub fn apply_creation_partition<L: SectorLabel, S: Coeff>(
    gram: &GramMatrix,
    v: &[i64],
    parts2: &[u32],
    state: &State<L, S>,
) -> State<L, S> {
    let mut cur = state.clone();
    for &p2 in parts2 {
        cur = heisenberg_act(gram, v, -(p2 as i32), &cur).expect("parity fixed by caller");
        if cur.is_zero() {
            break;
        }
    }
    cur
}

/// Applies the annihilation product `Π_k v(k)` over a doubled partition.
pub fn apply_annihilation_partition<L: SectorLabel, S: Coeff>(
    gram: &GramMatrix,
    v: &[i64],
    parts2: &[u32],
    state: &State<L, S>,
) -> State<L, S> {
    let mut cur = state.clone();
    for &p2 in parts2 {
        cur = heisenberg_act(gram, v, p2 as i32, &cur).expect("parity fixed by caller");
        if cur.is_zero() {
            break;
        }
    }
    cur
}

/// The elementary Schur polynomial `p_r` as an explicit list of
/// (partition, coefficient) pairs:
/// `p_r = Σ_{λ ⊢ r} (Π_k x_k^{m_k}) / (Π_k k^{m_k} m_k!)`.
pub fn schur(r: u32) -> Vec<(Vec<u32>, Rat)> {
    partitions(r)
        .into_iter()
        .map(|parts| {
            let parts2: Vec<u32> = parts.iter().map(|&p| 2 * p).collect();
            let w = partition_weight_half(&parts2);
            (parts, w)
        })
        .collect()
}

/// Creation-side expansion of `exp(Σ_{k>0} (v(-k)/k) z^k)` at doubled
/// order `r2`: doubled partitions with their rational weights. `parity`
/// selects integer (`0`) or half-integer (`1`) mode support.
pub fn creation_expansion(r2: u32, parity: i32) -> Vec<(Vec<u32>, Rat)> {
    partitions_doubled(r2, parity == 1)
        .into_iter()
        .filter(|parts2| parity == 1 || parts2.iter().all(|p| p % 2 == 0))
        .map(|parts2| {
            let w = partition_weight_half(&parts2);
            (parts2, w)
        })
        .collect()
}

/// Annihilation-side expansion of `exp(-Σ_{k>0} (v(k)/k) z^{-k})` at
/// doubled order `s2`: like [`creation_expansion`] with the alternating
/// sign `(-1)^{number of parts}`.
pub fn annihilation_expansion(s2: u32, parity: i32) -> Vec<(Vec<u32>, Rat)> {
    creation_expansion(s2, parity)
        .into_iter()
        .map(|(parts2, w)| {
            let w = if parts2.len() % 2 == 1 { -w } else { w };
            (parts2, w)
        })
        .collect()
}

/// Taylor coefficients `c_{mn}` of
/// `-log(((1+x)^{1/2} + (1+y)^{1/2})/2)`, computed by exact series
/// composition up to the requested total order. The values are rational
/// (already `c_{10} = -1/4`), not integral.
#[derive(Clone, Debug)]
pub struct DeltaCoeffs {
    pub max_order: usize,
    c: Vec<Vec<Rat>>,
}

impl DeltaCoeffs {
    pub fn get(&self, m: usize, n: usize) -> &Rat {
        &self.c[m][n]
    }
}

pub fn delta_coefficients(max_order: usize) -> DeltaCoeffs {
    let n = max_order + 1;
    // series (1+x)^{1/2} truncated
    let half = ratq(1, 2);
    let sqrt: Vec<Rat> = (0..n).map(|k| crate::scalar::binom_rat(&half, k as u64)).collect();
    // s(x,y) = (sqrt(1+x) + sqrt(1+y))/2 - 1
    let mut s = vec![vec![Rat::zero(); n]; n];
    for k in 1..n {
        s[k][0] = &sqrt[k] / rat(2);
        s[0][k] = &sqrt[k] / rat(2);
    }
    let mul = |a: &Vec<Vec<Rat>>, b: &Vec<Vec<Rat>>| -> Vec<Vec<Rat>> {
        let mut out = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if a[i][j].is_zero() {
                    continue;
                }
                for k in 0..n - i {
                    for l in 0..n - j {
                        if b[k][l].is_zero() {
                            continue;
                        }
                        let t = &a[i][j] * &b[k][l];
                        out[i + k][j + l] += t;
                    }
                }
            }
        }
        out
    };
    // -log(1 + s) = Σ_{k>=1} (-1)^k s^k / k
    let mut acc = vec![vec![Rat::zero(); n]; n];
    let mut power = s.clone();
    for k in 1..=(2 * max_order).max(1) {
        let sign = if k % 2 == 1 { -Rat::one() } else { Rat::one() };
        let factor = sign / rat(k as i64);
        let mut any = false;
        for i in 0..n {
            for j in 0..n {
                if !power[i][j].is_zero() {
                    any = true;
                    acc[i][j] += &power[i][j] * &factor;
                }
            }
        }
        if !any {
            break;
        }
        power = mul(&power, &s);
    }
    DeltaCoeffs { max_order, c: acc }
}

/// `e^{Δ_z} v` as a Laurent polynomial in `z`: a map from `k` to the
/// coefficient state of `z^{-k}`. The exponential terminates because each
/// application of `Δ_z` strictly shortens monomials.
pub fn apply_delta(gram: &GramMatrix, state: &UState) -> BTreeMap<u32, UState> {
    let max_order = state
        .max_weight(gram)
        .map(|w| {
            let f = w.floor().to_integer();
            i64::try_from(f).unwrap_or(0).max(0) as usize
        })
        .unwrap_or(0);
    let delta = delta_coefficients(max_order);
    let mut result: BTreeMap<u32, UState> = BTreeMap::new();
    let mut term: BTreeMap<u32, UState> = BTreeMap::new();
    term.insert(0, state.clone());
    result.insert(0, state.clone());
    let mut k = 0u32;
    while !term.is_empty() {
        k += 1;
        let next = delta_once(gram, &delta, &term);
        let mut scaled: BTreeMap<u32, UState> = BTreeMap::new();
        let inv_k = Rat::one() / rat(k as i64);
        for (p, s) in next {
            let s = s.scale_rat(&inv_k);
            if !s.is_zero() {
                scaled.insert(p, s);
            }
        }
        for (p, s) in &scaled {
            match result.get_mut(p) {
                Some(acc) => acc.add_assign(s),
                None => {
                    result.insert(*p, s.clone());
                }
            }
        }
        term = scaled;
    }
    result.retain(|_, s| !s.is_zero());
    result
}

/// One application of
/// `Δ_z = Σ_{m,n>=0} c_{mn} Σ_{ij} (G^{-1})_{ij} a_i(m) a_j(n) z^{-m-n}`.
///
/// The frame sum collapses exactly: contracting the right factor against a
/// stored mode `a_l(-n)` cancels `G^{-1}` against the Gram pairing and
/// leaves `n a_l(m)`; a zero-mode right factor leaves the label vector's
/// own mode `γ(m)`.
fn delta_once(
    gram: &GramMatrix,
    delta: &DeltaCoeffs,
    family: &BTreeMap<u32, UState>,
) -> BTreeMap<u32, UState> {
    let mut out: BTreeMap<u32, UState> = BTreeMap::new();
    let mut add = |power: u32, st: UState| {
        if st.is_zero() {
            return;
        }
        match out.get_mut(&power) {
            Some(acc) => acc.add_assign(&st),
            None => {
                out.insert(power, st);
            }
        }
    };
    for (&base_power, state) in family {
        for (mono, coeff) in state.terms() {
            for m in 0..=delta.max_order {
                for n in 0..=delta.max_order - m {
                    let c = delta.get(m, n);
                    if c.is_zero() {
                        continue;
                    }
                    let power = base_power + (m + n) as u32;
                    if n == 0 {
                        if m == 0 {
                            continue;
                        }
                        // Σ_ij (G^{-1})_{ij} a_i(m) a_j(0) = label(m)
                        let lbl = mono.label.clone();
                        let st = mode_on_term(gram, mono, coeff, &lbl, m as i32);
                        add(power, st.scale_rat(c));
                    } else {
                        for (idx, &(l, m2)) in mono.modes.iter().enumerate() {
                            if m2 != -(2 * n as i32) {
                                continue;
                            }
                            let shorter = mono.without_index(idx);
                            let factor = rat(n as i64) * coeff;
                            let mut unit = vec![0i64; gram.dim()];
                            unit[l as usize] = 1;
                            let st = mode_on_term(gram, &shorter, &factor, &unit, m as i32);
                            add(power, st.scale_rat(c));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Applies the mode `v(m)` (m >= 0, untwisted) to a single term.
fn mode_on_term(
    gram: &GramMatrix,
    mono: &Monomial<LatticeVector>,
    coeff: &Rat,
    v: &[i64],
    m: i32,
) -> UState {
    let single = UState::from_term(mono.clone(), coeff.clone());
    heisenberg_act(gram, v, 2 * m, &single).expect("untwisted parity")
}
