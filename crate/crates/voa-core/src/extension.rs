//! The canonical central extension `L̂` of `L` by `<±1>` with commutator
//! `(-1)^<a,b>`, the involution `θ(a) = a^{-1}(-1)^{<ā,ā>/2}`, the subgroup
//! `K = {θ(a)a^{-1}}`, the finite quotient `L̂/K`, its central characters,
//! and the irreducible `L̂/K`-modules `T_χ` on which `(-1)K` acts as `-1`.
//!
//! Elements are signed lattice vectors through a section `e` with 2-cocycle
//! `ε`. Two cocycle conventions appear: the lower-triangular one produced
//! by [`build_cocycle`], and its normalized twist in which every lift
//! `e_{2a}` of `2L` lies in `K`; all vertex-operator and Zhu-algebra work
//! happens with the normalized one.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;


use crate::lattice::{
    self, coset_key, cosets_mod_2l, vec_add, vec_neg, vec_sub, CosetTable, GramMatrix,
    LatticeError, LatticeVector, SublatticeR,
};
use crate::scalar::{GaussRat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionError {
    /// The sampled closure of `K` failed; the cocycle is inconsistent.
    NotClosed,
    /// No diagonal sign twist puts the lifts of `2L` inside `K`.
    SectionAdjustmentFailed,
    /// The induced module has a commutant of dimension > 1.
    InductionNotIrreducible,
    /// Group table verification failed (not associative / not a group).
    NotAGroup,
}

impl fmt::Display for ExtensionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionError::NotClosed => write!(f, "NotClosed: K is not closed under products"),
            ExtensionError::SectionAdjustmentFailed => {
                write!(f, "SectionAdjustmentFailed: no coboundary twist places e_2a in K")
            }
            ExtensionError::InductionNotIrreducible => {
                write!(f, "InductionNotIrreducible: induced module has nonscalar commutant")
            }
            ExtensionError::NotAGroup => write!(f, "NotAGroup: quotient table fails group axioms"),
        }
    }
}

impl core::error::Error for ExtensionError {}

/// A bilinear 2-cocycle on `L` with values in `<±1>`, stored as exponents
/// on basis pairs and extended biadditively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    gram: GramMatrix,
    /// exps[i][j] ∈ {0,1}: ε(a_i, a_j) = (-1)^{exps[i][j]}
    exps: Vec<Vec<u8>>,
}

/// The standard lower-triangular convention: `ε(a_i, a_j) = (-1)^{<a_i,a_j>}`
/// for `i > j` and `1` for `i <= j`.
pub fn build_cocycle(gram: &GramMatrix) -> Cocycle {
    let d = gram.dim();
    let mut exps = vec![vec![0u8; d]; d];
    for i in 0..d {
        for j in 0..i {
            exps[i][j] = (gram.entries()[i][j].rem_euclid(2)) as u8;
        }
    }
    Cocycle { gram: gram.clone(), exps }
}

impl Cocycle {
    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    /// `ε(x, y) ∈ {+1, -1}` by biadditive extension.
    pub fn eps(&self, x: &[i64], y: &[i64]) -> i8 {
        let mut e = 0i64;
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if self.exps[i][j] == 1 {
                    e += xi * yj;
                }
            }
        }
        if e.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// The K-sign over `2γ`: the unique element of `K` above `2γ` is
    /// `(κ(γ), 2γ)` with `κ(γ) = (-1)^{<γ,γ>/2} ε(γ,γ)`.
    pub fn k_sign(&self, gamma: &[i64]) -> i8 {
        let h = self.gram.norm(gamma) / 2;
        let s = if h.rem_euclid(2) == 0 { 1 } else { -1 };
        s * self.eps(gamma, gamma)
    }

    /// Whether every lift `e_{2γ}` of `2L` lies in `K`, checked on a
    /// coordinate window.
    pub fn is_normalized(&self, window: i64) -> bool {
        let d = self.gram.dim();
        let mut coords = vec![-window; d];
        loop {
            if self.k_sign(&coords) != 1 {
                return false;
            }
            let mut i = 0;
            loop {
                if i == d {
                    return true;
                }
                coords[i] += 1;
                if coords[i] <= window {
                    break;
                }
                coords[i] = -window;
                i += 1;
            }
        }
    }

    /// Twists the section by diagonal signs so that every `e_{2γ}` lies in
    /// `K`. The twist is determined on a basis of `L/2L`, so the search
    /// space is the `2^d` diagonal sign patterns.
    pub fn normalize(&self) -> Result<Cocycle, ExtensionError> {
        let d = self.gram.dim();
        for mask in 0..(1u64 << d) {
            let mut exps = self.exps.clone();
            for (i, row) in exps.iter_mut().enumerate() {
                row[i] ^= ((mask >> i) & 1) as u8;
            }
            let cand = Cocycle { gram: self.gram.clone(), exps };
            if cand.is_normalized(2) {
                return Ok(cand);
            }
        }
        Err(ExtensionError::SectionAdjustmentFailed)
    }

    /// Test-only corruption hook: flips one table entry, breaking the
    /// cocycle axioms downstream.
    pub fn corrupted(&self, i: usize, j: usize) -> Cocycle {
        let mut exps = self.exps.clone();
        exps[i][j] ^= 1;
        Cocycle { gram: self.gram.clone(), exps }
    }
}

/// An element `± e_v` of the central extension.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExtElement {
    pub sign: i8,
    pub vec: LatticeVector,
}

impl ExtElement {
    pub fn section(vec: LatticeVector) -> Self {
        ExtElement { sign: 1, vec }
    }

    pub fn identity(dim: usize) -> Self {
        ExtElement { sign: 1, vec: vec![0; dim] }
    }

    /// Product law `(s, a)(t, b) = (s t ε(a,b), a + b)`.
    pub fn mul(&self, other: &ExtElement, c: &Cocycle) -> ExtElement {
        ExtElement {
            sign: self.sign * other.sign * c.eps(&self.vec, &other.vec),
            vec: vec_add(&self.vec, &other.vec),
        }
    }

    pub fn inv(&self, c: &Cocycle) -> ExtElement {
        let neg = vec_neg(&self.vec);
        ExtElement { sign: self.sign * c.eps(&self.vec, &neg), vec: neg }
    }
}

/// The involution `θ(a) = a^{-1} (-1)^{<ā,ā>/2}`; `θ̄ = -1` on `L`.
pub fn theta(a: &ExtElement, c: &Cocycle) -> ExtElement {
    let mut out = a.inv(c);
    let h = c.gram().norm(&a.vec) / 2;
    if h.rem_euclid(2) != 0 {
        out.sign = -out.sign;
    }
    out
}

/// The sign function of `K = {θ(a) a^{-1}}` on a coordinate window: maps
/// `2γ` to the sign of the unique `K`-element above it.
#[derive(Clone, Debug)]
pub struct KSigns {
    pub signs: BTreeMap<LatticeVector, i8>,
}

/// Computes `K` over a window of `γ` coordinates and verifies it is a
/// subgroup projecting onto `2L` with exactly one sign per vector.
pub fn build_k(c: &Cocycle, window: i64) -> Result<KSigns, ExtensionError> {
    let d = c.gram().dim();
    let mut signs: BTreeMap<LatticeVector, i8> = BTreeMap::new();
    let mut coords = vec![-window; d];
    loop {
        let a = ExtElement::section(coords.clone());
        let k = theta(&a, c).mul(&a.inv(c), c);
        // bar(K) = 2L
        if k.vec.iter().any(|x| x % 2 != 0) {
            return Err(ExtensionError::NotClosed);
        }
        if let Some(prev) = signs.insert(k.vec.clone(), k.sign) {
            if prev != k.sign {
                return Err(ExtensionError::NotClosed);
            }
        }
        let mut i = 0;
        loop {
            if i == d {
                // identity in K
                if signs.get(&vec![0i64; d]) != Some(&1) {
                    return Err(ExtensionError::NotClosed);
                }
                // closure on the window
                let keys: Vec<&LatticeVector> = signs.keys().collect();
                for x in &keys {
                    for y in &keys {
                        let sum = vec_add(x, y);
                        if let Some(&s) = signs.get(&sum) {
                            let prod = signs[*x] * signs[*y] * c.eps(x, y);
                            if prod != s {
                                return Err(ExtensionError::NotClosed);
                            }
                        }
                    }
                }
                return Ok(KSigns { signs });
            }
            coords[i] += 1;
            if coords[i] <= window {
                break;
            }
            coords[i] = -window;
            i += 1;
        }
    }
}

/// The finite quotient `L̂/K` of order `2^{d+1}`, as a full multiplication
/// table on pairs (sign, coset-representative index).
///
/// Element ids encode `(sign, rep)` as `2*rep + (sign < 0)`.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    pub order: usize,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    pub center: Vec<usize>,
}

pub fn element_id(sign: i8, rep: usize) -> usize {
    2 * rep + usize::from(sign < 0)
}

pub fn id_sign(id: usize) -> i8 {
    if id % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn id_rep(id: usize) -> usize {
    id / 2
}

impl QuotientGroup {
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn neg_one(&self) -> usize {
        1
    }

    /// `-1` times the element (the other lift of the same coset).
    pub fn negate(&self, a: usize) -> usize {
        a ^ 1
    }
}

/// Builds `L̂/K` from a normalized cocycle, verifying the group axioms
/// exhaustively.
pub fn quotient_group(c: &Cocycle, cosets: &CosetTable) -> Result<QuotientGroup, ExtensionError> {
    if !c.is_normalized(2) {
        return Err(ExtensionError::SectionAdjustmentFailed);
    }
    let n = 2 * cosets.count();
    let mut table = vec![vec![0usize; n]; n];
    for a in 0..n {
        for b in 0..n {
            let (sa, ra) = (id_sign(a), id_rep(a));
            let (sb, rb) = (id_sign(b), id_rep(b));
            let sum = vec_add(cosets.rep(ra), cosets.rep(rb));
            let rk = cosets.index_of(&sum);
            // e_sum ≡ ε(β_k, sum - β_k) κ((sum - β_k)/2) e_{β_k} mod K
            let twol = vec_sub(&sum, cosets.rep(rk));
            let gamma: LatticeVector = twol.iter().map(|x| x / 2).collect();
            let adjust = c.eps(cosets.rep(rk), &twol) * c.k_sign(&gamma);
            let sign = sa * sb * c.eps(cosets.rep(ra), cosets.rep(rb)) * adjust;
            table[a][b] = element_id(sign, rk);
        }
    }
    // group axioms
    for a in 0..n {
        if table[0][a] != a || table[a][0] != a {
            return Err(ExtensionError::NotAGroup);
        }
        for b in 0..n {
            for x in 0..n {
                if table[table[a][b]][x] != table[a][table[b][x]] {
                    return Err(ExtensionError::NotAGroup);
                }
            }
        }
    }
    let mut inverse = vec![0usize; n];
    for a in 0..n {
        let inv = (0..n).find(|&b| table[a][b] == 0).ok_or(ExtensionError::NotAGroup)?;
        if table[inv][a] != 0 {
            return Err(ExtensionError::NotAGroup);
        }
        inverse[a] = inv;
    }
    let center: Vec<usize> =
        (0..n).filter(|&a| (0..n).all(|b| table[a][b] == table[b][a])).collect();
    // (-1, 0) is central in any central extension
    if !center.contains(&1) {
        return Err(ExtensionError::NotAGroup);
    }
    Ok(QuotientGroup { order: n, table, inverse, center })
}

/// A multiplicative character of the central subgroup `R̂/K` with
/// `χ((-1)K) = -1`; values are fourth roots of unity.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralCharacter {
    pub values: BTreeMap<usize, GaussRat>,
}

impl CentralCharacter {
    pub fn value(&self, id: usize) -> &GaussRat {
        &self.values[&id]
    }
}

/// All central characters of `R̂/K` with `χ((-1)K) = -1`; there are
/// exactly `|R/2L|` of them.
pub fn central_characters(q: &QuotientGroup, r: &SublatticeR) -> Vec<CentralCharacter> {
    // R̂/K: both lifts of every coset inside R
    let mut z_ids: Vec<usize> = Vec::new();
    for &i in &r.rep_indices {
        z_ids.push(element_id(1, i));
        z_ids.push(element_id(-1, i));
    }
    z_ids.sort_unstable();
    // generators: -1 plus one lift per R/2L coset (its full set also works;
    // using all of them keeps the BFS trivial)
    let gens: Vec<usize> = r.rep_indices.iter().map(|&i| element_id(1, i)).collect();

    let fourth_roots = [
        GaussRat::from_int(1),
        GaussRat::i(),
        GaussRat::from_int(-1),
        -GaussRat::i(),
    ];

    // backtracking over consistent value assignments on generators
    let mut out: Vec<CentralCharacter> = Vec::new();
    let mut assignment: BTreeMap<usize, GaussRat> = BTreeMap::new();
    assignment.insert(q.identity(), GaussRat::from_int(1));
    assignment.insert(q.neg_one(), GaussRat::from_int(-1));

    fn propagate(
        q: &QuotientGroup,
        z_ids: &[usize],
        values: &mut BTreeMap<usize, GaussRat>,
    ) -> bool {
        // close under multiplication within Z until stable
        loop {
            let mut changed = false;
            let known: Vec<usize> = values.keys().copied().collect();
            for &a in &known {
                for &b in &known {
                    let ab = q.mul(a, b);
                    if !z_ids.contains(&ab) {
                        continue;
                    }
                    let v = &values[&a] * &values[&b];
                    match values.get(&ab) {
                        None => {
                            values.insert(ab, v);
                            changed = true;
                        }
                        Some(existing) => {
                            if *existing != v {
                                return false;
                            }
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(
        q: &QuotientGroup,
        z_ids: &[usize],
        gens: &[usize],
        k: usize,
        values: &BTreeMap<usize, GaussRat>,
        roots: &[GaussRat; 4],
        out: &mut Vec<CentralCharacter>,
    ) {
        if k == gens.len() {
            if values.len() == z_ids.len() {
                let chi = CentralCharacter { values: values.clone() };
                if !out.contains(&chi) {
                    out.push(chi);
                }
            }
            return;
        }
        let g = gens[k];
        if values.contains_key(&g) {
            search(q, z_ids, gens, k + 1, values, roots, out);
            return;
        }
        for root in roots {
            let mut next = values.clone();
            next.insert(g, root.clone());
            if propagate(q, z_ids, &mut next) {
                search(q, z_ids, gens, k + 1, &next, roots, out);
            }
        }
    }

    if !propagate(q, &z_ids, &mut assignment) {
        return Vec::new();
    }
    search(q, &z_ids, &gens, 0, &assignment, &fourth_roots, &mut out);
    out
}

pub type GMatrix = Vec<Vec<GaussRat>>;

fn gmat_mul(a: &GMatrix, b: &GMatrix) -> GMatrix {
    let n = a.len();
    let mut out = vec![vec![GaussRat::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[k][j].is_zero() {
                    continue;
                }
                let t = &a[i][k] * &b[k][j];
                out[i][j] += &t;
            }
        }
    }
    out
}

pub fn gmat_identity(n: usize) -> GMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { GaussRat::from_int(1) } else { GaussRat::zero() })
                .collect()
        })
        .collect()
}

/// The irreducible `L̂/K`-module with central character `χ`, constructed by
/// inducing a linear extension of `χ` from a maximal subgroup whose image
/// in `L/2L` is a maximal isotropic subspace containing `R/2L`.
#[derive(Clone, Debug)]
pub struct TChiModule {
    pub character: CentralCharacter,
    pub dim: usize,
    /// Action matrix per group-element id.
    pub action: Vec<GMatrix>,
}

impl TChiModule {
    pub fn matrix(&self, id: usize) -> &GMatrix {
        &self.action[id]
    }
}

pub fn irreducible_module(
    gram: &GramMatrix,
    cosets: &CosetTable,
    q: &QuotientGroup,
    r: &SublatticeR,
    chi: &CentralCharacter,
) -> Result<TChiModule, ExtensionError> {
    let d = gram.dim();
    // maximal isotropic subspace of (L/2L, <,> mod 2) containing R/2L,
    // by greedy extension
    let mut iso_keys: Vec<Vec<u8>> = r.kernel_basis.clone();
    let span = |basis: &[Vec<u8>], key: &[u8]| -> bool {
        for mask in 0..(1u64 << basis.len()) {
            let mut acc = vec![0u8; key.len()];
            for (i, b) in basis.iter().enumerate() {
                if (mask >> i) & 1 == 1 {
                    for (a, x) in acc.iter_mut().zip(b) {
                        *a ^= x;
                    }
                }
            }
            if acc == key {
                return true;
            }
        }
        false
    };
    let pair_even = |gram: &GramMatrix, a: &[u8], b: &[u8]| -> bool {
        let av: Vec<i64> = a.iter().map(|&x| x as i64).collect();
        let bv: Vec<i64> = b.iter().map(|&x| x as i64).collect();
        gram.ip(&av, &bv) % 2 == 0
    };
    for bits in 1..(1u64 << d) {
        let key: Vec<u8> = (0..d).map(|i| ((bits >> i) & 1) as u8).collect();
        if span(&iso_keys, &key) {
            continue;
        }
        if iso_keys.iter().all(|k| pair_even(gram, k, &key)) && pair_even(gram, &key, &key) {
            iso_keys.push(key);
        }
    }
    // subgroup ids over the isotropic subspace
    let mut sub_ids: Vec<usize> = Vec::new();
    for i in 0..cosets.count() {
        if span(&iso_keys, &coset_key(cosets.rep(i))) {
            sub_ids.push(element_id(1, i));
            sub_ids.push(element_id(-1, i));
        }
    }
    sub_ids.sort_unstable();
    // extend χ to a linear character of the (abelian) subgroup
    let mut chi_ext: BTreeMap<usize, GaussRat> = chi.values.clone();
    loop {
        let next = sub_ids.iter().copied().find(|id| !chi_ext.contains_key(id));
        let Some(g) = next else { break };
        // squares in L̂/K lie in <±1>, so χ(g) is a square root of χ(g²)
        let g2 = q.mul(g, g);
        let v2 = chi_ext.get(&g2).cloned().expect("square lies in extended domain");
        let v = if v2 == GaussRat::from_int(1) {
            GaussRat::from_int(1)
        } else {
            GaussRat::i()
        };
        let domain: Vec<usize> = chi_ext.keys().copied().collect();
        for h in domain {
            let gh = q.mul(g, h);
            let val = &v * &chi_ext[&h];
            if let Some(existing) = chi_ext.get(&gh) {
                if *existing != val {
                    return Err(ExtensionError::InductionNotIrreducible);
                }
            } else {
                chi_ext.insert(gh, val);
            }
        }
    }
    // coset representatives of the subgroup in Q
    let mut coset_rep_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut reps: Vec<usize> = Vec::new();
    for g in 0..q.order {
        if coset_rep_of.contains_key(&g) {
            continue;
        }
        for &h in &sub_ids {
            coset_rep_of.insert(q.mul(g, h), reps.len());
        }
        reps.push(g);
    }
    let n = reps.len();
    // induced action: ρ(g)[s][t] = χ(rep_s^{-1} g rep_t) when that lies in
    // the subgroup
    let mut action: Vec<GMatrix> = Vec::with_capacity(q.order);
    for g in 0..q.order {
        let mut m = vec![vec![GaussRat::zero(); n]; n];
        for (t, &qt) in reps.iter().enumerate() {
            let gqt = q.mul(g, qt);
            let s = coset_rep_of[&gqt];
            let h = q.mul(q.inv(reps[s]), gqt);
            m[s][t] = chi_ext[&h].clone();
        }
        action.push(m);
    }
    // representation property (generator x all pairs is enough, but the
    // groups here are tiny; cap the exhaustive check)
    let full = q.order <= 64;
    for a in 0..q.order {
        if !full && a >= 8 {
            break;
        }
        for b in 0..q.order {
            let prod = gmat_mul(&action[a], &action[b]);
            if prod != action[q.mul(a, b)] {
                return Err(ExtensionError::InductionNotIrreducible);
            }
        }
    }
    // irreducibility: commutant is scalar
    let mut rows: Vec<Vec<GaussRat>> = Vec::new();
    for g in 0..q.order {
        let m = &action[g];
        // [m, X] = 0: rows indexed by (i,j), unknowns X_{kl}
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![GaussRat::zero(); n * n];
                for k in 0..n {
                    // m[i][k] X[k][j]
                    if !m[i][k].is_zero() {
                        row[k * n + j] += &m[i][k];
                    }
                    // - X[i][k] m[k][j]
                    if !m[k][j].is_zero() {
                        let neg = -(m[k][j].clone());
                        row[i * n + k] += &neg;
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let nullity = crate::linalg::nullity_gauss(&mut rows, n * n);
    if nullity != 1 {
        return Err(ExtensionError::InductionNotIrreducible);
    }
    Ok(TChiModule { character: chi.clone(), dim: n, action })
}

/// Fully constructed extension context: the lattice data, the normalized
/// cocycle, the quotient group, its central characters and their
/// irreducible modules. All downstream modules consume this.
#[derive(Clone, Debug)]
pub struct Extension {
    pub gram: GramMatrix,
    pub cosets: CosetTable,
    pub r: SublatticeR,
    pub cocycle: Cocycle,
    pub gram_inv: Vec<Vec<Rat>>,
    pub quotient: QuotientGroup,
    pub characters: Vec<CentralCharacter>,
    pub modules: Vec<TChiModule>,
}

impl Extension {
    pub fn new(gram: GramMatrix) -> Result<Self, ExtensionError> {
        let cosets = cosets_mod_2l(&gram);
        let r = lattice::compute_r(&gram, &cosets);
        let cocycle = build_cocycle(&gram).normalize()?;
        build_k(&cocycle, 2)?;
        let quotient = quotient_group(&cocycle, &cosets)?;
        let characters = central_characters(&quotient, &r);
        let mut modules = Vec::with_capacity(characters.len());
        for chi in &characters {
            modules.push(irreducible_module(&gram, &cosets, &quotient, &r, chi)?);
        }
        let gram_inv = gram.inverse();
        Ok(Extension { gram, cosets, r, cocycle, gram_inv, quotient, characters, modules })
    }

    pub fn from_entries(entries: Vec<Vec<i64>>) -> Result<Self, ExtensionCreateError> {
        let gram = GramMatrix::new(entries).map_err(ExtensionCreateError::Lattice)?;
        Extension::new(gram).map_err(ExtensionCreateError::Extension)
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    pub fn eps(&self, x: &[i64], y: &[i64]) -> i8 {
        self.cocycle.eps(x, y)
    }

    pub fn theta_ext(&self, a: &ExtElement) -> ExtElement {
        theta(a, &self.cocycle)
    }

    /// Class of an extension element in `L̂/K` as an element id.
    pub fn class_of(&self, a: &ExtElement) -> usize {
        let k = self.cosets.index_of(&a.vec);
        let twol = vec_sub(&a.vec, self.cosets.rep(k));
        let gamma: LatticeVector = twol.iter().map(|x| x / 2).collect();
        let sign = a.sign * self.cocycle.eps(self.cosets.rep(k), &twol) * self.cocycle.k_sign(&gamma);
        element_id(sign, k)
    }
}

#[derive(Clone, Debug)]
pub enum ExtensionCreateError {
    Lattice(LatticeError),
    Extension(ExtensionError),
}

impl fmt::Display for ExtensionCreateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionCreateError::Lattice(e) => write!(f, "{e}"),
            ExtensionCreateError::Extension(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ExtensionCreateError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn a1() -> GramMatrix {
        GramMatrix::new(vec![vec![2]]).unwrap()
    }

    fn a2() -> GramMatrix {
        GramMatrix::new(vec![vec![2, -1], vec![-1, 2]]).unwrap()
    }

    fn d2() -> GramMatrix {
        GramMatrix::new(vec![vec![2, 0], vec![0, 2]]).unwrap()
    }

    #[test]
    fn cocycle_standard_examples() {
        let c = build_cocycle(&a1());
        // rank 1: biadditivity forces ε = 1 under the standard convention
        for m in -3..=3 {
            for n in -3..=3 {
                assert_eq!(c.eps(&[m], &[n]), 1);
            }
        }
        let c2 = build_cocycle(&a2());
        assert_eq!(c2.eps(&[1, 0], &[0, 0]), 1);
        assert_eq!(c2.eps(&[1, 0], &[0, 1]) * c2.eps(&[0, 1], &[1, 0]), -1);
    }

    #[test]
    fn cocycle_identities_window() {
        // commutator and cocycle identities on a window, both conventions
        for g in [a1(), a2(), d2()] {
            let d = g.dim();
            for c in [build_cocycle(&g), build_cocycle(&g).normalize().unwrap()] {
                let vecs: Vec<Vec<i64>> = window_vectors(d, 2);
                for x in &vecs {
                    for y in &vecs {
                        let comm = c.eps(x, y) * c.eps(y, x);
                        let expect = if g.ip(x, y).rem_euclid(2) == 0 { 1 } else { -1 };
                        assert_eq!(comm, expect);
                        assert_eq!(c.eps(x, &vec![0; d]), 1);
                        for z in vecs.iter().take(9) {
                            // ε(x,y)ε(x+y,z) = ε(y,z)ε(x,y+z)
                            let lhs = c.eps(x, y) * c.eps(&vec_add(x, y), z);
                            let rhs = c.eps(y, z) * c.eps(x, &vec_add(y, z));
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    fn window_vectors(d: usize, w: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut coords = vec![-w; d];
        loop {
            out.push(coords.clone());
            let mut i = 0;
            loop {
                if i == d {
                    return out;
                }
                coords[i] += 1;
                if coords[i] <= w {
                    break;
                }
                coords[i] = -w;
                i += 1;
            }
        }
    }

    #[test]
    fn normalized_diagonal_twist() {
        // normalization flips exactly the diagonal entries with G_ii/2 odd
        let c = build_cocycle(&a1()).normalize().unwrap();
        assert_eq!(c.eps(&[1], &[1]), -1);
        assert_eq!(c.k_sign(&[1]), 1);
        assert!(c.is_normalized(3));
        let c2 = build_cocycle(&a2()).normalize().unwrap();
        assert!(c2.is_normalized(2));
        for v in window_vectors(2, 2) {
            // ε(γ,γ) = (-1)^{<γ,γ>/2} under the normalized section
            let expect = if (a2().norm(&v) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
            assert_eq!(c2.eps(&v, &v), expect);
        }
    }

    #[test]
    fn section_product_law() {
        let c = build_cocycle(&a2()).normalize().unwrap();
        for x in window_vectors(2, 1) {
            for y in window_vectors(2, 1) {
                let ex = ExtElement::section(x.clone());
                let ey = ExtElement::section(y.clone());
                let prod = ex.mul(&ey, &c);
                assert_eq!(prod.vec, vec_add(&x, &y));
                assert_eq!(prod.sign, c.eps(&x, &y));
            }
        }
    }

    #[test]
    fn theta_is_involution_and_automorphism() {
        let c = build_cocycle(&a2()).normalize().unwrap();
        let mut rng = crate::rng::XorShift::new(7);
        for _ in 0..100 {
            let v: Vec<i64> = (0..2).map(|_| rng.range_i64(-3, 3)).collect();
            let s = if rng.below(2) == 0 { 1 } else { -1 };
            let a = ExtElement { sign: s, vec: v };
            let t2 = theta(&theta(&a, &c), &c);
            assert_eq!(t2, a);
            let w: Vec<i64> = (0..2).map(|_| rng.range_i64(-3, 3)).collect();
            let b = ExtElement::section(w);
            // θ(ab) = θ(a)θ(b)
            assert_eq!(
                theta(&a.mul(&b, &c), &c),
                theta(&a, &c).mul(&theta(&b, &c), &c)
            );
        }
        // identity fixed
        let id = ExtElement::identity(2);
        assert_eq!(theta(&id, &c), id);
    }

    #[test]
    fn theta_on_a1_standard_convention() {
        // with the unnormalized rank-1 cocycle (ε ≡ 1): θ(e_a) = -e_{-a}
        let c = build_cocycle(&a1());
        let a = ExtElement::section(vec![1]);
        assert_eq!(theta(&a, &c), ExtElement { sign: -1, vec: vec![-1] });
        // with the normalized one the sign is absorbed: θ(e_a) = e_{-a}
        let cn = c.normalize().unwrap();
        assert_eq!(theta(&a, &cn), ExtElement { sign: 1, vec: vec![-1] });
    }

    #[test]
    fn k_subgroup_properties() {
        for g in [a1(), a2(), d2()] {
            let c = build_cocycle(&g).normalize().unwrap();
            let k = build_k(&c, 2).unwrap();
            // bar(K) = 2L on the window, one sign per vector, identity in K
            assert_eq!(k.signs[&vec![0i64; g.dim()]], 1);
            for (v, s) in &k.signs {
                assert!(v.iter().all(|x| x % 2 == 0));
                assert_eq!(*s, 1, "normalized section puts every lift of 2L in K");
            }
        }
    }

    #[test]
    fn corrupted_cocycle_fails_loudly() {
        let g = a2();
        let c = build_cocycle(&g).normalize().unwrap().corrupted(0, 1);
        assert_eq!(build_k(&c, 2).unwrap_err(), ExtensionError::NotClosed);
    }

    #[test]
    fn quotient_group_orders_and_center() {
        let g = a1();
        let ext = Extension::new(g).unwrap();
        assert_eq!(ext.quotient.order, 4);
        // abelian: center is everything
        assert_eq!(ext.quotient.center.len(), 4);

        let ext2 = Extension::new(a2()).unwrap();
        assert_eq!(ext2.quotient.order, 8);
        // center = {±1} x (R/2L lifts) and R = 2L here
        assert_eq!(ext2.quotient.center, vec![0, 1]);
    }

    #[test]
    fn class_of_absorbs_k() {
        let ext = Extension::new(a1()).unwrap();
        // e_{2a} ∈ K: class is the identity
        assert_eq!(ext.class_of(&ExtElement::section(vec![2])), 0);
        // e_{-a} ≡ e_a mod K with + sign under the normalized section
        let minus = ext.class_of(&ExtElement::section(vec![-1]));
        let plus = ext.class_of(&ExtElement::section(vec![1]));
        assert_eq!(minus, plus);
        // θ descends to the identity on the quotient
        let a = ExtElement::section(vec![3]);
        assert_eq!(ext.class_of(&ext.theta_ext(&a)), ext.class_of(&a));
    }

    #[test]
    fn character_counts() {
        let e1 = Extension::new(a1()).unwrap();
        assert_eq!(e1.characters.len(), 2);
        let e2 = Extension::new(a2()).unwrap();
        assert_eq!(e2.characters.len(), 1);
        let e3 = Extension::new(d2()).unwrap();
        assert_eq!(e3.characters.len(), 4);
        for ext in [e1, e2, e3] {
            for chi in &ext.characters {
                assert_eq!(chi.value(1), &GaussRat::from_int(-1));
                // multiplicative on R̂/K
                let ids: Vec<usize> = chi.values.keys().copied().collect();
                for &a in &ids {
                    for &b in &ids {
                        let ab = ext.quotient.mul(a, b);
                        assert_eq!(&(chi.value(a) * chi.value(b)), chi.value(ab));
                    }
                }
            }
        }
    }

    #[test]
    fn irreducible_module_dims() {
        let e1 = Extension::new(a1()).unwrap();
        assert_eq!(e1.modules.len(), 2);
        assert!(e1.modules.iter().all(|m| m.dim == 1));
        let e2 = Extension::new(a2()).unwrap();
        assert_eq!(e2.modules.len(), 1);
        assert_eq!(e2.modules[0].dim, 2);
        let e3 = Extension::new(d2()).unwrap();
        assert_eq!(e3.modules.len(), 4);
        assert!(e3.modules.iter().all(|m| m.dim == 1));
        // sum of squared dims = 2^d
        for ext in [e1, e2, e3] {
            let total: usize = ext.modules.iter().map(|m| m.dim * m.dim).sum();
            assert_eq!(total, 1 << ext.dim());
        }
    }

    #[test]
    fn module_action_properties() {
        for g in [a1(), a2(), d2()] {
            let ext = Extension::new(g).unwrap();
            for m in &ext.modules {
                // (-1)K acts as -identity
                let neg = m.matrix(1);
                let minus_id: GMatrix = gmat_identity(m.dim)
                    .into_iter()
                    .map(|row| row.into_iter().map(|x| -x).collect())
                    .collect();
                assert_eq!(neg, &minus_id);
                // full multiplicativity
                for a in 0..ext.quotient.order {
                    for b in 0..ext.quotient.order {
                        assert_eq!(
                            gmat_mul(m.matrix(a), m.matrix(b)),
                            *m.matrix(ext.quotient.mul(a, b))
                        );
                    }
                }
                // θ(a) acts as a
                for v in [vec![1i64], vec![-3i64]] {
                    if ext.dim() != 1 {
                        continue;
                    }
                    let a = ExtElement::section(v);
                    assert_eq!(
                        m.matrix(ext.class_of(&ext.theta_ext(&a))),
                        m.matrix(ext.class_of(&a))
                    );
                }
            }
        }
    }

    #[test]
    fn a1_order_four_characters_take_imaginary_values() {
        let ext = Extension::new(a1()).unwrap();
        // e_a K has order 4, so χ(e_a K) = ±i
        let id_ea = ext.class_of(&ExtElement::section(vec![1]));
        let mut vals: Vec<GaussRat> =
            ext.characters.iter().map(|c| c.value(id_ea).clone()).collect();
        vals.sort_by(|a, b| {
            (a.re.clone(), a.im.clone()).partial_cmp(&(b.re.clone(), b.im.clone())).unwrap()
        });
        assert_eq!(vals, vec![-GaussRat::i(), GaussRat::i()]);
        let _ = rat(0);
    }
}
