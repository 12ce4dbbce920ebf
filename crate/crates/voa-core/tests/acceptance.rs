//! Acceptance suite: every structural claim the engine is expected to
//! reproduce on the desk-scale lattices, one criterion per test, all
//! checks exact (rational arithmetic, zero tolerance).
//!
//! Run with `cargo test -p voa-core --test acceptance -- --nocapture` to
//! see one PASS line per criterion.

use num_traits::{One, Zero};

use voa_core::extension::{build_cocycle, build_k, ExtElement, Extension, ExtensionError};
use voa_core::fock::{delta_coefficients, iota, schur, Monomial, UState};
use voa_core::lattice::{isometry_group, short_vectors, validate, LatticeError};
use voa_core::rng::XorShift;
use voa_core::scalar::{binom_rat, pow2, rat, ratq, GaussRat, Rat};
use voa_core::twisted::{
    calibrate_normalization, class_top_matrices, o_value_matrices, top_level_matrices,
    Normalization,
};
use voa_core::voa::{basis_of_weight, colored_mode_multisets, weight_one_lie_algebra};
use voa_core::zhu::{
    c_rows, check_associativity, check_group_algebra_iso, circle_product, reduce,
    semisimplicity_and_rationality, star_product, u_alpha, zhu_structure,
};
use voa_core::{aut, GramMatrix};

fn ext_of(entries: Vec<Vec<i64>>) -> Extension {
    Extension::new(GramMatrix::new(entries).unwrap()).unwrap()
}

fn a1() -> Extension {
    ext_of(vec![vec![2]])
}

fn a2() -> Extension {
    ext_of(vec![vec![2, -1], vec![-1, 2]])
}

fn d2() -> Extension {
    ext_of(vec![vec![2, 0], vec![0, 2]])
}

fn gmat_mul(a: &[Vec<GaussRat>], b: &[Vec<GaussRat>]) -> Vec<Vec<GaussRat>> {
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
                out[i][j] += &(&a[i][k] * &b[k][j]);
            }
        }
    }
    out
}

/// Criterion 1: twisted-module census. Exactly |R/2L| central characters
/// with χ(-1) = -1 and the predicted module dimensions: A1 -> 2 of dim 1,
/// A2 -> 1 of dim 2, diag(2,2) -> 4 of dim 1.
#[test]
fn criterion_1_twisted_module_census() {
    let cases = [
        (a1(), 2usize, vec![1usize, 1]),
        (a2(), 1, vec![2]),
        (d2(), 4, vec![1, 1, 1, 1]),
    ];
    for (ext, chars, dims) in cases {
        assert_eq!(ext.characters.len(), chars);
        let mut got: Vec<usize> = ext.modules.iter().map(|m| m.dim).collect();
        got.sort_unstable();
        assert_eq!(got, dims);
        for chi in &ext.characters {
            assert_eq!(chi.value(1), &GaussRat::from_int(-1));
        }
        println!(
            "criterion 1 PASS: rank {} lattice has {} modules of dims {:?}",
            ext.dim(),
            chars,
            dims
        );
    }
}

/// Criterion 2: dim A_θ(V_L) = 2^d, the table is isomorphic to
/// C[L̂/K]/((-1)K+1) under f(e_β K) = u_β, and associativity holds on all
/// 2^{3d} triples.
#[test]
fn criterion_2_zhu_algebra_structure() {
    for ext in [a1(), a2(), d2()] {
        let zs = zhu_structure(&ext).unwrap();
        assert_eq!(zs.dim, 1 << ext.dim());
        let iso = check_group_algebra_iso(&ext, &zs).unwrap();
        assert!(iso.is_isomorphic, "table equals the group algebra table");
        assert!(check_associativity(&ext, &zs), "all triples associate");
        println!(
            "criterion 2 PASS: rank {} A_theta has dim {}, isomorphic to the group algebra, associative on {} triples",
            ext.dim(),
            zs.dim,
            zs.dim * zs.dim * zs.dim
        );
    }
}

/// Criterion 3: structure constants. u_α ∗ u_β ≡ ε(α,β) u_{α+β} for all
/// representative pairs with both pairing signs exercised on A2, and the
/// rank-1 reduction ι(e_{2α}) ≡ 2^{-4<α,α>} 1 = 2^{-8} 1.
#[test]
fn criterion_3_structure_constants() {
    let ext = a2();
    let mut seen = (false, false);
    for i in 0..ext.cosets.count() {
        for j in 0..ext.cosets.count() {
            let bi = ext.cosets.rep(i).clone();
            let bj = ext.cosets.rep(j).clone();
            let ip = ext.gram.ip(&bi, &bj);
            seen.0 |= ip < 0;
            seen.1 |= ip > 0;
            let (lhs, _) =
                reduce(&ext, &star_product(&ext, &u_alpha(&ext, &bi), &u_alpha(&ext, &bj)).unwrap())
                    .unwrap();
            let sum = voa_core::lattice::vec_add(&bi, &bj);
            let (rhs_raw, _) = reduce(&ext, &u_alpha(&ext, &sum)).unwrap();
            let rhs = rhs_raw.scale(&rat(ext.eps(&bi, &bj) as i64));
            assert_eq!(lhs, rhs, "pair ({i},{j})");
        }
    }
    assert!(seen.0 && seen.1, "both pairing-sign branches exercised");
    // rank-1 value: the intrinsic reduction pins the scalar exactly
    let ext1 = a1();
    let mut tr = voa_core::zhu::ReductionTrace::default();
    let (s, idx) = voa_core::zhu::reduce_exponential(&ext1, &vec![2], &mut tr).unwrap();
    assert_eq!(idx, 0);
    assert_eq!(s, pow2(-8));
    println!("criterion 3 PASS: u-products match eps(a,b) u_(a+b) on all pairs; iota(e_2a) = 2^-8 vacuum");
}

/// Criterion 4: dual-path oracle. For every representative pair and 100
/// random states of weight <= 5, the reduction value equals the top-level
/// evaluation ⊕_χ o(·); circle-product generators evaluate to zero
/// matrices. This calibrates and locks the twisted normalization.
#[test]
fn criterion_4_dual_path_oracle() {
    for ext in [a1(), a2()] {
        let norm = calibrate_normalization(&ext).unwrap();
        assert_eq!(
            norm,
            Normalization::NormSquared,
            "calibration locks the 2^(-<a,a>) convention"
        );
        // representative pairs: o is an algebra homomorphism
        for i in 0..ext.cosets.count() {
            for j in 0..ext.cosets.count() {
                let ui = u_alpha(&ext, &ext.cosets.rep(i).clone());
                let uj = u_alpha(&ext, &ext.cosets.rep(j).clone());
                let (red, _) = reduce(&ext, &star_product(&ext, &ui, &uj).unwrap()).unwrap();
                let via_class = class_top_matrices(&ext, norm, &red).unwrap();
                let oi = top_level_matrices(&ext, norm, &ui).unwrap();
                let oj = top_level_matrices(&ext, norm, &uj).unwrap();
                for ((a, b), c) in oi.iter().zip(&oj).zip(&via_class) {
                    assert_eq!(&gmat_mul(a, b), c, "o(u_i)o(u_j) = o(u_i * u_j)");
                }
            }
        }
        // 100 random homogeneous states of weight <= 5
        let mut rng = XorShift::new(2024);
        let mut tested = 0;
        while tested < 100 {
            let w = rng.range_i64(0, 5);
            let basis = basis_of_weight(&ext, w);
            let mono = basis[rng.below(basis.len() as u64) as usize].clone();
            let num = rng.range_i64(1, 5) * if rng.below(2) == 0 { 1 } else { -1 };
            let state = UState::from_term(mono, ratq(num, 2));
            let (z, _) = reduce(&ext, &state).unwrap();
            let via_class = class_top_matrices(&ext, norm, &z).unwrap();
            let direct = top_level_matrices(&ext, norm, &state).unwrap();
            assert_eq!(via_class, direct, "state {state:?}");
            tested += 1;
        }
        // circle-product generators (weight <= 5) act as zero on every
        // top level
        let mut killed = 0;
        while killed < 100 {
            let wu = rng.range_i64(1, 3);
            let wv = rng.range_i64(0, 2);
            let bu = basis_of_weight(&ext, wu);
            let bv = basis_of_weight(&ext, wv);
            let u = UState::from_term(bu[rng.below(bu.len() as u64) as usize].clone(), rat(1));
            let v = UState::from_term(bv[rng.below(bv.len() as u64) as usize].clone(), rat(1));
            let gen = circle_product(&ext, &u, &v).unwrap();
            if gen.is_zero() {
                continue;
            }
            for m in o_value_matrices(&ext, norm, &gen).unwrap() {
                assert!(m.iter().flatten().all(|x| x.is_zero()), "o kills O_theta");
            }
            killed += 1;
        }
        println!(
            "criterion 4 PASS: rank {} dual paths agree on all rep pairs, 100 random states, 100 circle generators",
            ext.dim()
        );
    }
}

/// Criterion 5: A_θ(M(1)) is one-dimensional: every pure Heisenberg state
/// of weight <= 6 reduces to a scalar multiple of the vacuum class.
#[test]
fn criterion_5_m1_reduces_to_scalars() {
    for ext in [a1(), a2()] {
        let d = ext.dim();
        let mut count = 0;
        for w in 0..=6 {
            for modes in colored_mode_multisets(d as u8, w) {
                let state = UState::from_term(Monomial::new(modes, vec![0i64; d]), rat(1));
                let (z, _) = reduce(&ext, &state).unwrap();
                for k in 1..z.coeffs.len() {
                    assert!(z.coeffs[k].is_zero(), "M(1) state leaks outside the vacuum class");
                }
                count += 1;
            }
        }
        println!("criterion 5 PASS: rank {d}: {count} M(1) states of weight <= 6 reduce to scalars");
    }
}

/// Criterion 6: θ-rationality certificate. Nondegenerate trace form,
/// Σ (dim T_χ)^2 = 2^d, and o(ω) = (d/16)·id on every top level
/// (λ = 1/16 in rank 1, 1/8 for A2).
#[test]
fn criterion_6_rationality_certificate() {
    for (ext, lambda) in [(a1(), ratq(1, 16)), (a2(), ratq(1, 8)), (d2(), ratq(1, 8))] {
        let zs = zhu_structure(&ext).unwrap();
        let norm = calibrate_normalization(&ext).unwrap();
        let cert = semisimplicity_and_rationality(&ext, &zs, norm).unwrap();
        assert!(cert.semisimple);
        assert!(!cert.trace_form_det.is_zero());
        assert_eq!(cert.sum_dim_squares, 1 << ext.dim());
        assert_eq!(cert.top_weight, lambda);
        assert!(cert.same_constant_on_all_modules);
        println!(
            "criterion 6 PASS: rank {} certificate: semisimple, {} modules, lambda = {}",
            ext.dim(),
            cert.module_count,
            cert.top_weight
        );
    }
}

/// Criterion 7: automorphism skeleton. |O(A1)| = 2, |O(A2)| = 12,
/// |O(L̂)| = 2^d |O(L)|; all 2^d diagonal automorphisms realized; θ and
/// the tested lifted isometries pass the truncated automorphism check
/// (cutoff 4 in rank 1, 3 in rank 2); the conjugation identity holds for
/// the O(L̂) generators and every nilpotent weight-one generator.
#[test]
fn criterion_7_automorphism_skeleton() {
    // rank 1 at cutoff 4
    let ext = a1();
    assert_eq!(isometry_group(&ext.gram).len(), 2);
    let homs = aut::hom_l_z2(&ext);
    assert_eq!(homs.len(), 2);
    for h in &homs {
        assert!(aut::verify_automorphism(&ext, &aut::Automorphism::Diagonal(h.clone()), 3).is_ok());
    }
    let th = aut::theta_aut(&ext);
    assert!(aut::verify_automorphism(&ext, &aut::Automorphism::Lifted(th.clone()), 4).is_ok());
    for root in short_vectors(&ext.gram, 2) {
        let a = iota(&ExtElement::section(root));
        assert!(aut::conjugation_identity(&ext, &th, &a, 3).is_ok());
    }
    println!("criterion 7 PASS: rank 1: |O(L)| = 2, theta verified at cutoff 4, conjugation at cutoff 3");

    // rank 2 at cutoff 3
    let ext = a2();
    let group = isometry_group(&ext.gram);
    assert_eq!(group.len(), 12);
    assert_eq!(aut::hom_l_z2(&ext).len(), 4);
    let report = aut::aut_report(&ext);
    assert_eq!(report.o_lhat_order, 48); // 2^d |O(L)|
    let th = aut::theta_aut(&ext);
    assert!(aut::verify_automorphism(&ext, &aut::Automorphism::Lifted(th.clone()), 3).is_ok());
    // find two generators of O(A2) by closure
    let gens = find_generators(&group);
    assert!(gens.len() <= 2);
    let roots = short_vectors(&ext.gram, 2);
    for g in &gens {
        let lift = aut::lift_isometry(&ext, g).unwrap();
        assert!(aut::verify_automorphism(&ext, &aut::Automorphism::Lifted(lift.clone()), 3).is_ok());
        for root in &roots {
            let a = iota(&ExtElement::section(root.clone()));
            assert!(aut::conjugation_identity(&ext, &lift, &a, 3).is_ok());
        }
        // h-type branch through diagonal characters
        let diag = aut::DiagonalAut { char_values: vec![rat(2), rat(3)] };
        assert!(aut::diagonal_conjugation(&ext, &lift, &diag, 3).is_ok());
    }
    // θ is a generator-side element of O(L̂) too
    for root in &roots {
        let a = iota(&ExtElement::section(root.clone()));
        assert!(aut::conjugation_identity(&ext, &th, &a, 3).is_ok());
    }
    // the diagonal generators of O(L̂): λ e^{a_0} λ^{-1} = e^{(λa)_0}
    // (diagonal automorphisms are involutions)
    for lam in aut::hom_l_z2(&ext) {
        let lam = aut::Automorphism::Diagonal(lam);
        for root in &roots {
            let a = iota(&ExtElement::section(root.clone()));
            let lam_a = aut::act_on_state(&ext, &lam, &a);
            for w in 0..=3 {
                for m in basis_of_weight(&ext, w) {
                    let v = UState::from_term(m, rat(1));
                    let pre = aut::act_on_state(&ext, &lam, &v);
                    let lhs = aut::act_on_state(
                        &ext,
                        &lam,
                        &aut::exp_zero_mode(&ext, &a, &pre).unwrap(),
                    );
                    let rhs = aut::exp_zero_mode(&ext, &lam_a, &v).unwrap();
                    assert_eq!(lhs, rhs, "diagonal conjugation identity");
                }
            }
        }
    }
    println!(
        "criterion 7 PASS: rank 2: |O(L)| = 12, |O(L-hat)| = 48, {} generators and theta verified at cutoff 3, conjugation for all {} roots",
        gens.len(),
        roots.len()
    );
}

fn find_generators(group: &[Vec<Vec<i64>>]) -> Vec<Vec<Vec<i64>>> {
    use voa_core::linalg::mat_mul_int;
    let identity = group
        .iter()
        .find(|m| {
            m.iter().enumerate().all(|(i, row)| {
                row.iter().enumerate().all(|(j, &x)| x == i64::from(i == j))
            })
        })
        .unwrap()
        .clone();
    for a in group {
        for b in group {
            let mut span = vec![identity.clone(), a.clone(), b.clone()];
            loop {
                let mut grew = false;
                let snapshot = span.clone();
                for x in &snapshot {
                    for y in &snapshot {
                        let xy = mat_mul_int(x, y);
                        if !span.contains(&xy) {
                            span.push(xy);
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            if span.len() == group.len() {
                return vec![a.clone(), b.clone()];
            }
        }
    }
    group.to_vec()
}

/// Criterion 8: weight-one Lie algebra. dim = d + #roots (3 for rank 1,
/// 8 for A2); antisymmetry and Jacobi on all triples; invariant
/// symmetric form.
#[test]
fn criterion_8_weight_one_lie_algebra() {
    for (ext, dim) in [(a1(), 3usize), (a2(), 8)] {
        let lie = weight_one_lie_algebra(&ext);
        assert_eq!(lie.dim, dim);
        assert_eq!(lie.dim, ext.dim() + lie.root_count);
        let n = lie.dim;
        let bracket = |x: &Vec<Rat>, y: &Vec<Rat>| -> Vec<Rat> {
            let mut out = vec![Rat::zero(); n];
            for i in 0..n {
                for j in 0..n {
                    if x[i].is_zero() || y[j].is_zero() {
                        continue;
                    }
                    for (k, o) in out.iter_mut().enumerate() {
                        *o += &x[i] * &y[j] * &lie.bracket[i][j][k];
                    }
                }
            }
            out
        };
        let unit =
            |i: usize| -> Vec<Rat> { (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect() };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert_eq!(lie.bracket[i][j][k], -lie.bracket[j][i][k].clone());
                    let t1 = bracket(&lie.bracket[i][j], &unit(k));
                    let t2 = bracket(&lie.bracket[j][k], &unit(i));
                    let t3 = bracket(&lie.bracket[k][i], &unit(j));
                    for idx in 0..n {
                        let mut s = t1[idx].clone();
                        s += &t2[idx];
                        s += &t3[idx];
                        assert!(s.is_zero(), "Jacobi at ({i},{j},{k})");
                    }
                    let mut inv = Rat::zero();
                    for (idx, c) in lie.bracket[i][j].iter().enumerate() {
                        inv += c * &lie.form[idx][k];
                    }
                    for (idx, c) in lie.bracket[i][k].iter().enumerate() {
                        inv += c * &lie.form[j][idx];
                    }
                    assert!(inv.is_zero(), "invariance at ({i},{j},{k})");
                }
                assert_eq!(lie.form[i][j], lie.form[j][i]);
            }
        }
        println!(
            "criterion 8 PASS: rank {}: dim g = {}, Jacobi and invariance on all {} triples",
            ext.dim(),
            dim,
            n * n * n
        );
    }
}

/// Criterion 9: constant tables against independent oracles. Δ-series
/// values c_00 = 0, c_10 = c_01 = -1/4, c_11 = 1/16 (plus the
/// exponential-inversion oracle); Schur p_0, p_1, p_2; reduction rows
/// c_{0,0} = -1/2, c_{1,0} = 3/8 against the symbolic recursion oracle.
#[test]
fn criterion_9_constant_tables() {
    let dc = delta_coefficients(5);
    assert_eq!(dc.get(0, 0), &Rat::zero());
    assert_eq!(dc.get(1, 0), &ratq(-1, 4));
    assert_eq!(dc.get(0, 1), &ratq(-1, 4));
    assert_eq!(dc.get(1, 1), &ratq(1, 16));
    // independent Taylor oracle: exp(-c(x,y)) must reproduce
    // (sqrt(1+x) + sqrt(1+y))/2 coefficient by coefficient
    let order = 5usize;
    let n = order + 1;
    let mut s = vec![vec![Rat::zero(); n]; n];
    for (i, row) in s.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            if i + j > 0 {
                *e = -dc.get(i, j).clone();
            }
        }
    }
    let mut exp = vec![vec![Rat::zero(); n]; n];
    exp[0][0] = Rat::one();
    let mut power = exp.clone();
    let mut kfact = Rat::one();
    for k in 1..=(2 * order) {
        let mut next = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if power[i][j].is_zero() {
                    continue;
                }
                for a in 0..n - i {
                    for b in 0..n - j {
                        if !s[a][b].is_zero() {
                            let t = &power[i][j] * &s[a][b];
                            next[i + a][j + b] += t;
                        }
                    }
                }
            }
        }
        power = next;
        kfact *= rat(k as i64);
        for i in 0..n {
            for j in 0..n {
                if !power[i][j].is_zero() {
                    let t = &power[i][j] / &kfact;
                    exp[i][j] += t;
                }
            }
        }
    }
    let half = ratq(1, 2);
    for i in 0..n {
        for j in 0..n {
            let expected = match (i, j) {
                (0, 0) => Rat::one(),
                (_, 0) => binom_rat(&half, i as u64) / rat(2),
                (0, _) => binom_rat(&half, j as u64) / rat(2),
                _ => Rat::zero(),
            };
            assert_eq!(exp[i][j], expected, "Taylor oracle at ({i},{j})");
        }
    }
    // Schur polynomials
    assert_eq!(schur(0), vec![(vec![], Rat::one())]);
    assert_eq!(schur(1), vec![(vec![1], Rat::one())]);
    for (parts, c) in schur(2) {
        assert!(matches!(parts.as_slice(), [2] | [1, 1]));
        assert_eq!(c, ratq(1, 2));
    }
    // reduction rows against the independent elimination oracle
    let rows = c_rows(3, 3);
    assert_eq!(rows[0][0], ratq(-1, 2));
    assert_eq!(rows[1][0], ratq(3, 8));
    let b = |k: u64| binom_rat(&half, k);
    let mut oracle: Vec<Vec<Rat>> = Vec::new();
    for m in 0..=3usize {
        let mut row = vec![Rat::zero(); 4];
        for j in 0..=(3 + m as u64) {
            let coeff = -b(j + 1);
            let shifted = j as i64 - m as i64;
            if shifted >= 0 {
                if (shifted as usize) < 4 {
                    row[shifted as usize] += &coeff;
                }
            } else {
                let lower = (m as i64 - j as i64 - 1) as usize;
                for k in 0..4 {
                    let t = &coeff * &oracle[lower][k];
                    row[k] += t;
                }
            }
        }
        oracle.push(row);
    }
    for m in 0..=3 {
        for j in 0..=3 {
            assert_eq!(rows[m][j], oracle[m][j], "c[{m}][{j}] vs oracle");
        }
    }
    println!("criterion 9 PASS: Delta coefficients, Schur polynomials and reduction rows match their oracles");
}

/// Criterion 10: negative tests fail loudly. A corrupted cocycle breaks
/// the K closure (NotClosed), a corrupted sign map is rejected
/// (LiftInconsistent and an automorphism counterexample), and an odd Gram
/// matrix is rejected with NotEven.
#[test]
fn criterion_10_negative_tests() {
    // corrupted cocycle: flip one off-diagonal entry of the normalized A2
    // table; the commutator identity breaks, so K is not closed
    let g2 = GramMatrix::new(vec![vec![2, -1], vec![-1, 2]]).unwrap();
    let cocycle = build_cocycle(&g2).normalize().unwrap();
    assert_eq!(build_k(&cocycle.corrupted(0, 1), 2).unwrap_err(), ExtensionError::NotClosed);
    // unnormalizable section in rank 1: the standard convention violates
    // the e_{2a} in K requirement until the diagonal twist fixes it
    let g1 = GramMatrix::new(vec![vec![2]]).unwrap();
    assert!(!build_cocycle(&g1).is_normalized(2));

    // corrupted sign map
    let ext = a1();
    let mut lift = aut::theta_aut(&ext);
    lift.sign_overrides.insert(vec![-1], -1);
    assert_eq!(
        aut::verify_lift_multiplicative(&ext, &lift).unwrap_err(),
        aut::AutError::LiftInconsistent
    );
    assert!(matches!(
        aut::verify_automorphism(&ext, &aut::Automorphism::Lifted(lift), 3),
        Err(aut::AutError::Counterexample(_))
    ));

    // odd gram matrix
    assert_eq!(validate(&[vec![1]]), Err(LatticeError::NotEven));
    assert_eq!(
        GramMatrix::new(vec![vec![2, 1], vec![1, 3]]).unwrap_err(),
        LatticeError::NotEven
    );
    println!("criterion 10 PASS: NotClosed, LiftInconsistent, counterexample and NotEven all raised");
}
