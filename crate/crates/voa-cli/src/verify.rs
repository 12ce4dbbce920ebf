//! The `verify` battery: runs the cross-module invariants on one lattice
//! with a recorded seed and cutoff, one pass/fail entry per check.

use voa_core::extension::{build_cocycle, build_k, ExtElement, Extension};
use voa_core::fock::{delta_coefficients, iota, schur, UState};
use voa_core::rng::XorShift;
use voa_core::scalar::{rat, ratq, GaussRat};
use voa_core::twisted::{
    calibrate_normalization, class_top_matrices, o_value_matrices, top_level_matrices,
};
use voa_core::voa::{basis_of_weight, general_mode, sample_state, weight_one_lie_algebra};
use voa_core::zhu::{
    check_associativity, check_group_algebra_iso, circle_product, reduce,
    semisimplicity_and_rationality, zhu_structure,
};
use voa_core::{aut, GramMatrix};

use crate::report::CheckResult;

pub fn run_verify(gram: &GramMatrix, cutoff: i64, seed: u64) -> Vec<CheckResult> {
    let ext = match Extension::new(gram.clone()) {
        Ok(e) => e,
        Err(e) => {
            return vec![CheckResult {
                name: "extension_construction".into(),
                pass: false,
                details: format!("{e}"),
            }]
        }
    };
    let mut results = Vec::new();
    let mut check = |name: &str, outcome: Result<String, String>| {
        let (pass, details) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        results.push(CheckResult { name: name.to_string(), pass, details });
    };

    check("cocycle_identities", cocycle_identities(&ext));
    check("theta_involution", theta_involution(&ext, seed));
    check("k_subgroup", k_subgroup(&ext));
    check("quotient_group_axioms", quotient_axioms(&ext));
    check("central_characters", central_characters_check(&ext));
    check("irreducible_modules", modules_check(&ext));
    check("constant_tables", constants_check());
    check("heisenberg_commutator", heisenberg_commutator(&ext, seed));
    check("weight_bookkeeping", weight_bookkeeping(&ext, seed, cutoff.min(3)));
    check("borcherds_commutator", borcherds(&ext, seed));
    check("weight_one_lie_algebra", lie_algebra_check(&ext));
    check("normalization_calibration", calibration_check(&ext));
    check("o_theta_kill", o_theta_kill(&ext, seed));
    check("dual_path_oracle", dual_path(&ext, seed, 25));
    check("zhu_structure", zhu_check(&ext));
    check("reduce_determinism", reduce_determinism(&ext, seed));
    check("automorphisms", aut_check(&ext, cutoff.min(3)));
    check("negative_controls", negative_controls(&ext));
    results
}

fn cocycle_identities(ext: &Extension) -> Result<String, String> {
    let g = &ext.gram;
    let d = ext.dim();
    let mut coords = vec![-2i64; 2 * d];
    let mut n = 0usize;
    loop {
        let x: Vec<i64> = coords[..d].to_vec();
        let y: Vec<i64> = coords[d..].to_vec();
        let comm = ext.eps(&x, &y) * ext.eps(&y, &x);
        let expect = if g.ip(&x, &y).rem_euclid(2) == 0 { 1 } else { -1 };
        if comm != expect {
            return Err(format!("commutator identity fails at {x:?}, {y:?}"));
        }
        if ext.cocycle.k_sign(&x) != 1 {
            return Err(format!("lift of 2·{x:?} is not in K"));
        }
        n += 1;
        let mut i = 0;
        loop {
            if i == 2 * d {
                return Ok(format!("checked {n} pairs on the window"));
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

fn theta_involution(ext: &Extension, seed: u64) -> Result<String, String> {
    let mut rng = XorShift::new(seed ^ 0x7e7a);
    for _ in 0..100 {
        let v: Vec<i64> = (0..ext.dim()).map(|_| rng.range_i64(-3, 3)).collect();
        let w: Vec<i64> = (0..ext.dim()).map(|_| rng.range_i64(-3, 3)).collect();
        let a = ExtElement { sign: if rng.below(2) == 0 { 1 } else { -1 }, vec: v };
        let b = ExtElement::section(w);
        if ext.theta_ext(&ext.theta_ext(&a)) != a {
            return Err(format!("θ² != id at {a:?}"));
        }
        let lhs = ext.theta_ext(&a.mul(&b, &ext.cocycle));
        let rhs = ext.theta_ext(&a).mul(&ext.theta_ext(&b), &ext.cocycle);
        if lhs != rhs {
            return Err(format!("θ(ab) != θ(a)θ(b) at {a:?}, {b:?}"));
        }
    }
    Ok("involution and automorphism on 100 random elements".into())
}

fn k_subgroup(ext: &Extension) -> Result<String, String> {
    match build_k(&ext.cocycle, 2) {
        Ok(k) => {
            if k.signs.values().all(|&s| s == 1) {
                Ok(format!("window of {} vectors, all lifts of 2L in K", k.signs.len()))
            } else {
                Err("normalized section must give +1 signs".into())
            }
        }
        Err(e) => Err(format!("{e}")),
    }
}

fn quotient_axioms(ext: &Extension) -> Result<String, String> {
    let q = &ext.quotient;
    if q.order != 2 << ext.dim() {
        return Err(format!("order {} != 2^(d+1)", q.order));
    }
    let expected: Vec<usize> = {
        let mut ids: Vec<usize> =
            ext.r.rep_indices.iter().flat_map(|&i| [2 * i, 2 * i + 1]).collect();
        ids.sort_unstable();
        ids
    };
    if q.center != expected {
        return Err("center differs from the R/2L lifts".into());
    }
    Ok(format!("group of order {}, center of order {}", q.order, q.center.len()))
}

fn central_characters_check(ext: &Extension) -> Result<String, String> {
    let want = ext.r.rep_indices.len();
    if ext.characters.len() != want {
        return Err(format!("{} characters, expected |R/2L| = {want}", ext.characters.len()));
    }
    for chi in &ext.characters {
        if chi.value(1) != &GaussRat::from_int(-1) {
            return Err("χ(-1) != -1".into());
        }
    }
    Ok(format!("{want} characters, all with χ(-1) = -1"))
}

fn modules_check(ext: &Extension) -> Result<String, String> {
    let total: usize = ext.modules.iter().map(|m| m.dim * m.dim).sum();
    if total != 1 << ext.dim() {
        return Err(format!("Σ dim² = {total} != 2^d"));
    }
    let a = ExtElement::section({
        let mut v = vec![0i64; ext.dim()];
        v[0] = 1;
        v
    });
    for m in &ext.modules {
        let ta = ext.theta_ext(&a);
        if m.matrix(ext.class_of(&ta)) != m.matrix(ext.class_of(&a)) {
            return Err("θ(a) acts differently from a".into());
        }
    }
    Ok(format!("{} modules, Σ dim² = {total}", ext.modules.len()))
}

fn constants_check() -> Result<String, String> {
    if schur(0) != vec![(vec![], rat(1))] || schur(1) != vec![(vec![1], rat(1))] {
        return Err("p_0 or p_1 wrong".into());
    }
    for (parts, c) in schur(2) {
        let ok = matches!(parts.as_slice(), [2] | [1, 1]) && c == ratq(1, 2);
        if !ok {
            return Err("p_2 wrong".into());
        }
    }
    let dc = delta_coefficients(2);
    if dc.get(0, 0) != &rat(0) || dc.get(1, 0) != &ratq(-1, 4) || dc.get(1, 1) != &ratq(1, 16)
    {
        return Err("Δ coefficients wrong".into());
    }
    let rows = voa_core::zhu::c_rows(1, 1);
    if rows[0][0] != ratq(-1, 2) || rows[1][0] != ratq(3, 8) {
        return Err("reduction rows wrong".into());
    }
    Ok("p_r, c_mn, c_{m,j} frozen values reproduced".into())
}

fn heisenberg_commutator(ext: &Extension, seed: u64) -> Result<String, String> {
    let g = &ext.gram;
    let mut rng = XorShift::new(seed ^ 0x4a5a);
    for _ in 0..60 {
        let v: Vec<i64> = (0..ext.dim()).map(|_| rng.range_i64(-2, 2)).collect();
        let w: Vec<i64> = (0..ext.dim()).map(|_| rng.range_i64(-2, 2)).collect();
        let m = rng.range_i64(1, 2) * if rng.below(2) == 0 { 1 } else { -1 };
        let n = -m;
        let s = sample_state(ext, &mut rng, 2, 1);
        let ap = |x: &[i64], k: i64, st: &UState| {
            voa_core::fock::heisenberg_act(g, x, 2 * k as i32, st).unwrap()
        };
        let mut comm = ap(&v, m, &ap(&w, n, &s));
        comm.sub_assign(&ap(&w, n, &ap(&v, m, &s)));
        let expect = s.scale_rat(&(rat(m) * rat(g.ip(&v, &w))));
        if comm != expect {
            return Err(format!("commutator fails at v={v:?}, w={w:?}, m={m}"));
        }
    }
    Ok("60 random commutators".into())
}

fn weight_bookkeeping(ext: &Extension, seed: u64, wmax: i64) -> Result<String, String> {
    let mut rng = XorShift::new(seed ^ 0x33);
    let mut checked = 0;
    while checked < 30 {
        let wu = rng.range_i64(1, wmax);
        let wv = rng.range_i64(0, wmax);
        let bu = basis_of_weight(ext, wu);
        let bv = basis_of_weight(ext, wv);
        let u = UState::from_term(bu[rng.below(bu.len() as u64) as usize].clone(), rat(1));
        let v = UState::from_term(bv[rng.below(bv.len() as u64) as usize].clone(), rat(1));
        let n = rng.range_i64(-2, wu + wv);
        let uv = general_mode(ext, &u, n, &v);
        if uv.is_zero() {
            continue;
        }
        if uv.weight(&ext.gram) != Ok(rat(wu + wv - n - 1)) {
            return Err(format!("wt(u_n v) wrong at n={n}"));
        }
        checked += 1;
    }
    Ok("30 graded products".into())
}

fn borcherds(ext: &Extension, seed: u64) -> Result<String, String> {
    let mut rng = XorShift::new(seed ^ 0xb0c);
    for _ in 0..8 {
        let pick = |lo: i64, hi: i64, rng: &mut XorShift| {
            let w = rng.range_i64(lo, hi);
            let b = basis_of_weight(ext, w);
            UState::from_term(b[rng.below(b.len() as u64) as usize].clone(), rat(1))
        };
        let u = pick(1, 2, &mut rng);
        let v = pick(1, 2, &mut rng);
        let w = pick(0, 1, &mut rng);
        let m = rng.range_i64(-1, 2);
        let n = rng.range_i64(-1, 2);
        let mut lhs = general_mode(ext, &u, m, &general_mode(ext, &v, n, &w));
        lhs.sub_assign(&general_mode(ext, &v, n, &general_mode(ext, &u, m, &w)));
        let mut rhs = UState::zero();
        for i in 0..=4 {
            let uv = general_mode(ext, &u, i, &v);
            if uv.is_zero() {
                continue;
            }
            rhs.add_scaled(
                &general_mode(ext, &uv, m + n - i, &w),
                &voa_core::scalar::binom_int(m, i as u64),
            );
        }
        if lhs != rhs {
            return Err(format!("commutator identity fails at m={m}, n={n}"));
        }
    }
    Ok("8 random Borcherds commutators".into())
}

fn lie_algebra_check(ext: &Extension) -> Result<String, String> {
    let lie = weight_one_lie_algebra(ext);
    let n = lie.dim;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if lie.bracket[i][j][k] != -lie.bracket[j][i][k].clone() {
                    return Err("bracket not antisymmetric".into());
                }
            }
            if lie.form[i][j] != lie.form[j][i] {
                return Err("form not symmetric".into());
            }
        }
    }
    Ok(format!("dim {} = rank + {} roots", n, lie.root_count))
}

fn calibration_check(ext: &Extension) -> Result<String, String> {
    match calibrate_normalization(ext) {
        Ok(n) => Ok(format!("selected {n}")),
        Err(e) => Err(format!("{e}")),
    }
}

fn o_theta_kill(ext: &Extension, seed: u64) -> Result<String, String> {
    let mut rng = XorShift::new(seed ^ 0x0c);
    let norm = calibrate_normalization(ext).map_err(|e| format!("{e}"))?;
    let mut tested = 0;
    while tested < 20 {
        // homogeneous basis monomials keep the circle product defined
        let wu = rng.range_i64(1, 2);
        let wv = rng.range_i64(0, 2);
        let bu = basis_of_weight(ext, wu);
        let bv = basis_of_weight(ext, wv);
        let u = UState::from_term(bu[rng.below(bu.len() as u64) as usize].clone(), rat(1));
        let v = UState::from_term(bv[rng.below(bv.len() as u64) as usize].clone(), rat(1));
        let gen = circle_product(ext, &u, &v).map_err(|e| format!("{e}"))?;
        if gen.is_zero() {
            continue;
        }
        let (z, _) = reduce(ext, &gen).map_err(|e| format!("{e}"))?;
        if !z.is_zero() {
            return Err("circle product does not reduce to zero".into());
        }
        // evaluation on every top level must vanish as well
        for m in o_value_matrices(ext, norm, &gen).map_err(|e| format!("{e}"))? {
            if m.iter().flatten().any(|x| !x.is_zero()) {
                return Err("circle product acts nontrivially on a top level".into());
            }
        }
        tested += 1;
    }
    Ok("20 circle-product generators annihilated on both paths".into())
}

fn dual_path(ext: &Extension, seed: u64, count: usize) -> Result<String, String> {
    let norm = calibrate_normalization(ext).map_err(|e| format!("{e}"))?;
    let mut rng = XorShift::new(seed ^ 0xd0a1);
    for _ in 0..count {
        let w = rng.range_i64(0, 4);
        let b = basis_of_weight(ext, w);
        let state = UState::from_term(b[rng.below(b.len() as u64) as usize].clone(), ratq(3, 2));
        let (z, _) = reduce(ext, &state).map_err(|e| format!("{e}"))?;
        let via_class = class_top_matrices(ext, norm, &z).map_err(|e| format!("{e}"))?;
        let direct = top_level_matrices(ext, norm, &state).map_err(|e| format!("{e}"))?;
        if via_class != direct {
            return Err(format!("dual path disagrees on {state:?}"));
        }
    }
    Ok(format!("{count} states agree on both paths"))
}

fn zhu_check(ext: &Extension) -> Result<String, String> {
    let zs = zhu_structure(ext).map_err(|e| format!("{e}"))?;
    let iso = check_group_algebra_iso(ext, &zs).map_err(|e| format!("{e}"))?;
    if !iso.is_isomorphic {
        return Err(format!("not isomorphic to the group algebra at {:?}", iso.mismatch));
    }
    if !check_associativity(ext, &zs) {
        return Err("table not associative".into());
    }
    let norm = calibrate_normalization(ext).map_err(|e| format!("{e}"))?;
    let cert = semisimplicity_and_rationality(ext, &zs, norm).map_err(|e| format!("{e}"))?;
    Ok(format!(
        "dim {}, isomorphic to C[L-hat/K]/I, semisimple, top weight {}",
        zs.dim,
        crate::report::rat_str(&cert.top_weight)
    ))
}

fn reduce_determinism(ext: &Extension, seed: u64) -> Result<String, String> {
    let mut rng = XorShift::new(seed ^ 0xde7);
    for _ in 0..5 {
        let state = sample_state(ext, &mut rng, 3, 2);
        let (z1, t1) = reduce(ext, &state).map_err(|e| format!("{e}"))?;
        let (z2, t2) = reduce(ext, &state).map_err(|e| format!("{e}"))?;
        if z1 != z2 || t1 != t2 {
            return Err("reduction trace is not deterministic".into());
        }
    }
    Ok("5 reductions replayed identically".into())
}

fn aut_check(ext: &Extension, cutoff: i64) -> Result<String, String> {
    let th = aut::theta_aut(ext);
    aut::verify_lift_multiplicative(ext, &th).map_err(|e| format!("{e}"))?;
    aut::verify_automorphism(ext, &aut::Automorphism::Lifted(th.clone()), cutoff)
        .map_err(|e| format!("θ: {}", describe_aut_error(&e)))?;
    let group = voa_core::lattice::isometry_group(&ext.gram);
    let identity: Vec<Vec<i64>> = (0..ext.dim())
        .map(|i| (0..ext.dim()).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut verified = 1;
    if let Some(sigma) = group.iter().find(|m| **m != identity) {
        let lift = aut::lift_isometry(ext, sigma).map_err(|e| format!("{e}"))?;
        aut::verify_automorphism(ext, &aut::Automorphism::Lifted(lift.clone()), cutoff.min(2))
            .map_err(|e| format!("lift: {e}"))?;
        let roots = voa_core::lattice::short_vectors(&ext.gram, 2);
        if let Some(r) = roots.first() {
            let a = iota(&ExtElement::section(r.clone()));
            aut::conjugation_identity(ext, &lift, &a, cutoff.min(2))
                .map_err(|e| format!("conjugation: {e}"))?;
        }
        verified += 1;
    }
    Ok(format!("θ and {verified} automorphisms verified at cutoff {cutoff}"))
}

/// Counterexamples carry the violated triple; serialize the monomials in
/// the report's state format.
fn describe_aut_error(e: &aut::AutError) -> String {
    match e {
        aut::AutError::Counterexample(c) => format!(
            "counterexample u={}, n={}, v={}",
            crate::report::monomial_json(&c.u),
            c.n,
            crate::report::monomial_json(&c.v)
        ),
        other => format!("{other}"),
    }
}

fn negative_controls(ext: &Extension) -> Result<String, String> {
    // corrupted cocycle must fail loudly: an off-diagonal flip breaks the
    // commutator identity, so K stops being closed; in rank 1 the only
    // corruption a bilinear table admits is the diagonal, which instead
    // violates the section normalization
    let good = build_cocycle(&ext.gram).normalize().map_err(|e| format!("{e}"))?;
    if ext.dim() >= 2 {
        if build_k(&good.corrupted(0, 1), 2).is_ok() {
            return Err("corrupted cocycle not caught by NotClosed".into());
        }
    } else if good.corrupted(0, 0).is_normalized(2) {
        return Err("corrupted diagonal not caught by the section check".into());
    }
    // corrupted sign map must fail multiplicativity
    let mut th = aut::theta_aut(ext);
    let mut bad = vec![0i64; ext.dim()];
    bad[0] = -1;
    th.sign_overrides.insert(bad, -1);
    if aut::verify_lift_multiplicative(ext, &th).is_ok() {
        return Err("corrupted sign map not caught by LiftInconsistent".into());
    }
    Ok("corrupted cocycle and sign map both fail loudly".into())
}
