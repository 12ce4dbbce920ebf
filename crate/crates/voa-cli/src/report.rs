//! Machine-readable report schemas. Scalars are serialized as exact
//! `p/q` strings (Gaussian rationals as `p/q+r/s*i`), so reports are
//! byte-for-byte deterministic given (input, cutoff, seed).

use serde::Serialize;

use voa_core::extension::{Extension, GMatrix};
use voa_core::scalar::{rat_string, GaussRat, Rat};
use voa_core::zhu::{RationalityCertificate, ZhuStructure};

pub const SCHEMA_VERSION: u32 = 1;

pub fn rat_str(x: &Rat) -> String {
    rat_string(x)
}

pub fn gauss_str(x: &GaussRat) -> String {
    format!("{x}")
}

pub fn gmatrix_strings(m: &GMatrix) -> Vec<Vec<String>> {
    m.iter().map(|row| row.iter().map(gauss_str).collect()).collect()
}

#[derive(Serialize)]
pub struct RunMeta {
    pub schema_version: u32,
    pub command: String,
    pub lattice_name: String,
    pub cutoff: i64,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct LatticeReport {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub dim: usize,
    pub gram: Vec<Vec<i64>>,
    pub coset_reps: Vec<Vec<i64>>,
    pub coset_count: usize,
    pub r_basis: Vec<Vec<i64>>,
    pub r_mod_2l_count: usize,
    pub r_rep_indices: Vec<usize>,
    pub norm2_vector_count: usize,
    pub norm2_vectors: Vec<Vec<i64>>,
    pub isometry_group_order: usize,
    pub isometry_generators_shown: usize,
    pub isometries: Vec<Vec<Vec<i64>>>,
}

#[derive(Serialize)]
pub struct CharacterReport {
    /// values on R̂/K element ids, as (id, value) pairs
    pub values: Vec<(usize, String)>,
}

#[derive(Serialize)]
pub struct ModuleReport {
    pub dim: usize,
    pub character: CharacterReport,
    /// action matrix per group-element id
    pub action: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize)]
pub struct QuotientElement {
    pub id: usize,
    pub sign: i8,
    pub rep_index: usize,
}

#[derive(Serialize)]
pub struct ExtensionReport {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub quotient_order: usize,
    /// element ids decoded as (sign ±1, coset representative index)
    pub elements: Vec<QuotientElement>,
    pub center_ids: Vec<usize>,
    /// multiplication table as element ids: table[a][b] = a*b
    pub quotient_table: Vec<Vec<usize>>,
    pub character_count: usize,
    pub characters: Vec<CharacterReport>,
    pub modules: Vec<ModuleReport>,
    pub sum_dim_squares: usize,
}

#[derive(Serialize)]
pub struct TwistedReport {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub normalization: String,
    pub top_weight: String,
    pub modules: Vec<TwistedModuleReport>,
}

#[derive(Serialize)]
pub struct TwistedModuleReport {
    pub dim: usize,
    /// o(u_{β_i}) per coset representative
    pub top_level_u_matrices: Vec<Vec<Vec<String>>>,
    pub omega_matrix: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct ZhuReport {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub dim: usize,
    /// table[i][j] = coefficients of reduce(u_i ∗ u_j) over {ι(e_β)}
    pub table: Vec<Vec<Vec<String>>>,
    pub center_reps: Vec<usize>,
    pub iso_group_algebra: bool,
    pub associative: bool,
    pub normalization: String,
    pub rationality_certificate: CertificateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<String>>,
}

#[derive(Serialize)]
pub struct CertificateReport {
    pub dim_a_theta: usize,
    pub trace_form_det: String,
    pub semisimple: bool,
    pub module_count: usize,
    pub sum_dim_squares: usize,
    pub top_weight: String,
    pub same_constant_on_all_modules: bool,
}

impl CertificateReport {
    pub fn from_certificate(c: &RationalityCertificate) -> Self {
        CertificateReport {
            dim_a_theta: c.dim_a_theta,
            trace_form_det: rat_str(&c.trace_form_det),
            semisimple: c.semisimple,
            module_count: c.module_count,
            sum_dim_squares: c.sum_dim_squares,
            top_weight: rat_str(&c.top_weight),
            same_constant_on_all_modules: c.same_constant_on_all_modules,
        }
    }
}

pub fn zhu_table_strings(zs: &ZhuStructure) -> Vec<Vec<Vec<String>>> {
    zs.table
        .iter()
        .map(|row| row.iter().map(|z| z.coeffs.iter().map(rat_str).collect()).collect())
        .collect()
}

#[derive(Serialize)]
pub struct AutReportJson {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub o_l_order: usize,
    pub hom_l_z2_count: usize,
    pub o_lhat_order: usize,
    pub weight_one_dim: usize,
    pub root_count: usize,
    pub theta_verified_at_cutoff: i64,
    pub lifted_isometries_verified: usize,
    pub conjugation_identity_checked: usize,
    pub hom_in_n_intersection: bool,
    pub statement: String,
}

#[derive(Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

#[derive(Serialize)]
pub struct VerifyReport {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub checks: Vec<CheckResult>,
    pub failed: usize,
}

#[derive(Serialize)]
pub struct AllReport {
    #[serde(flatten)]
    pub meta: RunMeta,
    pub lattice: LatticeReport,
    pub extension: ExtensionReport,
    pub twisted: TwistedReport,
    pub zhu: ZhuReport,
    pub aut: AutReportJson,
}

/// Serialized monomial for counterexample reporting: modes as
/// `[basis, n_num, n_den]` triples plus the label.
pub fn monomial_json(m: &voa_core::fock::Monomial<Vec<i64>>) -> serde_json::Value {
    let modes: Vec<serde_json::Value> = m
        .modes
        .iter()
        .map(|&(i, n2)| {
            let (num, den) = if n2 % 2 == 0 { (n2 as i64 / 2, 1) } else { (n2 as i64, 2) };
            serde_json::json!([i, num, den])
        })
        .collect();
    serde_json::json!({ "modes": modes, "label": m.label })
}

pub fn character_report(ext: &Extension, chi: &voa_core::extension::CentralCharacter) -> CharacterReport {
    let _ = ext;
    CharacterReport {
        values: chi.values.iter().map(|(id, v)| (*id, gauss_str(v))).collect(),
    }
}
