//! Conceptual-DFT reactivity descriptors, biodegradability index and the
//! composite eco-design score. Inputs are precomputed descriptors; no
//! electronic-structure code runs here.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Version of the molecule descriptor JSON schema.
pub const DESCRIPTOR_SCHEMA_VERSION: u32 = 1;

/// B_index weights (w₁…w₄).
pub const DEFAULT_B_WEIGHTS: [f64; 4] = [0.3, 0.3, 0.2, 0.2];
/// BDE offset inside the index (kJ/mol).
pub const BDE_REFERENCE_KJ_MOL: f64 = 400.0;
/// Bonds weaker than this are readily cleaved (kJ/mol).
pub const BDE_READILY_CLEAVED_KJ_MOL: f64 = 300.0;
/// f⁻ at a carbonyl carbon above this signals rapid biodegradation.
pub const RAPID_HYDROLYSIS_F_MINUS: f64 = 0.05;

const UNIT_AUDIT: &str = "B_index adds softness (1/eV), mean f- (electrons), ester count and (400 - BDE_min) (kJ/mol) \
with fixed weights; the terms carry different units and the sum is dominated by the BDE term";

/// Precomputed electronic-structure inputs of one molecule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeDescriptors {
    pub name: String,
    #[serde(default)]
    pub homo_ev: Option<f64>,
    #[serde(default)]
    pub lumo_ev: Option<f64>,
    #[serde(default)]
    pub ionization_ev: Option<f64>,
    #[serde(default)]
    pub affinity_ev: Option<f64>,
    /// Atomic populations of the N, N+1 and N−1 electron species.
    #[serde(default)]
    pub populations_n: Option<Vec<f64>>,
    #[serde(default)]
    pub populations_np1: Option<Vec<f64>>,
    #[serde(default)]
    pub populations_nm1: Option<Vec<f64>>,
    /// Atom indices of carbonyl carbons and aromatic carbons.
    #[serde(default)]
    pub carbonyl_atoms: Vec<usize>,
    #[serde(default)]
    pub aromatic_atoms: Vec<usize>,
    pub n_ester: u32,
    pub bde_min_kj_mol: f64,
    /// Site-resolved values when no populations are supplied.
    #[serde(default)]
    pub f_minus_carbonyl: Option<f64>,
    #[serde(default)]
    pub f_plus_aromatic_max: Option<f64>,
    #[serde(default)]
    pub mean_f_minus: Option<f64>,
    /// Published B_index, kept only for comparison.
    #[serde(default)]
    pub reference_b_index: Option<f64>,
}

impl MoleculeDescriptors {
    pub fn validate(&self) -> Result<()> {
        if let (Some(h), Some(l)) = (self.homo_ev, self.lumo_ev) {
            if !(l > h) {
                return invalid(format!("{}: LUMO must lie above HOMO", self.name));
            }
        }
        if !(self.bde_min_kj_mol > 0.0 && self.bde_min_kj_mol.is_finite()) {
            return invalid(format!("{}: BDE_min must be positive", self.name));
        }
        let lens: Vec<usize> = [&self.populations_n, &self.populations_np1, &self.populations_nm1]
            .iter()
            .filter_map(|p| p.as_ref().map(|v| v.len()))
            .collect();
        if lens.windows(2).any(|w| w[0] != w[1]) {
            return invalid(format!("{}: population vectors differ in length", self.name));
        }
        Ok(())
    }

    pub fn fukui(&self) -> Option<Result<CondensedFukui>> {
        match (&self.populations_n, &self.populations_np1, &self.populations_nm1) {
            (Some(n), Some(p), Some(m)) => Some(condensed_fukui(n, p, m)),
            _ => None,
        }
    }
}

/// Per-atom condensed Fukui indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensedFukui {
    pub f_plus: Vec<f64>,
    pub f_minus: Vec<f64>,
    pub f_zero: Vec<f64>,
}

/// f⁺ = p_{N+1} − p_N, f⁻ = p_N − p_{N−1}, f⁰ = (f⁺ + f⁻)/2.
pub fn condensed_fukui(pop_n: &[f64], pop_np1: &[f64], pop_nm1: &[f64]) -> Result<CondensedFukui> {
    if pop_n.len() != pop_np1.len() || pop_n.len() != pop_nm1.len() {
        return invalid("population vectors must have equal length");
    }
    let f_plus: Vec<f64> = pop_np1.iter().zip(pop_n).map(|(a, b)| a - b).collect();
    let f_minus: Vec<f64> = pop_n.iter().zip(pop_nm1).map(|(a, b)| a - b).collect();
    let f_zero = f_plus.iter().zip(&f_minus).map(|(a, b)| (a + b) / 2.0).collect();
    Ok(CondensedFukui { f_plus, f_minus, f_zero })
}

/// Global conceptual-DFT descriptors (eV).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalDescriptors {
    pub mu_ev: f64,
    pub hardness_ev: f64,
    pub softness: f64,
    pub electrophilicity_ev: f64,
    pub nucleophilicity_ev: Option<f64>,
    /// "ionization/affinity" or "koopmans".
    pub source: &'static str,
}

/// μ, η, S and ω = μ²/(2η) from μ and η directly.
pub fn descriptors_from_mu_eta(mu: f64, eta: f64) -> Result<GlobalDescriptors> {
    if !(eta > 0.0) {
        return invalid(format!("hardness must be positive, got {eta}"));
    }
    Ok(GlobalDescriptors {
        mu_ev: mu,
        hardness_ev: eta,
        softness: 1.0 / eta,
        electrophilicity_ev: mu * mu / (2.0 * eta),
        nucleophilicity_ev: None,
        source: "mu/eta",
    })
}

/// Uses (I, A) when both are present, else the Koopmans (HOMO, LUMO) pair.
/// 𝒩 = ε_HOMO − ε_HOMO^ref is reported only when a reference is given.
pub fn global_descriptors(m: &MoleculeDescriptors, homo_reference_ev: Option<f64>) -> Result<GlobalDescriptors> {
    let (mu, eta, source) = match (m.ionization_ev, m.affinity_ev, m.homo_ev, m.lumo_ev) {
        (Some(i), Some(a), _, _) => (-(i + a) / 2.0, (i - a) / 2.0, "ionization/affinity"),
        (_, _, Some(h), Some(l)) => ((h + l) / 2.0, (l - h) / 2.0, "koopmans"),
        _ => return invalid(format!("{}: need (I, A) or (HOMO, LUMO)", m.name)),
    };
    let mut g = descriptors_from_mu_eta(mu, eta)?;
    g.source = source;
    g.nucleophilicity_ev = match (homo_reference_ev, m.homo_ev) {
        (Some(r), Some(h)) => Some(h - r),
        _ => None,
    };
    Ok(g)
}

/// Enzymatic-susceptibility proxies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Susceptibility {
    /// ∝ f⁻(C_carbonyl)·S; `None` without site-resolved data.
    pub hydrolysis_proxy: Option<f64>,
    /// ∝ max f⁺(C_aromatic)·ω.
    pub oxidation_proxy: Option<f64>,
    pub bde_class: String,
    pub flags: Vec<String>,
}

pub fn susceptibility_proxies(
    m: &MoleculeDescriptors,
    fukui: Option<&CondensedFukui>,
    global: &GlobalDescriptors,
) -> Susceptibility {
    let pick_max = |atoms: &[usize], v: &[f64]| atoms.iter().filter_map(|&a| v.get(a).copied()).reduce(f64::max);
    let f_minus_c = fukui.and_then(|f| pick_max(&m.carbonyl_atoms, &f.f_minus)).or(m.f_minus_carbonyl);
    let f_plus_ar = fukui.and_then(|f| pick_max(&m.aromatic_atoms, &f.f_plus)).or(m.f_plus_aromatic_max);
    let mut flags = Vec::new();
    if let Some(f) = f_minus_c {
        if f > RAPID_HYDROLYSIS_F_MINUS {
            flags.push("rapid biodegradation (<1 year)".to_string());
        }
    } else {
        flags.push("hydrolysis proxy unavailable: no carbonyl Fukui data".to_string());
    }
    if f_plus_ar.is_none() {
        flags.push("oxidation proxy unavailable: no aromatic Fukui data".to_string());
    }
    let bde_class = if m.bde_min_kj_mol < BDE_READILY_CLEAVED_KJ_MOL { "readily cleaved" } else { "not readily cleaved" };
    Susceptibility {
        hydrolysis_proxy: f_minus_c.map(|f| f * global.softness),
        oxidation_proxy: f_plus_ar.map(|f| f * global.electrophilicity_ev),
        bde_class: bde_class.to_string(),
        flags,
    }
}

/// Biodegradability classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiodegClass {
    Highly,
    Moderately,
    Slowly,
    Recalcitrant,
}

impl BiodegClass {
    pub fn label(&self) -> &'static str {
        match self {
            BiodegClass::Highly => "highly biodegradable (<6 months)",
            BiodegClass::Moderately => "moderately biodegradable (6–18 months)",
            BiodegClass::Slowly => "slowly biodegradable (1.5–5 years)",
            BiodegClass::Recalcitrant => "recalcitrant (>5 years)",
        }
    }
}

/// Bands closed on their lower bound: [70, ∞), [50, 70), [30, 50), (−∞, 30).
pub fn classify_b_index(score: f64) -> BiodegClass {
    if score >= 70.0 {
        BiodegClass::Highly
    } else if score >= 50.0 {
        BiodegClass::Moderately
    } else if score >= 30.0 {
        BiodegClass::Slowly
    } else {
        BiodegClass::Recalcitrant
    }
}

/// w₁S + w₂⟨f⁻⟩ + w₃N_ester + w₄(400 − BDE_min). BDE_min above 400 kJ/mol
/// makes the last term negative, which is kept.
pub fn b_index_from_parts(softness: f64, mean_f_minus: f64, n_ester: f64, bde_min: f64, w: [f64; 4]) -> (f64, BiodegClass) {
    let s = w[0] * softness + w[1] * mean_f_minus + w[2] * n_ester + w[3] * (BDE_REFERENCE_KJ_MOL - bde_min);
    (s, classify_b_index(s))
}

/// B_index of a molecule; needs S (from global descriptors) and ⟨f⁻⟩.
pub fn b_index(m: &MoleculeDescriptors, weights: [f64; 4]) -> Result<(f64, BiodegClass)> {
    m.validate()?;
    let g = global_descriptors(m, None)?;
    let mean_f = mean_f_minus(m)?.ok_or_else(|| Error::Unavailable(format!("{}: no <f-> available", m.name)))?;
    Ok(b_index_from_parts(g.softness, mean_f, m.n_ester as f64, m.bde_min_kj_mol, weights))
}

fn mean_f_minus(m: &MoleculeDescriptors) -> Result<Option<f64>> {
    if let Some(f) = m.fukui() {
        let f = f?;
        if !f.f_minus.is_empty() {
            return Ok(Some(f.f_minus.iter().sum::<f64>() / f.f_minus.len() as f64));
        }
    }
    Ok(m.mean_f_minus)
}

/// 0.4·η_biodeg + 0.3·η_PCE + 0.3·η_LCA on already-normalized inputs.
pub fn eco_score(eta_biodeg: f64, eta_pce: f64, eta_lca: f64) -> Result<f64> {
    if [eta_biodeg, eta_pce, eta_lca].iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
        return invalid("eco-score inputs must be finite and >= 0");
    }
    Ok(0.4 * eta_biodeg + 0.3 * eta_pce + 0.3 * eta_lca)
}

/// Normalization constants turning raw quantities into η factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcoNormalization {
    /// η_biodeg = B_index / b_index_ref.
    pub b_index_ref: f64,
    /// η_PCE = PCE / pce_ref.
    pub pce_ref: f64,
    /// η_LCA = lca_score / lca_ref.
    pub lca_ref: f64,
}

/// Everything derived for one molecule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactivityReport {
    pub name: String,
    pub mu_ev: f64,
    pub hardness_ev: f64,
    pub softness: f64,
    pub electrophilicity_ev: f64,
    pub nucleophilicity_ev: Option<f64>,
    pub descriptor_source: String,
    pub mean_f_minus: Option<f64>,
    pub fukui: Option<CondensedFukui>,
    pub hydrolysis_proxy: Option<f64>,
    pub oxidation_proxy: Option<f64>,
    pub bde_class: String,
    pub b_index: Option<f64>,
    pub classification: Option<String>,
    pub eco_score: Option<f64>,
    pub eta_biodeg: Option<f64>,
    pub eta_pce: Option<f64>,
    pub eta_lca: Option<f64>,
    pub flags: Vec<String>,
    pub annotations: Vec<String>,
    pub unit_audit: String,
}

/// Inputs of the eco-score beyond the descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EcoInputs {
    pub pce: Option<f64>,
    pub lca_score: Option<f64>,
    pub normalization: Option<EcoNormalization>,
}

pub fn reactivity_report(
    m: &MoleculeDescriptors,
    homo_reference_ev: Option<f64>,
    weights: [f64; 4],
    eco: &EcoInputs,
) -> Result<ReactivityReport> {
    m.validate()?;
    let g = global_descriptors(m, homo_reference_ev)?;
    let fukui = m.fukui().transpose()?;
    let sus = susceptibility_proxies(m, fukui.as_ref(), &g);
    let mean_f = mean_f_minus(m)?;
    let mut flags = sus.flags.clone();
    let mut annotations = Vec::new();
    let (b, class) = match mean_f {
        Some(f) => {
            let (b, c) = b_index_from_parts(g.softness, f, m.n_ester as f64, m.bde_min_kj_mol, weights);
            (Some(b), Some(c.label().to_string()))
        }
        None => {
            flags.push("B_index unavailable: no <f-> data".into());
            (None, None)
        }
    };
    if let (Some(b), Some(r)) = (b, m.reference_b_index) {
        if (b - r).abs() > 0.05 * r.abs().max(1.0) {
            annotations.push(format!("unreconciled vs paper {r}: literal formula gives {b:.2}"));
        }
    }
    let (mut eco_v, mut eb, mut ep, mut el) = (None, None, None, None);
    match (eco.normalization, b, eco.pce, eco.lca_score) {
        (Some(n), Some(b), Some(p), Some(l)) => {
            if !(n.b_index_ref > 0.0 && n.pce_ref > 0.0 && n.lca_ref > 0.0) {
                return invalid("eco normalization constants must be positive");
            }
            let (x, y, z) = (b / n.b_index_ref, p / n.pce_ref, l / n.lca_ref);
            eco_v = Some(eco_score(x.max(0.0), y, z)?);
            eb = Some(x);
            ep = Some(y);
            el = Some(z);
        }
        (None, _, _, _) => flags.push("eco score not computed: normalization constants not supplied".into()),
        _ => flags.push("eco score not computed: B_index, PCE or LCA score missing".into()),
    }
    if homo_reference_ev.is_none() {
        flags.push("nucleophilicity not computed: no reference HOMO supplied".into());
    }
    Ok(ReactivityReport {
        name: m.name.clone(),
        mu_ev: g.mu_ev,
        hardness_ev: g.hardness_ev,
        softness: g.softness,
        electrophilicity_ev: g.electrophilicity_ev,
        nucleophilicity_ev: g.nucleophilicity_ev,
        descriptor_source: g.source.to_string(),
        mean_f_minus: mean_f,
        fukui,
        hydrolysis_proxy: sus.hydrolysis_proxy,
        oxidation_proxy: sus.oxidation_proxy,
        bde_class: sus.bde_class,
        b_index: b,
        classification: class,
        eco_score: eco_v,
        eta_biodeg: eb,
        eta_pce: ep,
        eta_lca: el,
        flags,
        annotations,
        unit_audit: UNIT_AUDIT.to_string(),
    })
}

impl ReactivityReport {
    /// Fixed-width text rendering.
    pub fn to_table(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "n/a".into());
        let mut s = format!("molecule: {}\n", self.name);
        for (k, v) in [
            ("mu (eV)", format!("{:.4}", self.mu_ev)),
            ("hardness (eV)", format!("{:.4}", self.hardness_ev)),
            ("softness (1/eV)", format!("{:.4}", self.softness)),
            ("electrophilicity (eV)", format!("{:.4}", self.electrophilicity_ev)),
            ("nucleophilicity (eV)", opt(self.nucleophilicity_ev)),
            ("<f->", opt(self.mean_f_minus)),
            ("hydrolysis proxy", opt(self.hydrolysis_proxy)),
            ("oxidation proxy", opt(self.oxidation_proxy)),
            ("BDE class", self.bde_class.clone()),
            ("B_index", opt(self.b_index)),
            ("class", self.classification.clone().unwrap_or_else(|| "n/a".into())),
            ("eco score", opt(self.eco_score)),
        ] {
            s.push_str(&format!("  {k:<24}{v}\n"));
        }
        for f in self.flags.iter().chain(&self.annotations) {
            s.push_str(&format!("  note: {f}\n"));
        }
        s.push_str(&format!("  units: {}\n", self.unit_audit));
        s
    }
}

/// Molecule A and B as described in the source study (B lacks the
/// descriptors needed for a B_index).
pub fn reference_molecules() -> Vec<MoleculeDescriptors> {
    let base = MoleculeDescriptors {
        name: String::new(),
        homo_ev: None,
        lumo_ev: None,
        ionization_ev: None,
        affinity_ev: None,
        populations_n: None,
        populations_np1: None,
        populations_nm1: None,
        carbonyl_atoms: Vec::new(),
        aromatic_atoms: Vec::new(),
        n_ester: 0,
        bde_min_kj_mol: 400.0,
        f_minus_carbonyl: None,
        f_plus_aromatic_max: None,
        mean_f_minus: None,
        reference_b_index: None,
    };
    vec![
        MoleculeDescriptors {
            name: "molecule_a_pm6_derivative".into(),
            ionization_ev: Some(5.40),
            affinity_ev: Some(3.20),
            n_ester: 4,
            bde_min_kj_mol: 285.0,
            f_minus_carbonyl: Some(0.08),
            mean_f_minus: Some(0.05),
            reference_b_index: Some(101.5),
            ..base.clone()
        },
        MoleculeDescriptors {
            name: "molecule_b_y6bo_derivative".into(),
            n_ester: 2,
            bde_min_kj_mol: 310.0,
            reference_b_index: Some(58.0),
            ..base
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_boundaries_are_closed_below() {
        assert_eq!(classify_b_index(70.0), BiodegClass::Highly);
        assert_eq!(classify_b_index(69.999), BiodegClass::Moderately);
        assert_eq!(classify_b_index(50.0), BiodegClass::Moderately);
        assert_eq!(classify_b_index(30.0), BiodegClass::Slowly);
        assert_eq!(classify_b_index(29.9), BiodegClass::Recalcitrant);
    }

    #[test]
    fn missing_normalization_blocks_eco_score() {
        let a = &reference_molecules()[0];
        let r = reactivity_report(a, None, DEFAULT_B_WEIGHTS, &EcoInputs { pce: Some(0.18), lca_score: Some(1.0), normalization: None })
            .unwrap();
        assert!(r.eco_score.is_none());
        assert!(r.annotations.iter().any(|a| a.contains("unreconciled vs paper 101.5")));
    }
}
