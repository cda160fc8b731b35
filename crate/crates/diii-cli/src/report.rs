//! The machine-readable invariant report and its text rendering. Field
//! order is fixed by declaration, so identical inputs serialize to
//! byte-identical files.

use diii_core::invariants::InvariantReport;
use diii_core::toeplitz::KernelWitness;
use diii_core::Z2;
use serde::Serialize;

pub const REPORT_SCHEMA: &str = "diii-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    pub schema: String,
    pub input_digest: String,
    pub space: String,
    pub kind: String,
    pub grid: Vec<usize>,
    pub rank: usize,
    pub invariants: InvariantsSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub toeplitz: Option<ToeplitzSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gerbe: Option<i8>,
    pub diagnostics: DiagnosticsSection,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_1d: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_weak: Option<[i8; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_strong: Option<i8>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToeplitzSection {
    pub index: i8,
    pub kernel_dim: usize,
    pub agree: bool,
    pub bandwidth: usize,
    pub truncation_residual: f64,
    /// The band approximation is trusted only while its error stays below
    /// the unit spectral gap of the symbol.
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<WitnessJson>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    /// One coefficient vector per Fourier mode, starting at mode 0.
    pub modes: Vec<Vec<[f64; 2]>>,
}

impl WitnessJson {
    pub fn from_witness(w: &KernelWitness) -> Self {
        WitnessJson {
            modes: w
                .modes
                .iter()
                .map(|v| (0..v.len()).map(|i| [v[i].re, v[i].im]).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsSection {
    pub unitarity: f64,
    pub sewing: f64,
    pub fixed_point_skewness: f64,
    pub det_invariance: f64,
    pub sign_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

pub fn sign(z: Z2) -> i8 {
    z.as_i8()
}

impl ReportFile {
    pub fn from_invariants(
        digest: String,
        kind: &str,
        grid: Vec<usize>,
        rank: usize,
        rep: &InvariantReport,
        gap: Option<f64>,
    ) -> Self {
        ReportFile {
            schema: REPORT_SCHEMA.into(),
            input_digest: digest,
            space: rep.space.to_string(),
            kind: kind.into(),
            grid,
            rank,
            invariants: InvariantsSection {
                nu_1d: rep.nu_1d.map(sign),
                nu_weak: rep.nu_weak.map(|(a, b)| [sign(a), sign(b)]),
                nu_strong: rep.nu_strong.map(sign),
            },
            toeplitz: None,
            gerbe: None,
            diagnostics: DiagnosticsSection {
                unitarity: rep.diagnostics.unitarity,
                sewing: rep.diagnostics.sewing,
                fixed_point_skewness: rep.diagnostics.fixed_point_skewness,
                det_invariance: rep.diagnostics.det_invariance,
                sign_residual: rep.diagnostics.sign_residual,
                gap,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let fmt_sign = |v: i8| if v > 0 { "+1" } else { "-1" };
        out.push_str(&format!(
            "space: {}  kind: {}  grid: {:?}  rank: {}\n",
            self.space, self.kind, self.grid, self.rank
        ));
        if let Some(nu) = self.invariants.nu_1d {
            out.push_str(&format!("nu_1d      = {}\n", fmt_sign(nu)));
        }
        if let Some([w1, w2]) = self.invariants.nu_weak {
            out.push_str(&format!(
                "nu_weak    = ({}, {})\n",
                fmt_sign(w1),
                fmt_sign(w2)
            ));
        }
        if let Some(s) = self.invariants.nu_strong {
            out.push_str(&format!("nu_strong  = {}\n", fmt_sign(s)));
        }
        if let Some(t) = &self.toeplitz {
            out.push_str(&format!(
                "toeplitz   = {}  (dim Ker = {}, bandwidth {}, truncation {:.3e}, {}, {})\n",
                fmt_sign(t.index),
                t.kernel_dim,
                t.bandwidth,
                t.truncation_residual,
                if t.agree {
                    "agrees with nu"
                } else {
                    "DISAGREES with nu"
                },
                if t.certified {
                    "certified"
                } else {
                    "uncertified"
                },
            ));
            if let Some(ws) = &t.witnesses {
                out.push_str(&format!("  kernel witnesses: {}\n", ws.len()));
            }
        }
        if let Some(g) = self.gerbe {
            out.push_str(&format!("gerbe_sign = {}\n", fmt_sign(g)));
        }
        let d = &self.diagnostics;
        out.push_str(&format!(
            "diagnostics: unitarity {:.3e}  sewing {:.3e}  fp-skewness {:.3e}  det-invariance {:.3e}  sign-residual {:.3e}\n",
            d.unitarity, d.sewing, d.fixed_point_skewness, d.det_invariance, d.sign_residual
        ));
        if let Some(g) = d.gap {
            out.push_str(&format!("gap: {g:.6}\n"));
        }
        out.push_str(&format!("input digest: {}\n", self.input_digest));
        out
    }
}
