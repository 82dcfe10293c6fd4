//! Coefficient file formats, ingestion of externally computed data, and
//! reproducible experiment reports.
//!
//! Rational entries are stored as strings ("a/b" or a plain integer) so the
//! interchange format never loses precision; decimal entries are accepted
//! for external data and load as approximate values. Reports serialize with
//! a fixed field order, sorted maps and 12-significant-digit floats, so two
//! runs of the same experiment differ only in the runtime field.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use serde::{Deserialize, Serialize};

use crate::characters::{character_from_exponents, DirichletCharacter};
use crate::hecke::{CoefficientValue, GaussianRational, NewformData, ValidationIssue};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Fs(#[from] std::io::Error),
    #[error("parse failure: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot parse value {0:?} as a rational or decimal")]
    BadValue(String),
    #[error("entry indices must be strictly increasing (offender: {0})")]
    NonIncreasingIndex(u64),
    #[error("bad character spec: {0}")]
    BadCharacter(#[from] crate::characters::CharacterError),
    #[error("file has kind {got:?}, expected {expected:?}")]
    WrongKind { got: FileKind, expected: FileKind },
    #[error("weight spec does not match file kind")]
    BadWeight,
    #[error("validation failed at prime {first_prime}: {detail}")]
    Validation { first_prime: u64, detail: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FileKind {
    #[serde(rename = "newform")]
    Newform,
    #[serde(rename = "half-integral")]
    HalfIntegral,
}

/// Integral weight k, or the half-integral weight k + 1/2 stored as the
/// pair [2k+1, 2].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Integral(u32),
    HalfIntegral([u32; 2]),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub modulus: u64,
    pub exponents: Vec<i64>,
}

impl CharacterSpec {
    pub fn of(chi: &DirichletCharacter) -> CharacterSpec {
        CharacterSpec {
            modulus: chi.modulus(),
            exponents: chi.exponents().iter().map(|&e| e as i64).collect(),
        }
    }

    pub fn build(&self) -> Result<DirichletCharacter, IoError> {
        Ok(character_from_exponents(self.modulus, &self.exponents)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileHeader {
    pub kind: FileKind,
    pub weight: WeightSpec,
    pub level: u64,
    pub character: CharacterSpec,
    pub normalized: bool,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub index: u64,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub header: FileHeader,
    pub entries: Vec<CoefficientEntry>,
}

fn parse_component(s: &str) -> Result<(Option<BigRational>, f64), IoError> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        let approx = num_traits::ToPrimitive::to_f64(&r).unwrap_or(f64::NAN);
        return Ok((Some(r), approx));
    }
    if let Ok(v) = f64::from_str(s) {
        return Ok((None, v));
    }
    Err(IoError::BadValue(s.to_string()))
}

fn parse_value(re: &str, im: &str) -> Result<CoefficientValue, IoError> {
    let (re_exact, re_approx) = parse_component(re)?;
    let (im_exact, im_approx) = parse_component(im)?;
    match (re_exact, im_exact) {
        (Some(re), Some(im)) => Ok(CoefficientValue::from_exact(GaussianRational { re, im })),
        _ => Ok(CoefficientValue::from_approx(Complex64::new(
            re_approx, im_approx,
        ))),
    }
}

fn render_component(exact: Option<&BigRational>, approx: f64) -> String {
    match exact {
        Some(r) => r.to_string(),
        None => format!("{approx:e}"),
    }
}

fn render_value(v: &CoefficientValue) -> (String, String) {
    match v.exact() {
        Some(g) => (
            render_component(Some(&g.re), 0.0),
            render_component(Some(&g.im), 0.0),
        ),
        None => (
            render_component(None, v.approx().re),
            render_component(None, v.approx().im),
        ),
    }
}

fn check_increasing(entries: &[CoefficientEntry]) -> Result<(), IoError> {
    let mut last = 0u64;
    for e in entries {
        if e.index <= last {
            return Err(IoError::NonIncreasingIndex(e.index));
        }
        last = e.index;
    }
    Ok(())
}

/// Serialize a newform to the interchange structure.
pub fn newform_to_file(data: &NewformData, source: &str) -> CoefficientFile {
    let entries = data
        .coeff_entries()
        .map(|(p, v)| {
            let (re, im) = render_value(v);
            CoefficientEntry { index: p, re, im }
        })
        .collect();
    CoefficientFile {
        header: FileHeader {
            kind: FileKind::Newform,
            weight: WeightSpec::Integral(data.weight()),
            level: data.level(),
            character: CharacterSpec::of(data.character()),
            normalized: data.source_normalized(),
            source: source.to_string(),
        },
        entries,
    }
}

/// Parse + validate a newform coefficient file. Normalized sources are
/// rescaled to the unnormalized convention on load (approximate values).
pub fn file_to_newform(file: &CoefficientFile) -> Result<NewformData, IoError> {
    if file.header.kind != FileKind::Newform {
        return Err(IoError::WrongKind {
            got: file.header.kind,
            expected: FileKind::Newform,
        });
    }
    let weight = match file.header.weight {
        WeightSpec::Integral(k) => k,
        WeightSpec::HalfIntegral(_) => return Err(IoError::BadWeight),
    };
    check_increasing(&file.entries)?;
    let character = file.header.character.build()?;
    let mut coeffs = BTreeMap::new();
    for e in &file.entries {
        let mut v = parse_value(&e.re, &e.im)?;
        if file.header.normalized {
            // stored a(p)·p^{−(k−1)/2}: undo the normalization
            let scale = (e.index as f64).powf((weight as f64 - 1.0) / 2.0);
            v = CoefficientValue::from_approx(v.approx() * scale);
        }
        coeffs.insert(e.index, v);
    }
    let data = NewformData::new(
        weight,
        file.header.level,
        character,
        coeffs,
        file.header.normalized,
    );
    let issues = data.validate();
    if let Some(first) = issues.first() {
        let (first_prime, detail) = match first {
            ValidationIssue::DeligneBound { p, ratio } => {
                (*p, format!("Deligne bound violated, |ratio| = {ratio}"))
            }
            ValidationIssue::NonRealRatio { p, im } => {
                (*p, format!("a(p)/zeta has imaginary part {im}"))
            }
        };
        let all: Vec<u64> = issues
            .iter()
            .map(|i| match i {
                ValidationIssue::DeligneBound { p, .. } => *p,
                ValidationIssue::NonRealRatio { p, .. } => *p,
            })
            .collect();
        return Err(IoError::Validation {
            first_prime,
            detail: format!("{detail}; offending primes {all:?}"),
        });
    }
    Ok(data)
}

pub fn save_newform(data: &NewformData, source: &str, path: &Path) -> Result<(), IoError> {
    let file = newform_to_file(data, source);
    write_json(&file, path)
}

pub fn load_newform(path: &Path) -> Result<NewformData, IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: CoefficientFile = serde_json::from_str(&text)?;
    file_to_newform(&file)
}

/// Serialize a half-integral coefficient table (indexed by n, holding
/// a(t n²) or plain a(n) for ingested data).
pub fn half_integral_to_file(
    k: u32,
    level: u64,
    character: &DirichletCharacter,
    data: &BTreeMap<u64, CoefficientValue>,
    source: &str,
) -> CoefficientFile {
    let entries = data
        .iter()
        .map(|(&n, v)| {
            let (re, im) = render_value(v);
            CoefficientEntry { index: n, re, im }
        })
        .collect();
    CoefficientFile {
        header: FileHeader {
            kind: FileKind::HalfIntegral,
            weight: WeightSpec::HalfIntegral([2 * k + 1, 2]),
            level,
            character: CharacterSpec::of(character),
            normalized: false,
            source: source.to_string(),
        },
        entries,
    }
}

pub fn save_half_integral(
    k: u32,
    level: u64,
    character: &DirichletCharacter,
    data: &BTreeMap<u64, CoefficientValue>,
    source: &str,
    path: &Path,
) -> Result<(), IoError> {
    write_json(&half_integral_to_file(k, level, character, data, source), path)
}

/// Load a half-integral coefficient file as (header, n → value).
pub fn load_half_integral(
    path: &Path,
) -> Result<(FileHeader, BTreeMap<u64, CoefficientValue>), IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: CoefficientFile = serde_json::from_str(&text)?;
    if file.header.kind != FileKind::HalfIntegral {
        return Err(IoError::WrongKind {
            got: file.header.kind,
            expected: FileKind::HalfIntegral,
        });
    }
    check_increasing(&file.entries)?;
    let mut data = BTreeMap::new();
    for e in &file.entries {
        data.insert(e.index, parse_value(&e.re, &e.im)?);
    }
    Ok((file.header, data))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Format a float with 12 significant digits, the fixed rendering used in
/// reports.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Render an exact ratio as "num/den".
pub fn ratio_string(r: &Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A reproducible experiment record: identical inputs produce identical
/// serializations except for `runtime_ms`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub tool_version: String,
    pub inputs: BTreeMap<String, String>,
    pub counts: BTreeMap<String, u64>,
    pub ratios: BTreeMap<String, String>,
    pub predicted: BTreeMap<String, String>,
    pub ks: BTreeMap<String, String>,
    pub verdicts: BTreeMap<String, String>,
    pub runtime_ms: u64,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> ExperimentReport {
        ExperimentReport {
            experiment: experiment.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            counts: BTreeMap::new(),
            ratios: BTreeMap::new(),
            predicted: BTreeMap::new(),
            ks: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            runtime_ms: 0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn count(&mut self, key: &str, value: u64) -> &mut Self {
        self.counts.insert(key.to_string(), value);
        self
    }

    pub fn ratio(&mut self, key: &str, value: f64) -> &mut Self {
        self.ratios.insert(key.to_string(), fmt_sig12(value));
        self
    }

    pub fn predicted_ratio(&mut self, key: &str, value: &Ratio<i64>) -> &mut Self {
        self.predicted.insert(key.to_string(), ratio_string(value));
        self
    }

    pub fn ks_value(&mut self, key: &str, value: f64) -> &mut Self {
        self.ks.insert(key.to_string(), fmt_sig12(value));
        self
    }

    pub fn verdict(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.verdicts.insert(key.to_string(), value.to_string());
        self
    }

    /// Record counts and ratios of a density estimate under a key prefix.
    pub fn density(&mut self, prefix: &str, est: &crate::equidist::DensityEstimate) -> &mut Self {
        self.count(&format!("{prefix}.pos"), est.count_pos);
        self.count(&format!("{prefix}.neg"), est.count_neg);
        self.count(&format!("{prefix}.zero"), est.count_zero);
        self.count(
            &format!("{prefix}.boundary_excluded"),
            est.count_boundary_excluded,
        );
        self.count(&format!("{prefix}.level_skipped"), est.count_level_skipped);
        self.count(&format!("{prefix}.total"), est.total);
        self.ratio(&format!("{prefix}.ratio_pos"), est.ratio_pos());
        self.ratio(&format!("{prefix}.ratio_neg"), est.ratio_neg());
        self.ratio(&format!("{prefix}.ratio_zero"), est.ratio_zero());
        if let Some(r) = est.pos_among_nonzero() {
            self.ratio(&format!("{prefix}.pos_among_nonzero"), r);
        }
        if let Some(p) = &est.predicted {
            self.predicted_ratio(&format!("{prefix}.pos"), &p.pos);
            self.predicted_ratio(&format!("{prefix}.neg"), &p.neg);
            self.predicted_ratio(&format!("{prefix}.nonzero"), &p.nonzero);
        }
        if let Some(r) = &est.predicted_ratio {
            self.predicted_ratio(&format!("{prefix}.pos_among_nonzero"), r);
        }
        self
    }

    /// Deterministic serialization (fixed field order, sorted maps, fixed
    /// float rendering), with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), IoError> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ExperimentReport, IoError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// A copy with the runtime zeroed, for byte-identity comparisons.
    pub fn normalized_for_comparison(&self) -> ExperimentReport {
        let mut copy = self.clone();
        copy.runtime_ms = 0;
        copy
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::forms;

    #[test]
    fn newform_round_trip_is_bit_exact() {
        let delta = forms::delta(200);
        let file = newform_to_file(&delta, "test");
        let text1 = serde_json::to_string_pretty(&file).unwrap();
        let loaded = file_to_newform(&file).unwrap();
        let file2 = newform_to_file(&loaded, "test");
        let text2 = serde_json::to_string_pretty(&file2).unwrap();
        assert_eq!(text1, text2);
        assert_eq!(loaded.weight(), 12);
        assert_eq!(
            loaded.prime_coeff(2).unwrap().exact(),
            delta.prime_coeff(2).unwrap().exact()
        );
    }

    #[test]
    fn deligne_violation_names_the_prime() {
        let delta = forms::delta(50);
        let mut file = newform_to_file(&delta, "test");
        file.entries[0].re = "99999999".to_string(); // |a(2)| > 2·2^{11/2}
        match file_to_newform(&file) {
            Err(IoError::Validation { first_prime, .. }) => assert_eq!(first_prime, 2),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn normalized_sources_are_rescaled_on_load() {
        // a file carrying a(p)/p^{(k-1)/2} with normalized=true loads back
        // on the unnormalized scale
        let delta = forms::delta(50);
        let mut file = newform_to_file(&delta, "test");
        file.header.normalized = true;
        for e in &mut file.entries {
            let p = e.index as f64;
            let unnorm: f64 = e.re.parse().unwrap();
            e.re = format!("{:e}", unnorm / p.powf(5.5));
            e.im = "0.0".to_string();
        }
        let loaded = file_to_newform(&file).unwrap();
        assert!(loaded.source_normalized());
        let v = loaded.prime_coeff(2).unwrap();
        assert!(v.exact().is_none());
        assert!((v.approx().re + 24.0).abs() < 1e-9);
    }

    #[test]
    fn decimal_entries_load_as_approximate() {
        let delta = forms::delta(50);
        let mut file = newform_to_file(&delta, "test");
        file.entries[0].re = "-24.0".to_string();
        let loaded = file_to_newform(&file).unwrap();
        let v = loaded.prime_coeff(2).unwrap();
        assert!(v.exact().is_none());
        assert!((v.approx().re + 24.0).abs() < 1e-12);
    }

    #[test]
    fn decimal_entries_round_trip_bitwise() {
        let v = CoefficientValue::from_approx(Complex64::new(-0.12345678901234567, 3.5e-13));
        let (re, im) = render_value(&v);
        let back = parse_value(&re, &im).unwrap();
        assert!(back.exact().is_none());
        assert_eq!(back.approx().re.to_bits(), v.approx().re.to_bits());
        assert_eq!(back.approx().im.to_bits(), v.approx().im.to_bits());
    }

    #[test]
    fn indices_must_increase() {
        let delta = forms::delta(50);
        let mut file = newform_to_file(&delta, "test");
        file.entries[1].index = 2;
        assert!(matches!(
            file_to_newform(&file),
            Err(IoError::NonIncreasingIndex(2))
        ));
    }

    #[test]
    fn half_integral_round_trip() {
        let fam = crate::shimura::delta_family(1, 400).unwrap();
        let data = fam.synthesize_half_data(20).unwrap();
        let dir = std::env::temp_dir().join("newform_signs_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("half.json");
        save_half_integral(6, 4, fam.epsilon(), &data, "synthesized", &path).unwrap();
        let (header, loaded) = load_half_integral(&path).unwrap();
        assert_eq!(header.weight, WeightSpec::HalfIntegral([13, 2]));
        assert_eq!(loaded.len(), 20);
        assert_eq!(
            loaded.get(&3).unwrap().exact(),
            data.get(&3).unwrap().exact()
        );
        // wrong-kind guard
        assert!(load_newform(&path).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn reports_are_reproducible_modulo_runtime() {
        let build = || {
            let mut r = ExperimentReport::new("st-test");
            r.input("form", "delta").input("xmax", 1000u64);
            r.count("samples", 168);
            r.ratio("ks", 0.0123456789);
            r.predicted_ratio("pos", &Ratio::new(1, 2));
            r
        };
        let mut a = build();
        let mut b = build();
        a.runtime_ms = 5;
        b.runtime_ms = 99;
        assert_ne!(a.to_json_string(), b.to_json_string());
        assert_eq!(
            a.normalized_for_comparison().to_json_string(),
            b.normalized_for_comparison().to_json_string()
        );
    }

    #[test]
    fn fixed_float_formatting() {
        assert_eq!(fmt_sig12(0.5), "5.00000000000e-1");
        assert_eq!(fmt_sig12(0.804498), "8.04498000000e-1");
        assert_eq!(ratio_string(&Ratio::new(3, 4)), "3/4");
        assert_eq!(ratio_string(&Ratio::new(2, 1)), "2/1");
    }

    #[test]
    fn bad_values_are_rejected() {
        assert!(parse_component("1/2").unwrap().0.is_some());
        assert!(parse_component("-24").unwrap().0.is_some());
        assert!(parse_component("0.5").unwrap().0.is_none());
        assert!(parse_component("nope").is_err());
    }
}
