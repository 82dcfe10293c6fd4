//! Browser demo exposing three interactive experiments over the shipped
//! eta-product forms: the angle histogram against its reference measure,
//! the sign-density convergence curve against the exact predicted density,
//! and the fixed-prime oscillation pattern.
//!
//! Each operation returns a JSON string; the page renders it on plain
//! canvases. Build for the web with
//! `wasm-pack build crates/wasm-demo --target web --out-dir www/pkg`.

use std::cell::RefCell;
use std::collections::HashMap;

use serde_json::json;
use wasm_bindgen::prelude::*;

use newform_signs::characters::DirichletCharacter;
use newform_signs::equidist::{
    family_half_plane_sign, half_plane_sign, ks_statistic, oscillation_certificate,
    predicted_density_thm1, predicted_density_thm3_order, CmCase, CmMeasure,
    OscillationVerdict, PrimeSignClass, SatoTate,
};
use newform_signs::hecke::{AngleMode, NewformData};
use newform_signs::phase::{Phi, SignClass};
use newform_signs::primes::primes_up_to;
use newform_signs::qseries::forms;
use newform_signs::shimura::ShimuraFamily;

/// Largest coefficient range the demo computes in the browser.
const MAX_TERMS: u64 = 200_000;

thread_local! {
    static FORM_CACHE: RefCell<HashMap<&'static str, (u64, NewformData)>> =
        RefCell::new(HashMap::new());
}

struct FormInfo {
    name: &'static str,
    cm: bool,
    /// t = 1 family discriminant matches the CM field (the 3/4 case).
    family_case: CmCase,
    build: fn(usize) -> NewformData,
}

fn form_info(name: &str) -> Result<&'static FormInfo, String> {
    const FORMS: &[FormInfo] = &[
        FormInfo {
            name: "delta",
            cm: false,
            family_case: CmCase::NonCm,
            build: forms::delta,
        },
        FormInfo {
            name: "eta4-6",
            cm: true,
            family_case: CmCase::CmF,
            build: forms::eta4_pow6,
        },
        FormInfo {
            name: "eta1-11",
            cm: false,
            family_case: CmCase::NonCm,
            build: forms::eta1_11,
        },
        FormInfo {
            name: "eta4-8",
            cm: true,
            family_case: CmCase::CmF,
            build: forms::eta4_8,
        },
    ];
    FORMS
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| format!("unknown form {name:?}; expected delta, eta4-6, eta1-11 or eta4-8"))
}

fn with_form<T>(
    name: &str,
    xmax: u64,
    f: impl FnOnce(&FormInfo, &NewformData) -> Result<T, String>,
) -> Result<T, String> {
    if !(2..=MAX_TERMS).contains(&xmax) {
        return Err(format!("xmax must lie in 2..={MAX_TERMS}"));
    }
    let info = form_info(name)?;
    FORM_CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        let needs_build = match cache.get(info.name) {
            Some((cached_max, _)) => *cached_max < xmax,
            None => true,
        };
        if needs_build {
            cache.insert(info.name, (xmax, (info.build)(xmax as usize)));
        }
        let (_, form) = cache.get(info.name).expect("just inserted");
        f(info, form)
    })
}

fn parse_phi(a: i64, b: i64) -> Result<Phi, String> {
    Phi::rational(a, b).map_err(|e| e.to_string())
}

fn sign_i8(s: SignClass) -> i8 {
    match s {
        SignClass::Pos => 1,
        SignClass::Zero => 0,
        SignClass::Neg => -1,
    }
}

// ---------------------------------------------------------------------------
// operation 1: angle histogram vs reference measure
// ---------------------------------------------------------------------------

fn angle_histogram_impl(form: &str, xmax: u64, bins: usize) -> Result<String, String> {
    if !(4..=400).contains(&bins) {
        return Err("bins must lie in 4..=400".into());
    }
    with_form(form, xmax, |info, data| {
        let mut counts = vec![0u64; bins];
        let mut values = Vec::new();
        let mut zero_count = 0u64;
        for p in primes_up_to(xmax) {
            let angle = match data.extract_angle(p, AngleMode::SqrtOfEps) {
                Ok(a) => a,
                Err(newform_signs::hecke::HeckeError::LevelPrime(_)) => continue,
                Err(e) => return Err(e.to_string()),
            };
            values.push(angle.cos_theta);
            if data
                .prime_coeff(p)
                .expect("scanned")
                .is_exact_zero()
            {
                zero_count += 1;
            }
            let bin = ((angle.theta / std::f64::consts::PI) * bins as f64) as usize;
            counts[bin.min(bins - 1)] += 1;
        }
        let n = values.len().max(1) as f64;
        let bin_width = std::f64::consts::PI / bins as f64;
        let density: Vec<f64> = counts.iter().map(|&c| c as f64 / (n * bin_width)).collect();
        // reference density in the angle coordinate at bin centres
        let reference: Vec<f64> = (0..bins)
            .map(|i| {
                let theta = (i as f64 + 0.5) * bin_width;
                if info.cm {
                    1.0 / (2.0 * std::f64::consts::PI)
                } else {
                    (2.0 / std::f64::consts::PI) * theta.sin() * theta.sin()
                }
            })
            .collect();
        let ks = if info.cm {
            ks_statistic(&values, &CmMeasure).map_err(|e| e.to_string())?
        } else {
            ks_statistic(&values, &SatoTate).map_err(|e| e.to_string())?
        };
        Ok(json!({
            "form": info.name,
            "cm": info.cm,
            "xmax": xmax,
            "bins": bins,
            "samples": values.len(),
            "counts": counts,
            "density": density,
            "reference": reference,
            "atom_mass": zero_count as f64 / n,
            "reference_atom": if info.cm { 0.5 } else { 0.0 },
            "ks": ks,
            "ks_measure": if info.cm { "cm" } else { "st" },
        })
        .to_string())
    })
}

/// Histogram of the prime angles θ_p with the reference density (semicircle
/// in sin²θ for non-CM forms, uniform + atom at π/2 for CM forms) and the
/// atom-aware Kolmogorov-Smirnov distance.
#[wasm_bindgen]
pub fn angle_histogram(form: &str, xmax: u32, bins: u32) -> Result<String, JsError> {
    angle_histogram_impl(form, xmax as u64, bins as usize).map_err(|e| JsError::new(&e))
}

// ---------------------------------------------------------------------------
// operation 2: sign-density convergence vs exact prediction
// ---------------------------------------------------------------------------

fn sign_density_curve_impl(
    form: &str,
    family: bool,
    t: u64,
    nu: u32,
    phi_num: i64,
    phi_den: i64,
    xmax: u64,
) -> Result<String, String> {
    let phi = parse_phi(phi_num, phi_den)?;
    with_form(form, xmax, |info, data| {
        let (signs, predicted): (Vec<(u64, SignClass)>, _) = if family {
            if data.weight() % 2 != 0 {
                return Err("family mode needs an even-weight lift".into());
            }
            let fam = ShimuraFamily::new(
                t,
                data.weight() / 2,
                4,
                DirichletCharacter::trivial(4),
                data.clone(),
            )
            .map_err(|e| e.to_string())?;
            // the t = 1 discriminant matches the CM field for the shipped
            // CM lifts; other t fall into the generic case
            let case = if info.cm && t == 1 {
                info.family_case
            } else if info.cm {
                CmCase::CmOther
            } else {
                CmCase::NonCm
            };
            let predicted =
                predicted_density_thm3_order(fam.epsilon().order(), &phi, case)
                    .map_err(|e| e.to_string())?;
            let mut out = Vec::new();
            for p in primes_up_to(xmax) {
                if let Some(s) =
                    family_half_plane_sign(&fam, p, &phi).map_err(|e| e.to_string())?
                {
                    out.push((p, s));
                }
            }
            (out, predicted)
        } else {
            if nu == 0 || nu.is_multiple_of(2) {
                return Err("the exact predictor needs odd nu".into());
            }
            let predicted = predicted_density_thm1(data.character(), nu, &phi, info.cm)
                .map_err(|e| e.to_string())?;
            let mut out = Vec::new();
            for p in primes_up_to(xmax) {
                match half_plane_sign(data, p, nu, &phi, AngleMode::SqrtOfEps)
                    .map_err(|e| e.to_string())?
                {
                    PrimeSignClass::Sign(s) => out.push((p, s)),
                    PrimeSignClass::Level | PrimeSignClass::Boundary => continue,
                }
            }
            (out, predicted)
        };
        // running ratios at ~240 checkpoints
        let total = signs.len();
        let step = (total / 240).max(1);
        let mut checkpoints = Vec::new();
        let mut pos_ratio = Vec::new();
        let mut zero_ratio = Vec::new();
        let mut pos = 0u64;
        let mut zero = 0u64;
        for (i, &(p, s)) in signs.iter().enumerate() {
            match s {
                SignClass::Pos => pos += 1,
                SignClass::Zero => zero += 1,
                SignClass::Neg => {}
            }
            if (i + 1) % step == 0 || i + 1 == total {
                checkpoints.push(p);
                pos_ratio.push(pos as f64 / (i + 1) as f64);
                zero_ratio.push(zero as f64 / (i + 1) as f64);
            }
        }
        let pred_pos = *predicted.pos.numer() as f64 / *predicted.pos.denom() as f64;
        Ok(json!({
            "form": info.name,
            "family": family,
            "t": t,
            "nu": nu,
            "phi": format!("{phi_num}/{phi_den} pi"),
            "samples": total,
            "checkpoints": checkpoints,
            "pos_ratio": pos_ratio,
            "zero_ratio": zero_ratio,
            "predicted_pos": format!("{}/{}", predicted.pos.numer(), predicted.pos.denom()),
            "predicted_pos_value": pred_pos,
            "predicted_nonzero": format!("{}/{}", predicted.nonzero.numer(), predicted.nonzero.denom()),
            "final_pos_ratio": pos_ratio.last().copied().unwrap_or(0.0),
        })
        .to_string())
    })
}

/// Running positive-sign ratio of Re(a(p^ν)e^{−iφ}) over primes (or of the
/// half-integral family a(t p²) when `family` is set), with the exact
/// predicted density it should converge to.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sign_density_curve(
    form: &str,
    family: bool,
    t: u32,
    nu: u32,
    phi_num: i32,
    phi_den: i32,
    xmax: u32,
) -> Result<String, JsError> {
    sign_density_curve_impl(
        form,
        family,
        t as u64,
        nu,
        phi_num as i64,
        phi_den as i64,
        xmax as u64,
    )
    .map_err(|e| JsError::new(&e))
}

// ---------------------------------------------------------------------------
// operation 3: fixed-prime oscillation pattern
// ---------------------------------------------------------------------------

fn oscillation_pattern_impl(
    form: &str,
    p: u64,
    family: bool,
    t: u64,
    nu_max: u64,
    phi_num: i64,
    phi_den: i64,
) -> Result<String, String> {
    if !(1..=5_000).contains(&nu_max) {
        return Err("nu_max must lie in 1..=5000".into());
    }
    let phi = parse_phi(phi_num, phi_den)?;
    // coefficients grow like p^{k nu/2}: enough terms to classify signs
    let data_need = (p + 1).max(64);
    with_form(form, data_need, |info, data| {
        let values: Vec<_> = if family {
            if data.weight() % 2 != 0 {
                return Err("family mode needs an even-weight lift".into());
            }
            let fam = ShimuraFamily::new(
                t,
                data.weight() / 2,
                4,
                DirichletCharacter::trivial(4),
                data.clone(),
            )
            .map_err(|e| e.to_string())?;
            (1..=nu_max)
                .map(|nu| {
                    fam.family_prime_power(p, nu as u32)
                        .map(|v| (nu, v))
                        .map_err(|e| e.to_string())
                })
                .collect::<Result<_, _>>()?
        } else {
            (1..=nu_max)
                .map(|nu| {
                    data.hecke_power(p, nu as u32)
                        .map(|v| (nu, v))
                        .map_err(|e| e.to_string())
                })
                .collect::<Result<_, _>>()?
        };
        let signs: Vec<i8> = values
            .iter()
            .map(|(_, v)| sign_i8(newform_signs::equidist::sign_re_rotated(v, &phi)))
            .collect();
        let cert = oscillation_certificate(values, &phi, nu_max as usize);
        let mut running = Vec::new();
        let (mut pos, mut nonzero) = (0u64, 0u64);
        for &s in &signs {
            if s != 0 {
                nonzero += 1;
                if s > 0 {
                    pos += 1;
                }
            }
            running.push(if nonzero > 0 {
                pos as f64 / nonzero as f64
            } else {
                0.5
            });
        }
        let verdict = match cert.verdict {
            OscillationVerdict::OscillatingEvidence => "oscillating-evidence",
            OscillationVerdict::Trivial => "trivial",
            OscillationVerdict::Inconclusive => "inconclusive",
        };
        Ok(json!({
            "form": info.name,
            "family": family,
            "p": p,
            "t": t,
            "nu_max": nu_max,
            "phi": format!("{phi_num}/{phi_den} pi"),
            "signs": signs,
            "changes": cert.changes,
            "change_count": cert.changes.len(),
            "nonzero": cert.nonzero_count,
            "verdict": verdict,
            "running_pos_among_nonzero": running,
        })
        .to_string())
    })
}

/// Sign pattern of a(p^ν) (or a(t p^{2ν}) in family mode) for ν up to
/// `nu_max`, with the sign-change indices, the oscillation verdict, and the
/// running positive ratio among nonzero terms.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn oscillation_pattern(
    form: &str,
    p: u32,
    family: bool,
    t: u32,
    nu_max: u32,
    phi_num: i32,
    phi_den: i32,
) -> Result<String, JsError> {
    oscillation_pattern_impl(
        form,
        p as u64,
        family,
        t as u64,
        nu_max as u64,
        phi_num as i64,
        phi_den as i64,
    )
    .map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_payload_is_well_formed() {
        let payload = angle_histogram_impl("delta", 5_000, 40).unwrap();
        let v: serde_json::Value = serde_json::from_str(&payload).unwrap();
        assert_eq!(v["bins"], 40);
        assert_eq!(v["samples"], 669);
        assert!(v["ks"].as_f64().unwrap() < 0.1);
        let density: Vec<f64> = v["density"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        // the histogram integrates to one
        let area: f64 = density.iter().sum::<f64>() * std::f64::consts::PI / 40.0;
        assert!((area - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cm_histogram_reports_the_atom() {
        let payload = angle_histogram_impl("eta4-6", 5_000, 40).unwrap();
        let v: serde_json::Value = serde_json::from_str(&payload).unwrap();
        assert_eq!(v["ks_measure"], "cm");
        let atom = v["atom_mass"].as_f64().unwrap();
        assert!((atom - 0.5).abs() < 0.05);
        assert!(v["ks"].as_f64().unwrap() < 0.1);
    }

    #[test]
    fn density_curve_converges_toward_prediction() {
        let payload = sign_density_curve_impl("delta", false, 1, 1, 0, 1, 20_000).unwrap();
        let v: serde_json::Value = serde_json::from_str(&payload).unwrap();
        assert_eq!(v["predicted_pos"], "1/2");
        let last = v["final_pos_ratio"].as_f64().unwrap();
        assert!((last - 0.5).abs() < 0.05);

        // CM family at t = 1 targets 3/4
        let payload = sign_density_curve_impl("eta4-8", true, 1, 1, 0, 1, 20_000).unwrap();
        let v: serde_json::Value = serde_json::from_str(&payload).unwrap();
        assert_eq!(v["predicted_pos"], "3/4");
        let last = v["final_pos_ratio"].as_f64().unwrap();
        assert!((last - 0.75).abs() < 0.05);
    }

    #[test]
    fn density_curve_rejects_even_nu() {
        assert!(sign_density_curve_impl("delta", false, 1, 2, 0, 1, 1_000).is_err());
    }

    #[test]
    fn oscillation_pattern_finds_changes() {
        let payload = oscillation_pattern_impl("delta", 3, true, 1, 200, 0, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&payload).unwrap();
        assert_eq!(v["verdict"], "oscillating-evidence");
        assert!(v["change_count"].as_u64().unwrap() >= 5);
        // the one-sided CM fixed-prime sequence is inconclusive
        let payload = oscillation_pattern_impl("eta4-6", 3, false, 1, 100, 0, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&payload).unwrap();
        assert_eq!(v["verdict"], "inconclusive");
    }

    #[test]
    fn unknown_form_is_an_error() {
        assert!(angle_histogram_impl("nope", 1_000, 40).is_err());
        assert!(angle_histogram_impl("delta", 1_000_000_000, 40).is_err());
    }
}
