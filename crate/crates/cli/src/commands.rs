//! The subcommands. Each returns a JSON report plus the verdict flags that
//! decide the exit code.

use std::collections::BTreeSet;

use num_integer::Integer;
use rayon::prelude::*;
use serde_json::{json, Value};
use stickel_core::groups::fmt_elem;
use stickel_core::linalg::Rational;
use stickel_core::quadfield::Place;
use stickel_core::stickring::{
    delta_t, injectivity_check, smooth, stickelberger, theorem_ideal_with, AbelianExtension, FrobeniusSide,
    GroupRingElem, GroupRingIdeal, Injectivity,
};
use stickel_core::suite::IdealShape;
use stickel_core::zetaval::{all_partial_zetas, partial_zeta_q, partial_zeta_quad};
use stickel_core::Error;

use crate::config::{check_label, ClassSpec, ConfigError, Extension, JobConfig};
use crate::report::{self, q};

/// Flags shared by all subcommands.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub seed: u64,
    pub gcd_trick: bool,
    pub experimental_arch_p: bool,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub report: Value,
    /// Some asserted check failed, or a case raised an error.
    pub failed: bool,
    /// A bounded search gave up.
    pub search_error: bool,
}

impl Outcome {
    fn absorb(&mut self, e: &Error) {
        match e {
            Error::SearchIncomplete(_) => self.search_error = true,
            _ => self.failed = true,
        }
    }
}

pub enum CommandError {
    Config(ConfigError),
    Search(String),
    Internal(String),
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Config(e)
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::SearchIncomplete(m) => CommandError::Search(m),
            other => CommandError::Internal(other.to_string()),
        }
    }
}

fn error_record(k: u32, e: &Error) -> Value {
    json!({ "k": k, "error": e.to_string() })
}

fn extension_echo(ext: &Extension) -> Value {
    match ext {
        Extension::Rational(e) => json!({
            "base": "Q",
            "conductor": e.conductor(),
            "galois_group": e.galois_group().invariants(),
            "totally_real": e.is_totally_real(),
        }),
        Extension::Quadratic(e) => json!({
            "base": "quadratic",
            "D": e.field().d(),
            "modulus": report::ideal(e.ray().modulus()),
            "kernel": e.kernel().iter().map(fmt_elem).collect::<Vec<_>>(),
            "galois_group": e.galois_group().invariants(),
        }),
    }
}

fn base_report(command: &str, flags: &Flags) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(report::SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(flags.seed));
    m
}

// ---------------------------------------------------------------------------
// zeta
// ---------------------------------------------------------------------------

pub fn zeta(cfg: &JobConfig, flags: &Flags) -> Result<Outcome, CommandError> {
    let field = cfg.field()?;
    let ks = cfg.k_values()?;
    let mut out = base_report("zeta", flags);
    let mut runs = Vec::new();
    match field.base.as_str() {
        "Q" => {
            let f = field.conductor.ok_or_else(|| ConfigError::new("field.conductor", "required for base Q"))?;
            if f == 0 {
                return Err(ConfigError::new("field.conductor", "must be positive").into());
            }
            let classes: Vec<u64> = match &cfg.zeta.classes {
                None => (1..=f).filter(|a| a.gcd(&f) == 1).collect(),
                Some(list) => list
                    .iter()
                    .enumerate()
                    .map(|(i, c)| match c {
                        ClassSpec::Residue(a) if (a.rem_euclid(f as i64) as u64).gcd(&f) == 1 => {
                            Ok((a.rem_euclid(f as i64) as u64 + f - 1) % f + 1)
                        }
                        _ => Err(ConfigError::new(
                            format!("zeta.classes[{i}]"),
                            format!("invalid class label {c:?}: expected a residue prime to {f}"),
                        )),
                    })
                    .collect::<Result<_, _>>()?,
            };
            for &k in &ks {
                let mut values = Vec::new();
                let mut sum = Rational::from_integer(0.into());
                for &a in &classes {
                    let z = partial_zeta_q(f, a, k)?;
                    sum += &z;
                    values.push(json!({ "class": a.to_string(), "value": q(&z) }));
                }
                runs.push(json!({ "k": k, "values": values, "sum": q(&sum) }));
            }
            out.insert("field".into(), json!({ "base": "Q", "conductor": f }));
        }
        "quadratic" => {
            let ray = field.ray()?;
            let classes = match &cfg.zeta.classes {
                None => ray.group().elements(),
                Some(list) => list
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let at = format!("zeta.classes[{i}]");
                        match c {
                            ClassSpec::Label(l) => check_label(ray.group().invariants(), l, &at),
                            ClassSpec::Residue(_) => Err(ConfigError::new(at, "expected a ray-class label list")),
                        }
                    })
                    .collect::<Result<_, _>>()?,
            };
            for &k in &ks {
                let all = if cfg.zeta.classes.is_none() { Some(all_partial_zetas(&ray, k)?) } else { None };
                let mut values = Vec::new();
                let mut sum = Rational::from_integer(0.into());
                for class in &classes {
                    let z = match &all {
                        Some(all) => all.iter().find(|(c, _)| c == class).map(|(_, z)| z.clone()).unwrap(),
                        None => partial_zeta_quad(&ray, class, k)?,
                    };
                    sum += &z;
                    values.push(json!({ "class": fmt_elem(class), "value": q(&z) }));
                }
                runs.push(json!({ "k": k, "values": values, "sum": q(&sum) }));
            }
            out.insert(
                "field".into(),
                json!({
                    "base": "quadratic",
                    "D": ray.field().d(),
                    "modulus": report::ideal(ray.modulus()),
                    "ray_class_group": ray.group().invariants(),
                }),
            );
        }
        other => {
            return Err(ConfigError::new("field.base", format!("expected \"Q\" or \"quadratic\", got {other:?}")).into())
        }
    }
    out.insert("results".into(), Value::Array(runs));
    Ok(Outcome { report: Value::Object(out), ..Outcome::default() })
}

// ---------------------------------------------------------------------------
// raygroup
// ---------------------------------------------------------------------------

pub fn raygroup(cfg: &JobConfig, flags: &Flags) -> Result<Outcome, CommandError> {
    let ext = cfg.field()?.extension()?;
    let mut out = base_report("raygroup", flags);
    out.insert("extension".into(), extension_echo(&ext));
    match &ext {
        Extension::Rational(e) => {
            out.insert("ray_class_group".into(), json!({ "cyclic_orders": e.ray_group().invariants() }));
        }
        Extension::Quadratic(e) => {
            let ray = e.ray();
            let f = ray.field();
            let (eps_m, exponent) = ray.eps_m();
            out.insert(
                "ray_class_group".into(),
                json!({
                    "order": ray.order(),
                    "cyclic_orders": ray.cyclic_orders(),
                    "narrow_class_number": ray.narrow_class_number(),
                    "class_reps": ray.class_reps().iter().map(report::ideal).collect::<Vec<_>>(),
                    "eps_m": { "unit": eps_m.to_string(), "exponent_over_eps_plus": exponent },
                }),
            );
            out.insert(
                "field".into(),
                json!({
                    "D": f.d(),
                    "disc": f.disc(),
                    "eps0": f.eps0().to_string(),
                    "eps0_norm": f.eps0_norm(),
                    "class_number": f.class_number(),
                    "narrow_class_number": f.narrow_class_number(),
                }),
            );
        }
    }
    Ok(Outcome { report: Value::Object(out), ..Outcome::default() })
}

// ---------------------------------------------------------------------------
// stickelberger and verify-thm13
// ---------------------------------------------------------------------------

/// Resolved places of a job.
struct Places {
    s: Vec<Place>,
    t: Vec<Place>,
    t_alt: Vec<Place>,
    exceptional: Vec<Place>,
}

fn resolve_places(cfg: &JobConfig, ext: &Extension, flags: &Flags) -> Result<Places, ConfigError> {
    let s = ext.resolve(&cfg.places.s, "places.S")?;
    let t = ext.resolve(&cfg.places.t, "places.T")?;
    let t_alt = ext.resolve(&cfg.places.t_alt, "places.T_alt")?;
    if t.iter().chain(&t_alt).any(|v| s.contains(v)) {
        return Err(ConfigError::new("places.T", Error::TMeetsS.to_string()));
    }
    let exceptional = match &cfg.places.exceptional {
        None => s.clone(),
        Some(list) => {
            let e = ext.resolve(list, "places.exceptional")?;
            if let Some(v) = e.iter().find(|v| !s.contains(v)) {
                return Err(ConfigError::new("places.exceptional", format!("{v} is not in S")));
            }
            e
        }
    };
    if flags.gcd_trick {
        if t_alt.is_empty() {
            return Err(ConfigError::new("places.T_alt", "required by --gcd-trick"));
        }
        let chars = |vs: &[Place]| vs.iter().filter_map(|v| v.residue_characteristic()).collect::<BTreeSet<_>>();
        if !chars(&t).is_disjoint(&chars(&t_alt)) || t.is_empty() {
            return Err(ConfigError::new(
                "places.T_alt",
                "--gcd-trick needs nonempty T and T_alt with disjoint residue characteristics",
            ));
        }
    }
    Ok(Places { s, t, t_alt, exceptional })
}

fn shape(i: &GroupRingIdeal) -> IdealShape {
    if i.is_zero() {
        IdealShape::Zero
    } else if i.index().is_some_and(|n| n == 1.into()) {
        IdealShape::Whole
    } else {
        IdealShape::Proper
    }
}

fn residue_chars(vs: &[Place]) -> BTreeSet<u64> {
    vs.iter().filter_map(|v| v.residue_characteristic()).collect()
}

fn member(ideal: &GroupRingIdeal, x: &GroupRingElem, allowance: &BTreeSet<u64>) -> Result<bool, Error> {
    match ideal.contains(x, allowance) {
        Err(Error::NonIntegralOutsideAllowance) => Ok(false),
        other => other,
    }
}

fn injectivity_str(i: Injectivity) -> &'static str {
    match i {
        Injectivity::Proven => "proven",
        Injectivity::Unknown => "unknown",
    }
}

fn side_str(side: FrobeniusSide) -> &'static str {
    match side {
        FrobeniusSide::Inverse => "inverse",
        FrobeniusSide::Direct => "direct",
    }
}

fn stick_case<E: AbelianExtension>(ext: &E, p: &Places, k: u32) -> Result<Value, Error> {
    let theta_s = stickelberger(ext, &p.s, k)?;
    let delta = delta_t(ext, &p.t, k)?;
    let theta_st = smooth(&theta_s, ext, &p.s, &p.t, k)?;
    Ok(json!({
        "k": k,
        "theta_s": report::elem(&theta_s),
        "delta_t": report::elem(&delta),
        "theta_st": report::elem(&theta_st),
        "integral": theta_st.is_integral(),
        "injectivity": injectivity_str(injectivity_check(&p.t, k, ext.base_degree())),
    }))
}

/// One `k` of `verify-thm13`: the record and whether an asserted check failed.
fn verify_case<E: AbelianExtension>(
    ext: &E,
    p: &Places,
    k: u32,
    side: FrobeniusSide,
    flags: &Flags,
) -> Result<(Value, bool), Error> {
    let none = BTreeSet::new();
    let theta_s = stickelberger(ext, &p.s, k)?;
    let theta_st = smooth(&theta_s, ext, &p.s, &p.t, k)?;
    let injectivity = injectivity_check(&p.t, k, ext.base_degree());
    let integral = theta_st.is_integral();
    let mut all_member = integral;
    let mut memberships = Vec::new();
    for v in &p.exceptional {
        let asserted = theorem_ideal_with(ext, &p.s, v, k, side)?;
        let inverse = theorem_ideal_with(ext, &p.s, v, k, FrobeniusSide::Inverse)?;
        let direct = theorem_ideal_with(ext, &p.s, v, k, FrobeniusSide::Direct)?;
        let m = integral && member(&asserted, &theta_st, &none)?;
        all_member &= m;
        memberships.push(json!({
            "place": v.to_string(),
            "ideal": shape(&asserted).as_str(),
            "member": m,
            "member_inverse": integral && member(&inverse, &theta_st, &none)?,
            "member_direct": integral && member(&direct, &theta_st, &none)?,
        }));
    }
    let mut record = json!({
        "k": k,
        "theta_s": report::elem(&theta_s),
        "theta_st": report::elem(&theta_st),
        "integral": integral,
        "injectivity": injectivity_str(injectivity),
        "memberships": memberships,
    });
    let mut passes = all_member;
    if flags.gcd_trick {
        let variants = [("T", &p.t), ("T_alt", &p.t_alt)];
        let mut per_place = Vec::new();
        let mut elems = Vec::new();
        for (_, t) in variants {
            elems.push((smooth(&theta_s, ext, &p.s, t, k)?, residue_chars(t)));
        }
        for v in &p.exceptional {
            let ideal = theorem_ideal_with(ext, &p.s, v, k, side)?;
            let mut entry = serde_json::Map::new();
            let mut combined = true;
            for ((name, _), (x, allowance)) in variants.iter().zip(&elems) {
                let ok = member(&ideal, x, allowance)?;
                combined &= ok;
                entry.insert(format!("localized_{name}"), json!(ok));
            }
            entry.insert("place".into(), json!(v.to_string()));
            entry.insert("combined".into(), json!(combined));
            passes &= combined;
            per_place.push(Value::Object(entry));
        }
        record["gcd_trick"] = json!({
            "T_alt": report::places(&p.t_alt),
            "theta_st_alt": report::elem(&elems[1].0),
            "memberships": per_place,
        });
    }
    if flags.experimental_arch_p {
        let mut arch = Vec::new();
        for v in ext.infinite_places() {
            let ideal = theorem_ideal_with(ext, &p.s, &v, k, side)?;
            arch.push(json!({
                "place": v.to_string(),
                "ideal": shape(&ideal).as_str(),
                "member": integral && member(&ideal, &theta_st, &none)?,
            }));
        }
        record["experimental_archimedean"] = Value::Array(arch);
    }
    let status = match injectivity {
        Injectivity::Unknown => "unknown-injectivity",
        Injectivity::Proven if passes => "pass",
        Injectivity::Proven => "fail",
    };
    record["status"] = json!(status);
    Ok((record, status == "fail"))
}

fn places_echo(p: &Places) -> Value {
    json!({
        "S": report::places(&p.s),
        "T": report::places(&p.t),
        "exceptional": p.exceptional.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    })
}

fn run_per_k<F>(ks: &[u32], f: F) -> Vec<(u32, Result<(Value, bool), Error>)>
where
    F: Fn(u32) -> Result<(Value, bool), Error> + Sync,
{
    ks.par_iter().map(|&k| (k, f(k))).collect()
}

fn collect(outcome: &mut Outcome, runs: Vec<(u32, Result<(Value, bool), Error>)>) -> (Vec<Value>, Value) {
    let (mut pass, mut fail, mut unknown, mut errors) = (0, 0, 0, 0);
    let mut records = Vec::new();
    for (k, r) in runs {
        match r {
            Ok((rec, failed)) => {
                match rec.get("status").and_then(Value::as_str) {
                    Some("pass") => pass += 1,
                    Some("fail") => fail += 1,
                    Some(_) => unknown += 1,
                    None => {}
                }
                outcome.failed |= failed;
                records.push(rec);
            }
            Err(e) => {
                errors += 1;
                outcome.absorb(&e);
                records.push(error_record(k, &e));
            }
        }
    }
    (records, json!({ "pass": pass, "fail": fail, "unknown_injectivity": unknown, "errors": errors }))
}

pub fn stickelberger_cmd(cfg: &JobConfig, flags: &Flags) -> Result<Outcome, CommandError> {
    let ext = cfg.field()?.extension()?;
    let places = resolve_places(cfg, &ext, flags)?;
    let ks = cfg.k_values()?;
    let runs = match &ext {
        Extension::Rational(e) => run_per_k(&ks, |k| stick_case(e, &places, k).map(|v| (v, false))),
        Extension::Quadratic(e) => run_per_k(&ks, |k| stick_case(e, &places, k).map(|v| (v, false))),
    };
    let mut outcome = Outcome::default();
    let (records, _) = collect(&mut outcome, runs);
    let mut out = base_report("stickelberger", flags);
    out.insert("extension".into(), extension_echo(&ext));
    out.insert("places".into(), places_echo(&places));
    out.insert("results".into(), Value::Array(records));
    outcome.report = Value::Object(out);
    Ok(outcome)
}

pub fn verify_thm13(cfg: &JobConfig, flags: &Flags) -> Result<Outcome, CommandError> {
    let flags = Flags {
        gcd_trick: flags.gcd_trick || cfg.options.gcd_trick.unwrap_or(false),
        experimental_arch_p: flags.experimental_arch_p || cfg.options.experimental_arch_p.unwrap_or(false),
        ..flags.clone()
    };
    let ext = cfg.field()?.extension()?;
    let places = resolve_places(cfg, &ext, &flags)?;
    let ks = cfg.k_values()?;
    let side = cfg.frobenius_side()?;
    let runs = match &ext {
        Extension::Rational(e) => run_per_k(&ks, |k| verify_case(e, &places, k, side, &flags)),
        Extension::Quadratic(e) => run_per_k(&ks, |k| verify_case(e, &places, k, side, &flags)),
    };
    let mut outcome = Outcome::default();
    let (records, summary) = collect(&mut outcome, runs);
    let mut out = base_report("verify-thm13", &flags);
    out.insert("extension".into(), extension_echo(&ext));
    out.insert("places".into(), places_echo(&places));
    out.insert("frobenius_side".into(), json!(side_str(side)));
    out.insert("gcd_trick".into(), json!(flags.gcd_trick));
    out.insert("experimental_arch_p".into(), json!(flags.experimental_arch_p));
    out.insert("results".into(), Value::Array(records));
    out.insert("summary".into(), summary);
    outcome.report = Value::Object(out);
    Ok(outcome)
}
