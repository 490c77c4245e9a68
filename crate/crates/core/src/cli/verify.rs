//! Batch verification over `(D, f)` grids and the JSON report format.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::functor::{functor_on_class, FunctorReport};
use crate::lattices::squarefree_radicands;
use crate::modgroup::{lemma1_harness, verify_lemma4, IndexReport, Lemma1Report, MAX_LEVEL};

pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_D: u64 = 100;
pub const MAX_F: u64 = 10;
pub const MAX_K: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Lemma1,
    Lemma3,
    Lemma4,
    Theorem1,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma1" => Ok(Self::Lemma1),
            "lemma3" => Ok(Self::Lemma3),
            "lemma4" => Ok(Self::Lemma4),
            "theorem1" => Ok(Self::Theorem1),
            _ => Err(Error::Parse(format!("unknown target {s:?}"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Lemma1 => "lemma1",
            Self::Lemma3 => "lemma3",
            Self::Lemma4 => "lemma4",
            Self::Theorem1 => "theorem1",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "D_max")]
    pub d_max: u64,
    pub f_max: u64,
    pub k_max: u32,
    /// Norm search bound; `None` uses the per-conductor default.
    pub bound: Option<u64>,
    #[serde(rename = "N_max")]
    pub n_max: u32,
    /// Explicit `(D, f)` points replacing the `D_max` x `f_max` rectangle.
    pub points: Option<Vec<(u64, u64)>>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            d_max: 30,
            f_max: 3,
            k_max: 64,
            bound: None,
            n_max: 15,
            points: None,
        }
    }
}

fn exceeded(what: &'static str, value: impl ToString, range: &str) -> Error {
    Error::BoundExceeded {
        what,
        value: value.to_string(),
        range: range.to_string(),
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_D).contains(&self.d_max) {
            return Err(exceeded("D_max", self.d_max, &format!("2..={MAX_D}")));
        }
        if !(1..=MAX_F).contains(&self.f_max) {
            return Err(exceeded("f_max", self.f_max, &format!("1..={MAX_F}")));
        }
        if !(1..=MAX_K).contains(&self.k_max) {
            return Err(exceeded("k_max", self.k_max, &format!("1..={MAX_K}")));
        }
        if !(2..=MAX_LEVEL).contains(&self.n_max) {
            return Err(exceeded("N_max", self.n_max, &format!("2..={MAX_LEVEL}")));
        }
        for &(d, f) in self.points.iter().flatten() {
            if !(2..=MAX_D).contains(&d) {
                return Err(exceeded("D", d, &format!("2..={MAX_D}")));
            }
            if !crate::quadnum::is_squarefree(&BigInt::from(d)) {
                return Err(Error::NonCanonicalRadicand(d.to_string()));
            }
            if !(1..=MAX_F).contains(&f) {
                return Err(exceeded("f", f, &format!("1..={MAX_F}")));
            }
        }
        Ok(())
    }

    /// The `(D, f)` points of the grid, sorted.
    pub fn class_points(&self) -> Vec<(u64, u64)> {
        let mut points = match &self.points {
            Some(p) => p.clone(),
            None => squarefree_radicands(self.d_max)
                .into_iter()
                .flat_map(|d| (1..=self.f_max).map(move |f| (d, f)))
                .collect(),
        };
        points.sort_unstable();
        points.dedup();
        points
    }
}

/// Parses `"(2,1),(5,1)"`.
pub fn parse_grid(s: &str) -> Result<Vec<(u64, u64)>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let body = compact
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("grid {s:?} must look like (D,f),(D,f)")))?;
    body.split("),(")
        .map(|pair| {
            let (d, f) = pair
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("grid point {pair:?} is not D,f")))?;
            let num = |t: &str| {
                t.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad integer {t:?} in grid")))
            };
            Ok((num(d)?, num(f)?))
        })
        .collect()
}

/// One grid point. `D`/`f` are set for class targets, `N` for lemma4.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointResult {
    #[serde(rename = "D", skip_serializing_if = "Option::is_none", default)]
    pub d: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f: Option<u64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u32>,
    pub passed: bool,
    /// Names of asserted checks that failed.
    pub failures: Vec<String>,
    /// Observations kept in the report without affecting the exit code.
    pub recorded: Vec<String>,
    pub discrepancy: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lemma1: Option<Lemma1Report>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub functor: Option<FunctorReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lemma4: Option<IndexReport>,
}

impl PointResult {
    fn key(&self) -> (u64, u64, u32) {
        (
            self.d.unwrap_or(0),
            self.f.unwrap_or(0),
            self.n.unwrap_or(0),
        )
    }

    fn class(d: u64, f: u64) -> Self {
        Self {
            d: Some(d),
            f: Some(f),
            n: None,
            passed: true,
            failures: Vec::new(),
            recorded: Vec::new(),
            discrepancy: false,
            lemma1: None,
            functor: None,
            lemma4: None,
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.failures.is_empty();
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub points: usize,
    pub asserted_pass: usize,
    pub asserted_fail: usize,
    pub recorded: usize,
    pub discrepancy_flagged: usize,
}

impl Summary {
    pub fn of(points: &[PointResult]) -> Self {
        points.iter().fold(Self::default(), |mut s, p| {
            s.points += 1;
            if p.passed {
                s.asserted_pass += 1;
            } else {
                s.asserted_fail += 1;
            }
            s.recorded += p.recorded.len();
            s.discrepancy_flagged += usize::from(p.discrepancy);
            s
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub target: Target,
    pub grid: GridSpec,
    pub points: Vec<PointResult>,
    pub summary: Summary,
    pub duration_ms: u64,
}

impl VerificationReport {
    pub fn passes(&self) -> bool {
        self.summary.asserted_fail == 0
    }

    /// Re-derives every point from the library and compares it with what the
    /// report claims, including the summary counts.
    pub fn recheck(&self) -> std::result::Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema_version {}",
                self.schema_version
            ));
        }
        let cache = Lemma4Cache::default();
        for point in &self.points {
            if let Some(l1) = &point.lemma1 {
                l1.recheck()?;
            }
            if let Some(fr) = &point.functor {
                fr.recheck()?;
            }
            if let Some(ix) = &point.lemma4 {
                let fresh = cache.get(ix.n).map_err(|e| e.to_string())?;
                if &fresh != ix {
                    return Err(format!("index report for N = {} does not recompute", ix.n));
                }
            }
            let fresh = evaluate_point(self.target, &self.grid, point.key(), &cache)
                .map_err(|e| e.to_string())?;
            if &fresh != point {
                return Err(format!("point {:?} does not recompute", point.key()));
            }
        }
        if Summary::of(&self.points) != self.summary {
            return Err("summary counts do not match the points".into());
        }
        Ok(())
    }

    /// The report with its one nondeterministic field cleared.
    pub fn without_duration(&self) -> Self {
        Self {
            duration_ms: 0,
            ..self.clone()
        }
    }
}

#[derive(Default)]
struct Lemma4Cache {
    reports: std::sync::Mutex<BTreeMap<u32, IndexReport>>,
}

impl Lemma4Cache {
    fn get(&self, n: u32) -> Result<IndexReport> {
        if let Some(r) = self.reports.lock().expect("cache lock").get(&n) {
            return Ok(r.clone());
        }
        let report = verify_lemma4(&BigInt::from(n))?;
        self.reports
            .lock()
            .expect("cache lock")
            .insert(n, report.clone());
        Ok(report)
    }
}

fn lemma1_point(point: &mut PointResult, d: &BigInt, f: &BigInt, k_max: u32) -> Result<()> {
    let report = lemma1_harness(d, f, k_max)?;
    if !report.hyperbolic {
        point.failures.push("lemma1.stabilizer_hyperbolic".into());
    }
    if !report.fixed_points_are_theta_pair {
        point
            .failures
            .push("lemma1.fixed_points_are_theta_pair".into());
    }
    if !report
        .memberships
        .iter()
        .all(|m| m.contains && m.z1.is_some() && m.z2.is_some())
    {
        point.failures.push("lemma1.fixed_points_in_lattice".into());
    }
    if !report.powers.iter().all(|p| p.fixes_fixed_points) {
        point.failures.push("lemma1.powers_fix_fixed_points".into());
    }
    point.recorded.push(match report.minimal_power {
        Some(k) => format!("lemma1.minimal_power = {k}"),
        None => format!("lemma1.minimal_power not found for k <= {k_max}"),
    });
    point.lemma1 = Some(report);
    Ok(())
}

fn functor_point(
    point: &mut PointResult,
    d: &BigInt,
    f: &BigInt,
    bound: Option<u64>,
) -> Result<()> {
    let bound = bound.map(BigInt::from);
    let report = functor_on_class(d, f, bound.as_ref())?;
    for (name, ok) in report.assertions() {
        if !ok {
            point.failures.push(format!("lemma3.{name}"));
        }
    }
    if !report.minimizer_asserted() {
        point
            .recorded
            .push("lemma3.minimizer (case I, even f)".into());
    }
    if !report.agreement_asserted() {
        point.recorded.push(format!(
            "lemma3.recovered_order = {}",
            report
                .recovered_order
                .as_ref()
                .map_or("none".to_string(), ToString::to_string)
        ));
    }
    point.discrepancy = !report.discrepancies.is_empty();
    point.functor = Some(report);
    Ok(())
}

fn evaluate_point(
    target: Target,
    grid: &GridSpec,
    key: (u64, u64, u32),
    cache: &Lemma4Cache,
) -> Result<PointResult> {
    let (d, f, n) = key;
    if target == Target::Lemma4 {
        let report = cache.get(n)?;
        let mut point = PointResult {
            d: None,
            f: None,
            n: Some(n),
            ..PointResult::class(0, 0)
        };
        if !report.index_is_level() {
            point.failures.push("lemma4.index_is_N".into());
        }
        if report.group_order != report.formula_order {
            point.failures.push("lemma4.order_formula".into());
        }
        if !report.gamma1_image_closed || !report.gamma_image_normal {
            point.failures.push("lemma4.subgroup_structure".into());
        }
        if report.cover_degree != report.index {
            point.failures.push("lemma4.cover_degree".into());
        }
        point.lemma4 = Some(report);
        return Ok(point.finish());
    }

    let (bd, bf) = (BigInt::from(d), BigInt::from(f));
    let mut point = PointResult::class(d, f);
    match target {
        Target::Lemma1 => lemma1_point(&mut point, &bd, &bf, grid.k_max)?,
        Target::Lemma3 => functor_point(&mut point, &bd, &bf, grid.bound)?,
        Target::Theorem1 => {
            functor_point(&mut point, &bd, &bf, grid.bound)?;
            lemma1_point(&mut point, &bd, &bf, grid.k_max)?;
            let level = d * f;
            if level <= u64::from(MAX_LEVEL) {
                let report = cache.get(level as u32)?;
                if !report.passes() {
                    point.failures.push("lemma4.index_is_fD".into());
                }
                point.lemma4 = Some(report);
            } else {
                point
                    .recorded
                    .push(format!("lemma4 skipped: N = fD = {level} > {MAX_LEVEL}"));
            }
        }
        Target::Lemma4 => unreachable!(),
    }
    Ok(point.finish())
}

fn keys(target: Target, grid: &GridSpec) -> Vec<(u64, u64, u32)> {
    match target {
        Target::Lemma4 => (2..=grid.n_max).map(|n| (0, 0, n)).collect(),
        _ => grid
            .class_points()
            .into_iter()
            .map(|(d, f)| (d, f, 0))
            .collect(),
    }
}

/// Evaluates every grid point of `target`, in parallel on the current rayon
/// pool, and assembles the sorted report.
pub fn run_verification(target: Target, grid: &GridSpec) -> Result<VerificationReport> {
    grid.validate()?;
    let start = Instant::now();
    let cache = Lemma4Cache::default();
    let mut points = keys(target, grid)
        .into_par_iter()
        .map(|key| evaluate_point(target, grid, key, &cache))
        .collect::<Result<Vec<_>>>()?;
    points.sort_by_key(PointResult::key);
    let summary = Summary::of(&points);
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        target,
        grid: grid.clone(),
        points,
        summary,
        duration_ms: start.elapsed().as_millis() as u64,
    })
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            let joined = items.iter().map(scalar).collect::<Vec<_>>().join(" ");
            out.push((prefix.to_string(), joined));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// One CSV row per point, columns taken from the flattened JSON of the points.
pub fn csv_from_json(report: &Value) -> Result<String> {
    let points = report
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("report has no points array".into()))?;
    let rows: Vec<Vec<(String, String)>> = points
        .iter()
        .map(|p| {
            let mut row = Vec::new();
            flatten("", p, &mut row);
            row
        })
        .collect();
    let mut columns: Vec<String> = Vec::new();
    for (k, _) in rows.iter().flatten() {
        if !columns.contains(k) {
            columns.push(k.clone());
        }
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Parse(e.to_string());
    writer.write_record(&columns).map_err(io)?;
    for row in &rows {
        let lookup: BTreeMap<&str, &str> =
            row.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        writer
            .write_record(
                columns
                    .iter()
                    .map(|c| lookup.get(c.as_str()).copied().unwrap_or("")),
            )
            .map_err(io)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}
