//! Scenario files and check orchestration.
//!
//! A scenario bundles a braiding datum, grading-group generators, a finite
//! support, a list of named checks, and optional growth/cocycle/mutation
//! configuration. Reports are deterministic given the scenario: identical
//! bytes apart from the timing block.

use std::collections::BTreeMap;
use std::sync::Mutex;

use serde_json::{json, Map, Value};

use hopfgamma::check::CheckReport;
use hopfgamma::error::Error;
use hopfgamma::graded::{bicharacter_cocycle, GradedSystem, Mutation};
use hopfgamma::growth::{
    ball_growth, classify_growth, commutation_certificate, verdicts, BorelElement, GrowthReport,
};
use hopfgamma::hopf::{is_semisimple, CocycleData, HopfData};
use hopfgamma::qls::{build_fiber, Character, QlsDatum};
use hopfgamma::scalar::CycloScalar;

pub const SUPPORTED_CHECKS: &[&str] = &[
    "validate",
    "uniformity",
    "strong_grading",
    "exact_sequence",
    "coradical",
    "cosemisimple",
    "normality",
    "coherence",
    "cocentral",
    "materialize",
    "growth",
    "twist",
];

pub struct Scenario {
    pub datum: QlsDatum,
    pub gamma_generators: Vec<Character>,
    pub support: Vec<Character>,
    pub checks: Vec<String>,
    pub growth: GrowthConfig,
    pub cocycle: Option<Value>,
    pub mutation: Option<Mutation>,
    pub output: Option<String>,
    pub echo: Value,
}

#[derive(Clone, Copy)]
pub struct GrowthConfig {
    pub n_max: usize,
    pub budget_mb: usize,
    pub search_bound: usize,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            n_max: 12,
            budget_mb: 512,
            search_bound: 10,
        }
    }
}

/// Outcome classes used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    AllPassed,
    CheckFailed,
    SchemaError,
    InternalError,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::AllPassed => 0,
            Outcome::CheckFailed => 1,
            Outcome::SchemaError => 2,
            Outcome::InternalError => 3,
        }
    }
}

impl Scenario {
    pub fn from_json(v: &Value) -> Result<Scenario, Error> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::ParseError("scenario must be a JSON object".into()))?;
        let datum_val = obj
            .get("datum")
            .ok_or_else(|| Error::ParseError("scenario missing 'datum'".into()))?;
        let datum: QlsDatum = serde_json::from_value(datum_val.clone())
            .map_err(|e| Error::ParseError(format!("bad datum: {e}")))?;
        let parse_chars = |key: &str| -> Result<Vec<Character>, Error> {
            match obj.get(key) {
                None => Ok(vec![]),
                Some(Value::Array(a)) => a.iter().map(|c| datum.character_from_json(c)).collect(),
                Some(_) => Err(Error::ParseError(format!("'{key}' must be a list"))),
            }
        };
        let gamma_generators = parse_chars("gamma_generators")?;
        let mut support = parse_chars("support")?;
        if support.is_empty() {
            support = default_support(&datum, &gamma_generators)?;
        }
        let checks: Vec<String> = match obj.get("checks") {
            None => default_checks(obj),
            Some(Value::Array(a)) => a
                .iter()
                .map(|c| {
                    c.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| Error::ParseError("check names are strings".into()))
                })
                .collect::<Result<_, _>>()?,
            Some(_) => return Err(Error::ParseError("'checks' must be a list".into())),
        };
        for c in &checks {
            if !SUPPORTED_CHECKS.contains(&c.as_str()) {
                return Err(Error::ParseError(format!(
                    "unsupported check '{c}' (supported: {SUPPORTED_CHECKS:?})"
                )));
            }
        }
        let mut growth = GrowthConfig::default();
        if let Some(g) = obj.get("growth") {
            let g = g
                .as_object()
                .ok_or_else(|| Error::ParseError("'growth' must be an object".into()))?;
            if let Some(n) = g.get("n_max").and_then(Value::as_u64) {
                growth.n_max = n as usize;
            }
            if let Some(b) = g.get("budget_mb").and_then(Value::as_u64) {
                growth.budget_mb = b as usize;
            }
            if let Some(s) = g.get("search_bound").and_then(Value::as_u64) {
                growth.search_bound = s as usize;
            }
        }
        if let Ok(env_cap) = std::env::var("HFLAB_BUDGET_MB") {
            if let Ok(cap) = env_cap.parse::<usize>() {
                growth.budget_mb = growth.budget_mb.min(cap);
            }
        }
        let mutation = match obj.get("mutation") {
            None | Some(Value::Null) => None,
            Some(m) => Some(
                serde_json::from_value(m.clone())
                    .map_err(|e| Error::ParseError(format!("bad mutation: {e}")))?,
            ),
        };
        Ok(Scenario {
            datum,
            gamma_generators,
            support,
            checks,
            growth,
            cocycle: obj.get("cocycle").cloned().filter(|c| !c.is_null()),
            mutation,
            output: obj
                .get("output")
                .and_then(Value::as_str)
                .map(str::to_string),
            echo: v.clone(),
        })
    }

    pub fn system(&self) -> Result<GradedSystem, Error> {
        Ok(GradedSystem::new(self.datum.clone(), self.gamma_generators.clone())?
            .with_mutation(self.mutation.filter(|m| *m != Mutation::BreakCocycle)))
    }

    pub fn build_cocycle(&self, h_eps: &HopfData) -> Result<CocycleData, Error> {
        let mut sigma = match &self.cocycle {
            None => CocycleData::trivial(h_eps),
            Some(spec) => {
                let obj = spec
                    .as_object()
                    .ok_or_else(|| Error::ParseError("'cocycle' must be an object".into()))?;
                match obj.get("type").and_then(Value::as_str) {
                    Some("trivial") | None => CocycleData::trivial(h_eps),
                    Some("bicharacter") => {
                        let exps: Vec<Vec<i64>> = serde_json::from_value(
                            obj.get("exponents")
                                .cloned()
                                .ok_or_else(|| {
                                    Error::ParseError("bicharacter cocycle needs 'exponents'".into())
                                })?,
                        )
                        .map_err(|e| Error::ParseError(format!("bad bicharacter grid: {e}")))?;
                        bicharacter_cocycle(&self.datum, h_eps, &exps)?
                    }
                    Some(other) => {
                        return Err(Error::ParseError(format!("unknown cocycle type '{other}'")))
                    }
                }
            }
        };
        if self.mutation == Some(Mutation::BreakCocycle) {
            let d = h_eps.dim;
            let v = sigma.values.get(d - 1, d - 1).clone();
            sigma
                .values
                .set(d - 1, d - 1, v.add(&CycloScalar::one(h_eps.conductor)));
        }
        Ok(sigma)
    }
}

fn default_support(
    datum: &QlsDatum,
    gens: &[Character],
) -> Result<Vec<Character>, Error> {
    let mut out = vec![datum.char_identity()];
    for g in gens {
        out.push(g.clone());
        out.push(datum.char_inv(g)?);
        out.push(datum.char_mul(g, g)?);
    }
    for (i, a) in gens.iter().enumerate() {
        for b in gens.iter().skip(i + 1) {
            out.push(datum.char_mul(a, b)?);
        }
    }
    Ok(out)
}

fn default_checks(obj: &Map<String, Value>) -> Vec<String> {
    let mut checks = vec![
        "validate".to_string(),
        "uniformity".to_string(),
        "strong_grading".to_string(),
        "exact_sequence".to_string(),
        "coradical".to_string(),
        "cosemisimple".to_string(),
        "normality".to_string(),
        "coherence".to_string(),
        "cocentral".to_string(),
    ];
    if obj.contains_key("growth") {
        checks.push("growth".to_string());
    }
    if obj.contains_key("cocycle") {
        checks.push("twist".to_string());
    }
    checks
}

/// Deterministic small-integer sequence for the uniformity probe.
struct Lcg(u64);

impl Lcg {
    fn next_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let span = (hi - lo + 1) as u64;
        lo + ((self.0 >> 33) % span) as i64
    }
}

pub struct RunResult {
    pub report: Value,
    pub outcome: Outcome,
    pub summary: Vec<String>,
}

/// Execute the scenario's checks in declared order. `only` restricts to a
/// subset (for the single-purpose subcommands); `jobs` bounds worker threads.
pub fn run_scenario(
    scenario: &Scenario,
    only: Option<&[&str]>,
    jobs: usize,
) -> Result<RunResult, Error> {
    let started = std::time::Instant::now();
    let mut results: Vec<(String, CheckReport)> = Vec::new();
    let mut growth_section: Option<GrowthReport> = None;

    // validation always runs first; a failing datum aborts the run
    let validation = scenario.datum.validate();
    let datum_ok = validation.all_passed();
    let selected: Vec<String> = scenario
        .checks
        .iter()
        .filter(|c| only.map(|o| o.contains(&c.as_str())).unwrap_or(true))
        .cloned()
        .collect();
    if selected.iter().any(|c| c == "validate") || !datum_ok {
        results.push(("validate".into(), validation));
    }

    if datum_ok {
        let sys = scenario.system()?;
        let support = scenario.support.clone();
        let gens = scenario.gamma_generators.clone();
        let pairs: Vec<(Character, Character)> = support
            .iter()
            .flat_map(|a| support.iter().map(move |b| (a.clone(), b.clone())))
            .collect();

        // closures per check, executed possibly on a small thread pool but
        // always merged in declared order
        type CheckFn<'a> = Box<dyn FnOnce() -> Result<CheckReport, Error> + Send + 'a>;
        let growth_slot: Mutex<Option<GrowthReport>> = Mutex::new(None);
        let mut tasks: Vec<(String, CheckFn)> = Vec::new();
        for check in &selected {
            match check.as_str() {
                "validate" => {}
                "uniformity" => {
                    let datum = scenario.datum.clone();
                    tasks.push((
                        check.clone(),
                        Box::new(move || {
                            let mut report = CheckReport::new();
                            let expected = datum.fiber_dim();
                            let mut rng = Lcg(0x5eed);
                            let mut dims = Vec::new();
                            for _ in 0..20 {
                                let t: Vec<CycloScalar> = (0..datum.theta())
                                    .map(|_| {
                                        let mut v = rng.next_in(-5, 5);
                                        if v == 0 {
                                            v = 7;
                                        }
                                        CycloScalar::from_int(datum.conductor(), v)
                                    })
                                    .collect();
                                let s: Vec<CycloScalar> = if datum.is_group_only() {
                                    vec![]
                                } else {
                                    (0..datum.theta())
                                        .map(|_| {
                                            CycloScalar::from_int(
                                                datum.conductor(),
                                                rng.next_in(-5, 5),
                                            )
                                        })
                                        .collect()
                                };
                                let kappa = datum.character(t, s)?;
                                let fiber = build_fiber(&datum, &kappa)?;
                                dims.push(fiber.hopf.dim);
                            }
                            let pass = dims.iter().all(|&d| d == expected);
                            report.push_with_evidence(
                                "fiber_dimension_uniform",
                                pass,
                                format!("20 sampled characters, dimension {expected}"),
                                json!({"expected": expected, "dims": dims}),
                            );
                            Ok(report)
                        }),
                    ));
                }
                "strong_grading" => {
                    let sys = &sys;
                    let pairs = pairs.clone();
                    tasks.push((
                        check.clone(),
                        Box::new(move || sys.verify_strong_grading(&pairs)),
                    ));
                }
                "exact_sequence" => {
                    let sys = &sys;
                    let support = support.clone();
                    tasks.push((
                        check.clone(),
                        Box::new(move || sys.verify_exact_sequence(&support)),
                    ));
                }
                "coradical" => {
                    let sys = &sys;
                    let support = support.clone();
                    tasks.push((
                        check.clone(),
                        Box::new(move || sys.verify_coradical(&support)),
                    ));
                }
                "cosemisimple" => {
                    let sys = &sys;
                    let support = support.clone();
                    tasks.push((
                        check.clone(),
                        Box::new(move || {
                            let (_, report) = sys.cosemisimplicity_verdict(&support)?;
                            Ok(report)
                        }),
                    ));
                }
                "normality" => {
                    let sys = &sys;
                    let support = support.clone();
                    tasks.push((
                        check.clone(),
                        Box::new(move || sys.normality_check(&support)),
                    ));
                }
                "coherence" => {
                    let sys = &sys;
                    let mut chars = vec![scenario.datum.char_identity()];
                    for g in &gens {
                        chars.push(g.clone());
                        chars.push(scenario.datum.char_inv(g)?);
                    }
                    tasks.push((
                        check.clone(),
                        Box::new(move || sys.verify_coherence(&chars)),
                    ));
                }
                "cocentral" => {
                    let sys = &sys;
                    let support = support.clone();
                    tasks.push((
                        check.clone(),
                        Box::new(move || sys.verify_cocentrality(&support)),
                    ));
                }
                "materialize" => {
                    let sys = &sys;
                    tasks.push((
                        check.clone(),
                        Box::new(move || {
                            let mut report = CheckReport::new();
                            match sys.enumerate_group(4096)? {
                                None => {
                                    report.push(
                                        "finite_group",
                                        false,
                                        "grading group not finite within cap 4096",
                                    );
                                }
                                Some(group) => {
                                    let h = sys.materialize(4096)?;
                                    let axioms = h.verify_hopf();
                                    let pass = axioms.all_passed();
                                    report.push_with_evidence(
                                        "materialized_hopf_axioms",
                                        pass,
                                        format!(
                                            "group order {}, total dimension {}",
                                            group.len(),
                                            h.dim
                                        ),
                                        json!({"group_order": group.len(), "dim": h.dim}),
                                    );
                                }
                            }
                            Ok(report)
                        }),
                    ));
                }
                "growth" => {
                    let datum = scenario.datum.clone();
                    let gens = gens.clone();
                    let cfg = scenario.growth;
                    let growth_slot = &growth_slot;
                    tasks.push((
                        check.clone(),
                        Box::new(move || {
                            let mut report = CheckReport::new();
                            if gens.is_empty() {
                                report.push("growth", false, "no generators supplied");
                                return Ok(report);
                            }
                            let borel: Vec<BorelElement> = gens
                                .iter()
                                .map(|k| BorelElement::from_character(k, datum.conductor()))
                                .collect();
                            let sizes = match ball_growth(&borel, cfg.n_max, cfg.budget_mb) {
                                Ok(s) => s,
                                Err(Error::BudgetExceeded { completed, partial }) => {
                                    report.push(
                                        "growth",
                                        false,
                                        format!(
                                            "memory budget exceeded after radius {completed}; partial sizes {partial:?}"
                                        ),
                                    );
                                    return Ok(report);
                                }
                                Err(e) => return Err(e),
                            };
                            let (classification, diagnostics) = classify_growth(&sizes)?;
                            let certificate =
                                commutation_certificate(&borel, cfg.search_bound)?;
                            let h_eps =
                                build_fiber(&datum, &datum.char_identity())?.hopf;
                            let (ss, _) = is_semisimple(&h_eps)?;
                            let verdict_block =
                                verdicts(classification, certificate, ss, &sizes);
                            let growth_report = GrowthReport {
                                ball_sizes: sizes,
                                classification,
                                diagnostics,
                                verdicts: verdict_block,
                            };
                            report.push_with_evidence(
                                "growth_computed",
                                true,
                                format!("{classification:?}"),
                                serde_json::to_value(&growth_report).unwrap_or(Value::Null),
                            );
                            *growth_slot.lock().unwrap() = Some(growth_report);
                            Ok(report)
                        }),
                    ));
                }
                "twist" => {
                    let sys = &sys;
                    let scenario_ref = scenario;
                    let support = support.clone();
                    let pairs = pairs.clone();
                    let gens = gens.clone();
                    tasks.push((
                        check.clone(),
                        Box::new(move || {
                            let mut report = CheckReport::new();
                            let h_eps = build_fiber(
                                &scenario_ref.datum,
                                &scenario_ref.datum.char_identity(),
                            )?
                            .hopf;
                            let sigma = scenario_ref.build_cocycle(&h_eps)?;
                            let validation = sigma.validate(&h_eps);
                            let valid = validation.all_passed();
                            report.absorb("cocycle", validation);
                            if !valid {
                                return Ok(report);
                            }
                            let twisted = sys.twisted(sigma)?;
                            // route equality is asserted inside component
                            // construction; record it explicitly
                            for kappa in &support {
                                twisted.component(kappa)?;
                            }
                            report.push(
                                "routes_agree",
                                true,
                                "twisted-fiber and twisted-component routes match on the support",
                            );
                            report.absorb(
                                "strong_grading",
                                twisted.verify_strong_grading(&pairs)?,
                            );
                            report.absorb(
                                "exact_sequence",
                                twisted.verify_exact_sequence(&support)?,
                            );
                            let mut chars =
                                vec![scenario_ref.datum.char_identity()];
                            for g in &gens {
                                chars.push(g.clone());
                                chars.push(scenario_ref.datum.char_inv(g)?);
                            }
                            report.absorb("coherence", twisted.verify_coherence(&chars)?);
                            Ok(report)
                        }),
                    ));
                }
                other => {
                    return Err(Error::ParseError(format!("unsupported check '{other}'")));
                }
            }
        }

        // run tasks, preserving declared order in the merged report
        let names: Vec<String> = tasks.iter().map(|(n, _)| n.clone()).collect();
        if jobs <= 1 {
            for (name, f) in tasks {
                let outcome = f()?;
                results.push((name, outcome));
            }
        } else {
            let slot_refs: Vec<Mutex<Option<Result<CheckReport, Error>>>> =
                (0..names.len()).map(|_| Mutex::new(None)).collect();
            let work: Mutex<Vec<(usize, CheckFn)>> = Mutex::new(
                tasks
                    .into_iter()
                    .enumerate()
                    .map(|(i, (_, f))| (i, f))
                    .collect(),
            );
            std::thread::scope(|scope| {
                for _ in 0..jobs {
                    scope.spawn(|| loop {
                        let item = work.lock().unwrap().pop();
                        match item {
                            Some((i, f)) => {
                                *slot_refs[i].lock().unwrap() = Some(f());
                            }
                            None => break,
                        }
                    });
                }
            });
            for (i, name) in names.into_iter().enumerate() {
                let outcome = slot_refs[i].lock().unwrap().take().unwrap()?;
                results.push((name, outcome));
            }
        }
        growth_section = growth_slot.into_inner().unwrap();
    }

    let all_passed = results.iter().all(|(_, r)| r.all_passed());
    let mut summary = Vec::new();
    for (name, report) in &results {
        for e in &report.entries {
            summary.push(format!(
                "{} {}.{} {}",
                if e.passed { "PASS" } else { "FAIL" },
                name,
                e.name,
                e.detail
            ));
        }
    }

    let mut checks_json = Vec::new();
    for (name, report) in &results {
        for e in &report.entries {
            let mut entry = Map::new();
            entry.insert("name".into(), json!(format!("{name}.{}", e.name)));
            entry.insert(
                "status".into(),
                json!(if e.passed { "pass" } else { "fail" }),
            );
            if !e.detail.is_empty() {
                entry.insert("detail".into(), json!(e.detail));
            }
            if !e.evidence.is_null() {
                entry.insert("evidence".into(), e.evidence.clone());
            }
            checks_json.push(Value::Object(entry));
        }
    }
    let mut report = Map::new();
    report.insert("scenario".into(), scenario.echo.clone());
    report.insert("results".into(), Value::Array(checks_json));
    if let Some(g) = &growth_section {
        report.insert(
            "growth".into(),
            serde_json::to_value(g).unwrap_or(Value::Null),
        );
    }
    let versions: BTreeMap<&str, &str> = [
        ("hflab", env!("CARGO_PKG_VERSION")),
        ("hopfgamma", env!("CARGO_PKG_VERSION")),
    ]
    .into();
    report.insert(
        "versions".into(),
        serde_json::to_value(versions).unwrap(),
    );
    report.insert(
        "timing".into(),
        json!({"total_ms": started.elapsed().as_millis() as u64}),
    );

    Ok(RunResult {
        report: Value::Object(report),
        outcome: if all_passed {
            Outcome::AllPassed
        } else {
            Outcome::CheckFailed
        },
        summary,
    })
}
