//! Scenario documents and the computation behind each kind.

use std::cmp::Ordering;

use cxa_core::attention::{run_reallocation, AttentionModel, ChoiceProblem};
use cxa_core::axioms::{self, ActFamily, AxiomReport};
use cxa_core::contract::{compare, identities, likelihood_stat, solve_oracle, ContractProblem, ExactScheme, WageScheme};
use cxa_core::equilibrium::{solve_cace, solve_given_profile, standard_equilibrium, Economy, EquilibriumResult, SolverOptions};
use cxa_core::rational::{format_rational, serde_rational, serde_rational_vec, to_f64};
use cxa_core::updating::{classify_dynamics, ConditionalModel, Method};
use cxa_core::{Act, CarModel, Event, Partition, Rational};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{CsvTable, Report};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Eval,
    Update,
    Axioms,
    Contract,
    Attention,
    Equilibrium,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    kind: Kind,
    #[serde(default)]
    seed: u64,
    payload: serde_json::Value,
}

/// A parsed and validated scenario.
pub struct Scenario {
    pub kind: Kind,
    pub seed: u64,
    payload: Payload,
}

enum Payload {
    Eval(EvalDoc),
    Update(UpdateDoc),
    Axioms(AxiomsDoc),
    Contract(ContractDoc),
    Attention(AttentionDoc),
    Equilibrium(EquilibriumDoc),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedAct {
    name: String,
    payoffs: Act,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EvalDoc {
    model: CarModel,
    acts: Vec<NamedAct>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UpdateDoc {
    model: CarModel,
    acts: Vec<NamedAct>,
    event: Vec<usize>,
    #[serde(default)]
    method: MethodDoc,
}

#[derive(Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum MethodDoc {
    #[default]
    Auto,
    Attachment,
    Enumeration,
    SingleMerge,
}

impl From<MethodDoc> for Method {
    fn from(m: MethodDoc) -> Self {
        match m {
            MethodDoc::Auto => Method::Auto,
            MethodDoc::Attachment => Method::Attachment,
            MethodDoc::Enumeration => Method::Enumeration,
            MethodDoc::SingleMerge => Method::SingleMerge,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AxiomsDoc {
    model: CarModel,
    event: Vec<usize>,
    family: FamilyDoc,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum FamilyDoc {
    Random {
        count: usize,
        max_outcome: i64,
    },
    Explicit {
        acts: Vec<Act>,
        #[serde(default, with = "serde_rational_vec")]
        constants: Vec<Rational>,
        #[serde(default, with = "serde_rational_vec")]
        weights: Vec<Rational>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContractDoc {
    problem: ContractProblem,
    #[serde(default)]
    sweep: Option<SweepDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepDoc {
    #[serde(with = "serde_rational")]
    from: Rational,
    #[serde(with = "serde_rational")]
    to: Rational,
    steps: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AttentionDoc {
    model: CarModel,
    menu: Vec<NamedAct>,
    event: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EquilibriumDoc {
    economy: Economy,
    /// Profiles to solve directly, each a list of per-consumer partitions.
    #[serde(default)]
    profiles: Vec<Vec<Vec<Vec<usize>>>>,
    #[serde(default = "default_profile_cap")]
    profile_cap: usize,
}

fn default_profile_cap() -> usize {
    cxa_core::equilibrium::DEFAULT_PROFILE_CAP
}

fn typed<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Validation(format!("payload.{path}: {}", e.into_inner()))
    })
}

pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let env: Envelope = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Validation(format!("{path}: {}", e.into_inner()))
    })?;
    let payload = match env.kind {
        Kind::Eval => Payload::Eval(typed(env.payload)?),
        Kind::Update => Payload::Update(typed(env.payload)?),
        Kind::Axioms => Payload::Axioms(typed(env.payload)?),
        Kind::Contract => Payload::Contract(typed(env.payload)?),
        Kind::Attention => Payload::Attention(typed(env.payload)?),
        Kind::Equilibrium => Payload::Equilibrium(typed(env.payload)?),
    };
    let s = Scenario { kind: env.kind, seed: env.seed, payload };
    s.check()?;
    Ok(s)
}

fn event_of(n: usize, members: &[usize], field: &str) -> Result<Event, CliError> {
    Event::new(n, members.iter().copied()).map_err(|e| CliError::Validation(format!("payload.{field}: {e}")))
}

fn check_acts(n: usize, acts: &[NamedAct], field: &str) -> Result<(), CliError> {
    if acts.is_empty() {
        return Err(CliError::Validation(format!("payload.{field}: at least one act is required")));
    }
    for (i, a) in acts.iter().enumerate() {
        if a.payoffs.n() != n {
            return Err(CliError::Validation(format!(
                "payload.{field}[{i}].payoffs: expected {n} states, got {}",
                a.payoffs.n()
            )));
        }
    }
    Ok(())
}

impl Scenario {
    /// Cross-field checks that the schema alone cannot express.
    fn check(&self) -> Result<(), CliError> {
        match &self.payload {
            Payload::Eval(d) => check_acts(d.model.n(), &d.acts, "acts"),
            Payload::Update(d) => {
                check_acts(d.model.n(), &d.acts, "acts")?;
                event_of(d.model.n(), &d.event, "event").map(drop)
            }
            Payload::Axioms(d) => {
                event_of(d.model.n(), &d.event, "event")?;
                if let FamilyDoc::Explicit { acts, .. } = &d.family {
                    if let Some(a) = acts.iter().find(|a| a.n() != d.model.n()) {
                        return Err(CliError::Validation(format!(
                            "payload.family.explicit.acts: expected {} states, got {}",
                            d.model.n(),
                            a.n()
                        )));
                    }
                }
                Ok(())
            }
            Payload::Contract(d) => match &d.sweep {
                Some(s) if s.steps < 2 || s.from >= s.to || s.from <= Rational::from_integer(0.into()) => Err(
                    CliError::Validation("payload.sweep: need 0 < from < to and at least 2 steps".into()),
                ),
                _ => Ok(()),
            },
            Payload::Attention(d) => {
                check_acts(d.model.n(), &d.menu, "menu")?;
                event_of(d.model.n(), &d.event, "event")?;
                AttentionModel::from_model(d.model.clone()).map(drop).map_err(|e| CliError::Validation(format!("payload.model: {e}")))
            }
            Payload::Equilibrium(d) => {
                for (i, p) in d.profiles.iter().enumerate() {
                    profile_of(&d.economy, p).map_err(|e| CliError::Validation(format!("payload.profiles[{i}]: {e}")))?;
                }
                Ok(())
            }
        }
    }

    pub fn run(&self, opts: &RunOptions) -> Result<Report, CliError> {
        match &self.payload {
            Payload::Eval(d) => eval(d),
            Payload::Update(d) => update(d, opts),
            Payload::Axioms(d) => axioms_report(d, opts),
            Payload::Contract(d) => contract(d, opts),
            Payload::Attention(d) => attention(d, opts),
            Payload::Equilibrium(d) => equilibrium(d, opts),
        }
    }
}

pub struct RunOptions {
    pub seed: u64,
    pub cap: usize,
    pub tolerance: Option<f64>,
}

fn comp<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Computation(e.to_string())
}

fn show_act(a: &Act) -> String {
    format!("({})", a.payoffs().iter().map(format_rational).collect::<Vec<_>>().join(","))
}

fn show_vec(v: &[Rational]) -> String {
    format!("({})", v.iter().map(format_rational).collect::<Vec<_>>().join(","))
}

fn show_f64(v: &[f64]) -> String {
    format!("({})", v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(","))
}

fn ordering_word(o: Ordering) -> &'static str {
    match o {
        Ordering::Greater => "≻",
        Ordering::Equal => "~",
        Ordering::Less => "≺",
    }
}

fn argmax<T: Ord + Clone>(names: &[&str], values: &[T]) -> String {
    let top = values.iter().max().cloned();
    names.iter().zip(values).filter(|(_, v)| Some(*v) == top.as_ref()).map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
}

fn eval(d: &EvalDoc) -> Result<Report, CliError> {
    let m = &d.model;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut json_acts = Vec::new();
    let mut csv = CsvTable::new("eval", &["act", "expected_utility", "cost", "value"]);
    for a in &d.acts {
        let eu = m.expected_utility(&a.payoffs).map_err(comp)?;
        let s = a.payoffs.induced_partition();
        let cost = m.cost(&s);
        let v = m.evaluate(&a.payoffs).map_err(comp)?;
        let ce = m.certainty_equivalent(&a.payoffs).map(|x| format_rational(&x)).unwrap_or_else(|_| "-".into());
        rows.push(vec![
            a.name.clone(),
            show_act(&a.payoffs),
            m.space().show_partition(&s),
            format_rational(&eu),
            cost.to_string(),
            v.to_string(),
            ce.clone(),
        ]);
        csv.push(vec![a.name.clone(), format_rational(&eu), cost.to_string(), v.to_string()]);
        json_acts.push(json!({"name": a.name, "partition": s, "expected_utility": format_rational(&eu), "cost": cost, "value": v.to_string(), "certainty_equivalent": ce}));
        values.push(v);
    }
    let names: Vec<&str> = d.acts.iter().map(|a| a.name.as_str()).collect();
    let choice = argmax(&names, &values);
    let mut r = Report::new(json!({"kind": "eval", "acts": json_acts, "choice": choice}));
    r.heading("evaluation V(f) = E[u(f)] - C(σ(f))");
    r.table(&["act", "payoffs", "partition", "E[u]", "C", "V", "CE"], &rows);
    r.line(format!("choice: {choice}"));
    r.csv.push(csv);
    Ok(r)
}

fn update(d: &UpdateDoc, opts: &RunOptions) -> Result<Report, CliError> {
    let m = &d.model;
    let e = event_of(m.n(), &d.event, "event")?;
    let cm = ConditionalModel::new(m, &e).map_err(comp)?.with_method(d.method.into(), opts.cap);
    let mut rows = Vec::new();
    let mut csv = CsvTable::new("update", &["act", "value", "conditional_value", "conditional_cost", "witness"]);
    let (mut ex_ante, mut ex_post) = (Vec::new(), Vec::new());
    let mut json_acts = Vec::new();
    for a in &d.acts {
        let v = m.evaluate(&a.payoffs).map_err(comp)?;
        let ve = cm.evaluate(&a.payoffs).map_err(comp)?;
        let cc = cm.conditional_cost(&a.payoffs).map_err(comp)?;
        let witness = m.space().show_partition(&cc.witness);
        rows.push(vec![a.name.clone(), show_act(&a.payoffs), v.to_string(), ve.to_string(), cc.cost.to_string(), witness.clone()]);
        csv.push(vec![a.name.clone(), v.to_string(), ve.to_string(), cc.cost.to_string(), witness]);
        json_acts.push(json!({"name": a.name, "value": v.to_string(), "conditional_value": ve.to_string(), "conditional_cost": cc}));
        ex_ante.push(v);
        ex_post.push(ve);
    }
    let names: Vec<&str> = d.acts.iter().map(|a| a.name.as_str()).collect();
    let (before, after) = (argmax(&names, &ex_ante), argmax(&names, &ex_post));

    let mut pair_rows = Vec::new();
    let mut pairs = Vec::new();
    for f in &d.acts {
        for g in &d.acts {
            if f.name == g.name {
                continue;
            }
            let rep = classify_dynamics(m, &e, &f.payoffs, &g.payoffs).map_err(comp)?;
            pair_rows.push(vec![
                format!("{} vs {}", f.name, g.name),
                ordering_word(rep.ex_ante).into(),
                ordering_word(rep.spliced).into(),
                ordering_word(rep.ex_post).into(),
                format!("{:?}", rep.case).to_lowercase(),
                if rep.axiom9_applicable { rep.axiom9_holds.to_string() } else { "n/a".into() },
                rep.dynamic_consistency.to_string(),
            ]);
            pairs.push(json!({"f": f.name, "g": g.name, "report": rep}));
        }
    }
    let mut r = Report::new(json!({
        "kind": "update",
        "event": e,
        "acts": json_acts,
        "choice_ex_ante": before,
        "choice_ex_post": after,
        "pairs": pairs,
    }));
    r.heading(&format!("conditional evaluation given E = {}", m.space().show_event(&e)));
    r.table(&["act", "payoffs", "V", "V_E", "C_E", "witness R"], &rows);
    r.line(format!("ex ante choice: {before}"));
    r.line(format!("ex post choice: {after}"));
    if before != after {
        r.line("preference reversal after E");
    }
    r.heading("dynamics per ordered pair (f vs g: f ? g ex ante, fEx ? gEx, f ?_E g)");
    r.table(&["pair", "ex ante", "spliced", "ex post", "case", "A9", "DC"], &pair_rows);
    r.csv.push(csv);
    Ok(r)
}

fn axioms_report(d: &AxiomsDoc, opts: &RunOptions) -> Result<Report, CliError> {
    let m = &d.model;
    let e = event_of(m.n(), &d.event, "event")?;
    let family = match &d.family {
        FamilyDoc::Random { count, max_outcome } => ActFamily::random(m.n(), *count, *max_outcome, opts.seed),
        FamilyDoc::Explicit { acts, constants, weights } => {
            let weights = if weights.is_empty() { axioms::default_weights() } else { weights.clone() };
            ActFamily::new(acts.clone(), constants.clone(), weights, opts.seed)
                .map_err(|e| CliError::Validation(format!("payload.family: {e}")))?
        }
    };
    let mut reports = axioms::check_all(m, &family, &e).map_err(comp)?;
    let cond = ConditionalModel::new(m, &e).map_err(comp)?;
    reports.push(axioms::check_independence(m, &family).map_err(comp)?);
    reports.push(axioms::check_dynamic_consistency(m, &cond, &family).map_err(comp)?);
    let rows: Vec<Vec<String>> = reports.iter().map(axiom_row).collect();
    let mut csv = CsvTable::new("axioms", &["axiom", "status", "sample_size", "heuristic", "witness"]);
    for row in &rows {
        csv.push(row.clone());
    }
    let mut r = Report::new(json!({"kind": "axioms", "family": family, "event": e, "reports": reports}));
    r.heading(&format!("axiom checks on {} acts, E = {}", family.acts.len(), m.space().show_event(&e)));
    r.table(&["axiom", "status", "sample", "heuristic", "witness"], &rows);
    r.line("independence and dynamic consistency are not implied by the representation; violations are expected");
    r.csv.push(csv);
    Ok(r)
}

fn axiom_row(rep: &AxiomReport) -> Vec<String> {
    let name = serde_json::to_value(rep.axiom).expect("unit variant");
    let status = serde_json::to_value(rep.status).expect("unit variant");
    let witness = rep.witness.as_ref().map(|w| serde_json::to_string(w).expect("serializable")).unwrap_or_default();
    vec![
        name.as_str().unwrap_or_default().to_string(),
        status.as_str().unwrap_or_default().to_string(),
        rep.sample_size.to_string(),
        rep.heuristic.to_string(),
        witness,
    ]
}

fn exact_row(label: &str, s: &ExactScheme) -> Vec<String> {
    vec![
        label.into(),
        s.regime.to_string(),
        show_vec(&s.wages),
        format!("{:.6}", to_f64(&s.expected_wage)),
        format!("{:.6}", to_f64(&s.total_cost)),
        format!("{:.3e}", to_f64(&s.participation_slack)),
        format!("{:.3e}", to_f64(&s.incentive_slack)),
    ]
}

fn oracle_row(s: &WageScheme) -> Vec<String> {
    vec![
        "oracle".into(),
        s.regime.to_string(),
        show_f64(&s.wages),
        format!("{:.6}", s.expected_wage),
        format!("{:.6}", s.total_cost),
        format!("{:.3e}", s.participation_slack),
        format!("{:.3e}", s.incentive_slack),
    ]
}

fn contract(d: &ContractDoc, opts: &RunOptions) -> Result<Report, CliError> {
    let p = &d.problem;
    let tol = opts.tolerance.unwrap_or(cxa_core::contract::ORACLE_TOLERANCE);
    let m = likelihood_stat(p);
    let (sum, var) = identities(p);
    let cmp = compare(p).map_err(comp)?;
    let header = ["scheme", "regime", "wages", "E[w]", "total cost", "participation slack", "incentive slack"];
    let printed_rows = vec![
        exact_row("printed", &cmp.printed.complex),
        exact_row("printed", &cmp.printed.moderate),
    ];
    let oracle_rows: Vec<Vec<String>> = cmp.oracle.candidates.iter().map(oracle_row).collect();
    let mut r = Report::new(json!({"kind": "contract", "likelihood_stat": m.iter().map(format_rational).collect::<Vec<_>>(), "comparison": cmp}));
    r.heading("likelihood statistic μ = 1 - μ0/μ1");
    r.line(format!("  μ = {}   Σμ1μ = {}   Σμ1μ² + Σμ0μ = {}", show_vec(&m), format_rational(&sum), format_rational(&var)));
    r.heading("printed formulas");
    r.table(&header, &printed_rows);
    r.line(format!(
        "printed threshold (k={}): {} -> {}",
        cmp.printed.k + 1,
        format_rational(&cmp.printed.threshold),
        cmp.printed.regime
    ));
    r.heading("numeric oracle");
    r.table(&header, &oracle_rows);
    let b = &cmp.oracle.best;
    r.line(format!("optimum: {}  (binding within {tol:e}: {})", b.regime, b.binds(tol)));
    if !cmp.oracle.infeasible.is_empty() {
        let names: Vec<String> = cmp.oracle.infeasible.iter().map(|x| x.to_string()).collect();
        r.line(format!("not attainable: {}", names.join(", ")));
    }
    if let Some(f) = cmp.oracle.flip_delta {
        r.line(format!("complex→moderate flip at δ = {f:.6}"));
    }
    r.line(format!(
        "regimes agree: {}; oracle minus printed cost: {:.6}; printed scheme violation: {:.6}",
        cmp.regimes_agree, cmp.cost_delta, cmp.printed_violation
    ));

    if let Some(s) = &d.sweep {
        let mut csv = CsvTable::new("contract_sweep", &["delta", "oracle_regime", "oracle_total_cost", "printed_regime"]);
        let mut rows = Vec::new();
        for i in 0..s.steps {
            let delta = &s.from + (&s.to - &s.from) * Rational::new((i as i64).into(), ((s.steps - 1) as i64).into());
            let q = p.with_delta(delta.clone()).map_err(comp)?;
            let o = solve_oracle(&q).map_err(comp)?;
            let printed = cxa_core::contract::solve_printed(&q).map_err(comp)?;
            let row = vec![format_rational(&delta), o.best.regime.to_string(), format!("{:.6}", o.best.total_cost), printed.regime.to_string()];
            csv.push(row.clone());
            rows.push(row);
        }
        r.heading("δ sweep");
        r.table(&["δ", "oracle", "total cost", "printed"], &rows);
        r.csv.push(csv);
    }
    Ok(r)
}

fn attention(d: &AttentionDoc, opts: &RunOptions) -> Result<Report, CliError> {
    let model = AttentionModel::from_model(d.model.clone()).map_err(comp)?;
    let space = d.model.space();
    let menu = ChoiceProblem::new(d.menu.iter().map(|a| a.payoffs.clone()).collect()).map_err(comp)?;
    let e = event_of(d.model.n(), &d.event, "event")?;
    let t = run_reallocation(&model, &menu, &e, opts.cap).map_err(comp)?;
    let mut csv = CsvTable::new("attention", &["stage", "partition", "possibility_set", "witness", "objective", "previous_objective", "candidates"]);
    let mut rows = Vec::new();
    for s in &t.stages {
        let row = vec![
            s.stage.to_string(),
            space.show_partition(&s.partition),
            space.show_event(&s.possibility),
            s.witness.as_ref().map(|w| space.show_partition(w)).unwrap_or_else(|| "-".into()),
            format_rational(&s.objective),
            s.previous_objective.as_ref().map(format_rational).unwrap_or_else(|| "-".into()),
            s.candidates.to_string(),
        ];
        csv.push(row.clone());
        rows.push(row);
    }
    let chosen: Vec<&str> = t.choice.iter().map(|&i| d.menu[i].name.as_str()).collect();
    let mut r = Report::new(json!({"kind": "attention", "trace": t, "choice": chosen}));
    r.heading(&format!("attention reallocation after E = {}", space.show_event(&e)));
    r.table(&["stage", "partition", "possible", "witness R", "objective", "previous", "candidates"], &rows);
    r.line(format!(
        "terminal possibility set: {} ({})",
        space.show_event(t.final_possibility()),
        if t.shrank() { "shrank" } else { "no shrinkage" }
    ));
    r.line(format!("choice: {}", chosen.join(", ")));
    r.csv.push(csv);
    Ok(r)
}

fn profile_of(economy: &Economy, doc: &[Vec<Vec<usize>>]) -> Result<Vec<Partition>, cxa_core::Error> {
    if doc.len() != economy.consumers().len() {
        return Err(cxa_core::Error::Hypothesis(format!(
            "{} partitions for {} consumers",
            doc.len(),
            economy.consumers().len()
        )));
    }
    doc.iter().map(|blocks| Partition::from_full_blocks(economy.n(), blocks)).collect()
}

fn equilibrium_rows(label: &str, r: &EquilibriumResult, space: &cxa_core::StateSpace) -> Vec<Vec<String>> {
    r.exact_allocation
        .iter()
        .enumerate()
        .map(|(i, bundle)| {
            vec![
                label.into(),
                (i + 1).to_string(),
                space.show_partition(&r.partition_profile[i]),
                show_vec(bundle),
                if i == 0 { show_vec(&r.prices) } else { String::new() },
            ]
        })
        .collect()
}

fn push_csv(csv: &mut CsvTable, label: &str, r: &EquilibriumResult) {
    for (i, bundle) in r.exact_allocation.iter().enumerate() {
        for (w, x) in bundle.iter().enumerate() {
            csv.push(vec![label.into(), (i + 1).to_string(), (w + 1).to_string(), format_rational(&r.prices[w]), format_rational(x)]);
        }
    }
}

fn equilibrium(d: &EquilibriumDoc, opts: &RunOptions) -> Result<Report, CliError> {
    let e = &d.economy;
    let space = cxa_core::StateSpace::new(e.n()).map_err(comp)?;
    let mut solver = SolverOptions::default();
    if let Some(t) = opts.tolerance {
        solver.tolerance = t;
    }
    let header = ["equilibrium", "consumer", "partition", "consumption", "prices"];
    let mut csv = CsvTable::new("equilibrium", &["equilibrium", "consumer", "state", "price", "consumption"]);
    let sce = standard_equilibrium(e, &solver).map_err(comp)?;
    let report = solve_cace(e, &solver, opts.cap, d.profile_cap).map_err(comp)?;
    let mut given = Vec::new();
    for p in &d.profiles {
        let profile = profile_of(e, p).map_err(comp)?;
        given.push(solve_given_profile(e, &profile, &solver).map_err(comp)?);
    }

    let mut r = Report::new(json!({"kind": "equilibrium", "standard": sce, "complexity_averse": report, "given_profiles": given}));
    r.heading("standard competitive equilibrium (all consumers discrete)");
    r.table(&header, &equilibrium_rows("SCE", &sce, &space));
    r.line(format!("exact: {}  residual before rationalization: {:.1e}", sce.exact, sce.clearing_residual));
    push_csv(&mut csv, "SCE", &sce);

    r.heading(&format!(
        "complexity-averse equilibria ({} found among {} profiles, {} without clearing prices)",
        report.equilibria.len(),
        report.profiles_checked,
        report.failures.len()
    ));
    let mut rows = Vec::new();
    for (k, eq) in report.equilibria.iter().enumerate() {
        let label = format!("CACE{}", k + 1);
        rows.extend(equilibrium_rows(&label, eq, &space));
        push_csv(&mut csv, &label, eq);
    }
    r.table(&header, &rows);
    for (k, eq) in given.iter().enumerate() {
        let label = format!("given{}", k + 1);
        r.heading(&format!("profile {} as given", k + 1));
        r.table(&header, &equilibrium_rows(&label, eq, &space));
        push_csv(&mut csv, &label, eq);
    }

    r.heading("price ratios p1/pω");
    let mut ratio_rows = Vec::new();
    let ratios = |x: &EquilibriumResult| -> Vec<String> { x.prices.iter().map(|p| format_rational(&(&x.prices[0] / p))).collect() };
    ratio_rows.push([vec!["SCE".to_string()], ratios(&sce)].concat());
    for (k, eq) in report.equilibria.iter().enumerate() {
        ratio_rows.push([vec![format!("CACE{}", k + 1)], ratios(eq)].concat());
    }
    let labels: Vec<String> = (1..=e.n()).map(|w| format!("p1/p{w}")).collect();
    let mut ratio_header = vec!["equilibrium"];
    ratio_header.extend(labels.iter().map(String::as_str));
    r.table(&ratio_header, &ratio_rows);
    r.csv.push(csv);
    Ok(r)
}
