use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use dimlab_core::bits::{guide_from_spec, source_from_spec, BitWord, Source};
use dimlab_core::complexity::{estimator_by_name, ComplexityTable, ToyPrefixMachine};
use dimlab_core::constructions::{
    build_double_segment, build_generic_like, build_theorem12_x, build_theorem4, DoubleSegmentMode, GenericParams,
    Polarity, Requirement, Schedule, UseBound,
};
use dimlab_core::dimensions::{
    dim_h_from, dim_is_from, dim_p_from, dim_si_from, member_report, Extreme, MemberReport, RatioTable, Window,
};
use dimlab_core::families::{IndexFamily, IndexSet};
use dimlab_core::reductions::{apply_wtt, transduce, WttMachine, WttOutcome};
use dimlab_core::Error;

use crate::artifacts::{Bundle, MANIFEST, SCHEMA_VERSION};
use crate::config::{CommandKind, ConstructionConfig, ExperimentConfig};

/// What a command produced and whether every part of it is complete.
pub struct Outcome {
    pub bundle: Bundle,
    /// Set when the artifacts are written but marked partial.
    pub partial: Option<String>,
}

/// Runs a resolved config.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let command = cfg.command.context("config has no command")?;
    let mut outcome = match command {
        CommandKind::Construct => construct(cfg)?,
        CommandKind::Profile => profile(cfg)?,
        CommandKind::Transduce => cmd_transduce(cfg)?,
        CommandKind::Wtt => wtt(cfg)?,
        CommandKind::Exactk => exactk(cfg)?,
    };
    outcome.bundle.add(MANIFEST, cfg.to_toml()?);
    Ok(outcome)
}

fn complete(bundle: Bundle) -> Outcome {
    Outcome { bundle, partial: None }
}

fn horizon(cfg: &ExperimentConfig) -> u64 {
    cfg.horizon.expect("resolved")
}

fn field<'a>(v: &'a Option<String>, name: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| anyhow!("unresolved `{name}`"))
}

/// The sequence a construction section describes, exact at least up to `reach`.
pub fn build_source(c: &ConstructionConfig, reach: u64) -> Result<Source> {
    let kind = field(&c.kind, "construction.kind")?;
    let random = || -> Result<Source> { Ok(source_from_spec(field(&c.source, "construction.source")?)?) };
    let schedule = || -> Result<Schedule> { Ok(Schedule::from_spec(field(&c.schedule, "construction.schedule")?)?) };
    Ok(match kind {
        "source" => random()?,
        "segments" => Arc::new(build_theorem4(random()?, schedule()?)),
        "double-segment" => {
            let mode = match field(&c.mode, "construction.mode")? {
                "si-zero" => DoubleSegmentMode::SiZero,
                "is-random" => DoubleSegmentMode::IsRandom,
                other => bail!("unknown double-segment mode `{other}`"),
            };
            let x0 = guide_from_spec(field(&c.guide, "construction.guide")?)?;
            Arc::new(build_double_segment(random()?, x0, schedule()?, mode))
        }
        "use-bounded" => {
            let f = UseBound::from_name(field(&c.use_bound, "construction.use_bound")?)?;
            let s0 = guide_from_spec(field(&c.guide, "construction.guide")?)?;
            Arc::new(build_theorem12_x(random()?, s0, &f, reach)?)
        }
        "generic" => {
            let bank = c
                .bank
                .as_deref()
                .unwrap_or_default()
                .iter()
                .map(|line| {
                    let (pol, spec) = line
                        .trim()
                        .split_once(' ')
                        .ok_or_else(|| anyhow!("bank entry `{line}` needs `<polarity> <set spec>`"))?;
                    Ok(Requirement {
                        polarity: pol.parse::<Polarity>()?,
                        set: IndexSet::from_spec(spec)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let params = GenericParams {
                horizon: reach,
                min_block: c.min_block.context("unresolved min_block")?,
                growth: c.growth.context("unresolved growth")?,
            };
            let low = source_from_spec(field(&c.low, "construction.low")?)?;
            let high = source_from_spec(field(&c.high, "construction.high")?)?;
            Arc::new(build_generic_like(bank, low, high, params)?)
        }
        other => bail!("unknown construction kind `{other}`"),
    })
}

fn ascii(word: &BitWord) -> String {
    word.to_string()
}

fn construct(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n = horizon(cfg);
    let src = build_source(cfg.construction.as_ref().context("unresolved construction")?, n)?;
    let mut b = Bundle::default();
    b.add("sequence.txt", ascii(&src.prefix(n)));
    Ok(complete(b))
}

#[derive(Serialize)]
struct ProfileJson<'a> {
    schema_version: u32,
    complete: bool,
    source: String,
    estimator: String,
    family: &'a str,
    window: &'a Window,
    dim_h: Option<Extreme>,
    dim_p: Option<Extreme>,
    dim_si: Option<Extreme>,
    dim_is: Option<Extreme>,
    chain_holds: Option<bool>,
    members: Vec<MemberJson>,
}

#[derive(Serialize)]
struct MemberJson {
    index: usize,
    spec: String,
    status: &'static str,
    #[serde(flatten)]
    report: Option<MemberReport>,
}

const PROFILE_COLUMNS: [&str; 16] = [
    "row", "member_index", "member", "status", "member_inf", "member_inf_n", "member_sup", "member_sup_n", "dim_h",
    "dim_h_m", "dim_is", "dim_is_member", "dim_si", "dim_si_member", "dim_p", "chain_ok",
];

fn profile(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n = horizon(cfg);
    let src = build_source(cfg.construction.as_ref().context("unresolved construction")?, n)?;
    let est = estimator_by_name(field(&cfg.estimator, "estimator")?)?;
    let wc = cfg.window.as_ref().context("unresolved window")?;
    let w = Window::new(wc.n_min.context("unresolved n_min")?, n, wc.m_grid.clone())?;
    let fc = cfg.family.as_ref().context("unresolved family")?;
    let label = field(&fc.label, "family.label")?;
    let mut members = Vec::new();
    if fc.tails == Some(true) {
        members.extend(w.tail_family().members);
    }
    for spec in fc.members.as_deref().unwrap_or_default() {
        members.push(IndexSet::from_spec(spec)?);
    }
    let fam = IndexFamily::new(label, members)?;

    let table = RatioTable::compute(src.as_ref(), est.as_ref(), n);
    let dim_h = dim_h_from(&table, &w)?;
    let dim_p = dim_p_from(&table, &w)?;
    let mut ok = Vec::new();
    let mut rows = Vec::new();
    let mut exhausted = Vec::new();
    for (i, m) in fam.members.iter().enumerate() {
        match member_report(&table, m, &w) {
            Ok(r) => {
                ok.push(r.clone());
                rows.push(MemberJson {
                    index: i,
                    spec: m.to_spec(),
                    status: "ok",
                    report: Some(r),
                });
            }
            Err(Error::ExhaustedAtHorizon { .. }) => {
                exhausted.push(m.to_spec());
                rows.push(MemberJson {
                    index: i,
                    spec: m.to_spec(),
                    status: "exhausted-at-horizon",
                    report: None,
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    // Member indices in the summary refer to the full family, not the surviving subset.
    let full_index = |e: Extreme| -> Extreme {
        let idx = rows.iter().filter(|r| r.status == "ok").nth(e.attained_by as usize).expect("in range").index;
        Extreme {
            attained_by: idx as u64,
            ..e
        }
    };
    let (dim_si, dim_is) = if ok.is_empty() {
        (None, None)
    } else {
        (Some(full_index(dim_si_from(&ok))), Some(full_index(dim_is_from(&ok))))
    };
    let chain = dim_si.as_ref().zip(dim_is.as_ref()).map(|(si, is)| {
        dim_h.value <= is.value && is.value <= dim_p.value && dim_h.value <= si.value && si.value <= dim_p.value
    });

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(PROFILE_COLUMNS)?;
    let fmt = |e: &Option<Extreme>| e.as_ref().map_or(String::new(), |e| e.value.to_string());
    let at = |e: &Option<Extreme>| e.as_ref().map_or(String::new(), |e| e.attained_by.to_string());
    let summary = |csv: &mut csv::Writer<Vec<u8>>, kind: &str, idx: String, spec: String, status: &str, m: Option<&MemberReport>| {
        let (inf, inf_n, sup, sup_n) = m.map_or(Default::default(), |r| {
            (r.inf.ratio.to_string(), r.inf.n.to_string(), r.sup.ratio.to_string(), r.sup.n.to_string())
        });
        csv.write_record([
            kind.to_string(),
            idx,
            spec,
            status.to_string(),
            inf,
            inf_n,
            sup,
            sup_n,
            dim_h.value.to_string(),
            dim_h.attained_by.to_string(),
            fmt(&dim_is),
            at(&dim_is),
            fmt(&dim_si),
            at(&dim_si),
            dim_p.value.to_string(),
            chain.map_or(String::new(), |c| c.to_string()),
        ])
    };
    summary(&mut csv, "summary", String::new(), String::new(), if exhausted.is_empty() { "ok" } else { "partial" }, None)?;
    for r in &rows {
        summary(&mut csv, "member", r.index.to_string(), r.spec.clone(), r.status, r.report.as_ref())?;
    }
    let csv_bytes = csv.into_inner().map_err(|e| anyhow!("csv: {e}"))?;

    let json = ProfileJson {
        schema_version: SCHEMA_VERSION,
        complete: exhausted.is_empty(),
        source: src.describe(),
        estimator: est.id(),
        family: &fam.label,
        window: &w,
        dim_h: Some(dim_h),
        dim_p: Some(dim_p),
        dim_si,
        dim_is,
        chain_holds: chain,
        members: rows,
    };
    let mut b = Bundle::default();
    b.add("profile.csv", csv_bytes);
    b.add_json("profile.json", &json)?;
    let partial = (!exhausted.is_empty()).then(|| {
        format!("{} family member(s) exhausted at horizon {n}: {}", exhausted.len(), exhausted.join("; "))
    });
    Ok(Outcome { bundle: b, partial })
}

#[derive(Serialize)]
struct TransduceJson<'a> {
    schema_version: u32,
    a0: &'a str,
    a1: &'a str,
    estimator: String,
    #[serde(flatten)]
    report: &'a dimlab_core::reductions::TransduceReport,
    use_within_bound: bool,
}

fn cmd_transduce(cfg: &ExperimentConfig) -> Result<Outcome> {
    let t = cfg.transduce.as_ref().context("unresolved transduce")?;
    let (a0, a1) = (field(&t.a0, "transduce.a0")?, field(&t.a1, "transduce.a1")?);
    let est = estimator_by_name(field(&cfg.estimator, "estimator")?)?;
    let report = transduce(
        source_from_spec(a0)?,
        source_from_spec(a1)?,
        t.stages.context("unresolved stages")?,
        est.as_ref(),
    );
    let mut b = Bundle::default();
    b.add("output.txt", ascii(&report.output));
    b.add_json(
        "switches.json",
        &TransduceJson {
            schema_version: SCHEMA_VERSION,
            a0,
            a1,
            estimator: est.id(),
            report: &report,
            use_within_bound: report.use_within_bound(),
        },
    )?;
    Ok(complete(b))
}

#[derive(Serialize)]
struct WttJson<'a> {
    schema_version: u32,
    machine: String,
    oracle: String,
    n_bits: u64,
    #[serde(flatten)]
    outcome: &'a WttOutcome,
}

fn wtt(cfg: &ExperimentConfig) -> Result<Outcome> {
    let m = cfg.wtt.as_ref().context("unresolved wtt")?;
    let machine =
        WttMachine::by_name(field(&m.machine, "wtt.machine")?)?.with_budget(m.step_budget.context("unresolved budget")?);
    let bits = m.bits.context("unresolved bits")?;
    let reach = machine.use_bound.eval(bits).max(bits);
    let x = build_source(cfg.construction.as_ref().context("unresolved construction")?, reach)?;
    let outcome = apply_wtt(&machine, x.clone(), bits)?;
    let mut b = Bundle::default();
    b.add("image.txt", ascii(outcome.bits()));
    b.add_json(
        "wtt.json",
        &WttJson {
            schema_version: SCHEMA_VERSION,
            machine: machine.to_string(),
            oracle: x.describe(),
            n_bits: bits,
            outcome: &outcome,
        },
    )?;
    Ok(complete(b))
}

#[derive(Serialize)]
struct ExactKJson {
    schema_version: u32,
    machine: String,
    l_max: usize,
    program_max: usize,
    halting_programs: usize,
    prefix_free: bool,
    /// `Σ 2^{-|p|}` over halting programs, scaled by `2^program_max`.
    kraft_numerator: String,
    kraft_denominator: String,
    kraft_holds: bool,
    /// `Σ 2^{-K(σ)}` over tabulated words, scaled by `2^program_max`.
    table_kraft_numerator: String,
    table_words: usize,
    machine_constant: i64,
}

fn exactk(cfg: &ExperimentConfig) -> Result<Outcome> {
    let e = cfg.exactk.as_ref().context("unresolved exactk")?;
    let (l_max, program_max) = (e.l_max.context("unresolved l_max")?, e.program_max.context("unresolved program_max")?);
    if program_max > 120 {
        bail!("program_max {program_max} is beyond the exact Kraft arithmetic");
    }
    let en = ToyPrefixMachine::with_limits(l_max, program_max).enumerate();
    let table = ComplexityTable::from_enumeration(&en, l_max);
    let table_kraft: u128 = table
        .iter()
        .map(|(_, entry)| 1u128 << (program_max as u64 - entry.value.min(program_max as u64)))
        .sum();
    let json = ExactKJson {
        schema_version: SCHEMA_VERSION,
        machine: en.machine.identity(),
        l_max,
        program_max,
        halting_programs: en.programs.len(),
        prefix_free: en.is_prefix_free(),
        kraft_numerator: en.kraft_numerator().to_string(),
        kraft_denominator: (1u128 << program_max).to_string(),
        kraft_holds: en.kraft_holds(),
        table_kraft_numerator: table_kraft.to_string(),
        table_words: table.len(),
        machine_constant: en.machine_constant(l_max),
    };
    let mut b = Bundle::default();
    b.add("exactk.table", table.to_text());
    b.add_json("exactk.json", &json)?;
    Ok(complete(b))
}
