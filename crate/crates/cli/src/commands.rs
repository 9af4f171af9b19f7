//! The four subcommands. Each writes its outputs plus `manifest.json` under
//! the output directory and reports whether everything it checked passed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rank2_toda::algebra::{fundamental_pair, verify_defining_relations};
use rank2_toda::suite::{run_suite, write_csv, Families};
use rank2_toda::verify::calibration::calibrate;
use rank2_toda::verify::residual::{verify_ladder_fields, OrderEstimate, ResidualReport};
use rank2_toda::{Error, Result};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Reps,
    Identities,
    SolveVerify,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Reps => "reps",
            Command::Identities => "identities",
            Command::SolveVerify => "solve-verify",
            Command::Report => "report",
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    /// Human-readable lines for stdout.
    pub lines: Vec<String>,
    pub outputs: Vec<PathBuf>,
}

struct Out<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Out<'_> {
    fn path(&mut self, name: &str) -> Result<PathBuf> {
        let p = self.dir.join(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        self.written.push(p.clone());
        Ok(p)
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        fs::write(self.path(name)?, body)?;
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        let mut body = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
        body.push('\n');
        self.text(name, &body)
    }

    fn file(&mut self, name: &str) -> Result<fs::File> {
        Ok(fs::File::create(self.path(name)?)?)
    }
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut out = Out {
        dir: &cfg.out,
        written: Vec::new(),
    };
    let (passed, lines, extra) = match cmd {
        Command::Reps => reps(cfg, &mut out)?,
        Command::Identities => identities(cfg, &mut out)?,
        Command::SolveVerify => solve_verify(cfg, &mut out)?,
        Command::Report => report(cfg, &mut out)?,
    };
    let mut cfg = cfg.clone();
    cfg.command = cmd.name().into();
    let outputs: Vec<String> = out.written.iter().map(|p| p.display().to_string()).collect();
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "rng": "ChaCha8, one stream per purpose, seeded from `seed`",
        "config": cfg,
        "passed": passed,
        "outputs": outputs,
        "details": extra,
    });
    out.json("manifest.json", &manifest)?;
    Ok(Outcome {
        passed,
        lines,
        outputs: out.written,
    })
}

type Parts = (bool, Vec<String>, serde_json::Value);

fn reps(cfg: &RunConfig, out: &mut Out) -> Result<Parts> {
    let reps = fundamental_pair(cfg.p)?;
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    for r in &reps {
        out.text(&format!("reps/p{}_j{}.txt", cfg.p, r.label), &r.dump())?;
        let rep = verify_defining_relations(r);
        lines.push(format!(
            "{} j={} dim={} relations {}",
            r.algebra.name(),
            r.label,
            r.dim,
            if rep.all_zero() { "exact" } else { "FAILED" }
        ));
        reports.push(rep);
    }
    let passed = reports.iter().all(|r| r.all_zero());
    out.json("relations.json", &reports)?;
    let dims: Vec<usize> = reps.iter().map(|r| r.dim).collect();
    Ok((passed, lines, json!({ "dims": dims })))
}

fn identities(cfg: &RunConfig, out: &mut Out) -> Result<Parts> {
    let families = Families {
        jacobi: true,
        appendix1: cfg.appendix,
        appendix2: cfg.appendix,
    };
    let seeds = cfg.seed..cfg.seed.saturating_add(cfg.seeds);
    let (rows, summary) = run_suite(cfg.p, seeds, families)?;
    write_csv(out.file("identities.csv")?, &rows)?;
    out.json("identities_summary.json", &summary)?;
    let lines = vec![format!(
        "p={} seeds={} checks={} failures={} singular draws={}",
        cfg.p, cfg.seeds, summary.rows, summary.failures, summary.singular_draws
    )];
    Ok((summary.failures == 0, lines, json!(summary)))
}

fn order_text(o: &OrderEstimate) -> String {
    match o {
        OrderEstimate::Order(v) => format!("{v:.2}"),
        OrderEstimate::Saturated => "saturated".into(),
        OrderEstimate::Unavailable => "n/a".into(),
    }
}

fn report_lines(r: &ResidualReport) -> Vec<String> {
    let mut lines = vec![format!(
        "{} stencil {} h = {:?}  excluded {}",
        r.case,
        r.stencil,
        r.spacings,
        r.excluded_nodes.len()
    )];
    for e in &r.equations {
        lines.push(format!(
            "  {:<28} {:<9} residual {:>10.3e}  order {}",
            e.name,
            format!("{:?}", e.role).to_lowercase(),
            e.residuals.last().copied().unwrap_or(f64::NAN),
            order_text(&e.order)
        ));
    }
    lines
}

fn solve_verify(cfg: &RunConfig, out: &mut Out) -> Result<Parts> {
    let case = cfg.case()?;
    let coeffs = cfg.coefficient_set()?;
    let (report, field) = verify_ladder_fields(
        case,
        &coeffs,
        &cfg.grids(),
        &cfg.solve_options(),
        cfg.stencil,
        cfg.threshold,
    )?;
    let mut f = out.file("field.csv")?;
    field.write_csv(&mut f)?;
    f.flush()?;
    out.json("residual.json", &report)?;
    report.write_csv_summary(out.file("residual.csv")?, true)?;
    let mut lines = report_lines(&report);
    lines.push(format!(
        "closes at stencil order: {}; accepted: {}",
        report.closes(),
        report.acceptable()
    ));
    let details = json!({
        "case": case.to_string(),
        "coefficients": coeffs,
        "grids": cfg.grids(),
        "integrator_steps": field.stats.accepted,
        "integrator_rejections": field.stats.rejected,
    });
    Ok((report.acceptable(), lines, details))
}

fn report(cfg: &RunConfig, out: &mut Out) -> Result<Parts> {
    let r = calibrate(&cfg.calibration_seeds)?;
    out.json("calibration.json", &r)?;
    let mut lines = Vec::new();
    for f in &r.findings {
        lines.push(format!(
            "{}: {} (printed: {}); closing {:?}; stable {}",
            f.question,
            if f.confirmed() { "confirmed" } else { "UNRESOLVED" },
            f.printed,
            f.closing,
            f.stable
        ));
    }
    out.text("report.txt", &(lines.join("\n") + "\n"))?;
    Ok((r.confirmed(), lines, json!({ "seeds": r.seeds })))
}
