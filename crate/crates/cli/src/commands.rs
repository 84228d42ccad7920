use std::f64::consts::PI;

use micz_core::coherent::{
    default_cutoff, evolve, fock_expectation_r, physical_normalization, psi_evolved, psi_physical,
};
use micz_core::errata::{errata, Status, Variant};
use micz_core::model::{enumerate_sectors, physical_radial, sturmian_radial, AngularFunction, RadialState};
use micz_core::su11::displace_number_state;
use micz_core::verify::{self, Suite, Tolerances};
use micz_core::{CoherentParams, CoherentStateSpec, HalfInt, QuantumNumbers, RadialGrid};
use rayon::prelude::*;
use toml::Table as Toml;

use crate::args::{
    AngularArgs, CoherentArgs, ErrataArgs, EvolveArgs, Format, Measure, OutputArgs, RadialGridArgs, SectorArgs,
    SpectrumArgs, SturmianArgs, VerifyArgs,
};
use crate::config::{bad, ConfigError, Section};
use crate::output::{Cell, Meta, Table};

/// Exit 1 for `Config`, 2 for `Numerical`.
#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Numerical(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<micz_core::Error> for Failure {
    fn from(e: micz_core::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(ConfigError(e.to_string()))
        }
    }
}

pub struct Outcome {
    pub meta: Meta,
    pub table: Table,
    pub format: Format,
    pub output: Option<std::path::PathBuf>,
    /// Set when the run completed but some invariant failed.
    pub failure: Option<String>,
}

fn finish(meta: Meta, table: Table, out: OutputArgs, default: Format, sec: &mut Section) -> Result<Outcome, Failure> {
    let format = match out.format {
        Some(f) => f,
        None => match sec.string("format")?.as_deref() {
            None => default,
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(bad("format", format!("expected csv or json, got `{other}`")).into()),
        },
    };
    let output = match out.output {
        Some(p) => Some(p),
        None => sec.string("output")?.map(Into::into),
    };
    Ok(Outcome {
        meta,
        table,
        format,
        output,
        failure: None,
    })
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn require_finite(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(field, "must be finite"))
    }
}

/// `J` from either `--J` or a full sector; the hydrogen ground sector by default.
fn resolve_big_j(
    args: SectorArgs,
    sec: &mut Section,
    meta: &mut Meta,
) -> Result<(f64, Option<QuantumNumbers>), Failure> {
    let s = args.s.or(sec.half_int("s")?);
    let c1 = args.c1.or(sec.f64("c1")?);
    let c2 = args.c2.or(sec.f64("c2")?);
    let m = args.m.or(sec.half_int("m")?);
    let j = args.j.or(sec.half_int("j")?);
    let big_j = args.big_j.or(sec.f64("J")?);
    let any_sector = s.is_some() || c1.is_some() || c2.is_some() || m.is_some() || j.is_some();
    if let Some(big_j) = big_j {
        if any_sector {
            return Err(bad("J", "give either J or the sector (s, c1, c2, m, j), not both").into());
        }
        if !(big_j >= 0.0) || !big_j.is_finite() {
            return Err(bad("J", format!("must be finite and >= 0, got {big_j}")).into());
        }
        meta.push("J", big_j);
        return Ok((big_j, None));
    }
    let zero = HalfInt::from_int(0);
    let qn = QuantumNumbers::new(
        s.unwrap_or(zero),
        c1.unwrap_or(0.0),
        c2.unwrap_or(0.0),
        m.unwrap_or(zero),
        j.unwrap_or(zero),
    )?;
    meta.push("s", qn.s);
    meta.push("c1", qn.c1);
    meta.push("c2", qn.c2);
    meta.push("m", qn.m);
    meta.push("j", qn.j);
    meta.push("J", qn.big_j);
    Ok((qn.big_j, Some(qn)))
}

fn resolve_grid(
    args: RadialGridArgs,
    sec: &mut Section,
    meta: &mut Meta,
    defaults: (f64, f64, usize),
) -> Result<RadialGrid, Failure> {
    let r_min = pick(args.r_min, sec.f64("r-min")?, defaults.0);
    let r_max = pick(args.r_max, sec.f64("r-max")?, defaults.1);
    let points = pick(args.points, sec.usize("points")?, defaults.2);
    meta.push("r_min", r_min);
    meta.push("r_max", r_max);
    meta.push("points", points);
    Ok(RadialGrid::linspace(r_min, r_max, points)?)
}

fn params(tau: f64, phi: f64, meta: &mut Meta) -> Result<CoherentParams, Failure> {
    meta.push("tau", tau);
    meta.push("phi", phi);
    Ok(CoherentParams::new(tau, phi)?)
}

pub fn spectrum(args: SpectrumArgs, file: Option<&Toml>) -> Result<Outcome, Failure> {
    let mut sec = Section::from_file(file, "spectrum")?;
    let mut meta = Meta::new("spectrum");
    let s = pick(args.s, sec.half_int("s")?, HalfInt::from_int(0));
    let c1 = pick(args.c1, sec.f64("c1")?, 0.0);
    let c2 = pick(args.c2, sec.f64("c2")?, 0.0);
    let j_max = pick(
        args.j_max,
        sec.half_int("j-max")?,
        HalfInt::from_twice(s.abs().twice() + 6),
    );
    let n_max = pick(args.n_max, sec.usize("n-max")?, 3);
    meta.push("s", s);
    meta.push("c1", c1);
    meta.push("c2", c2);
    meta.push("j_max", j_max);
    meta.push("n_max", n_max);
    let mut table = Table::new(&["j", "m", "delta1", "delta2", "J", "n", "E"]);
    for q in enumerate_sectors(s, c1, c2, j_max)? {
        for n in 0..=n_max {
            let st = RadialState::new(q, n);
            table.push(vec![
                q.j.into(),
                q.m.into(),
                q.delta1.into(),
                q.delta2.into(),
                q.big_j.into(),
                n.into(),
                st.energy.into(),
            ]);
        }
    }
    let out = finish(meta, table, args.out, Format::Csv, &mut sec)?;
    sec.finish()?;
    Ok(out)
}

pub fn sturmian(args: SturmianArgs, file: Option<&Toml>) -> Result<Outcome, Failure> {
    let mut sec = Section::from_file(file, "sturmian")?;
    let mut meta = Meta::new("sturmian");
    let (big_j, _) = resolve_big_j(args.sector, &mut sec, &mut meta)?;
    let n = pick(args.n, sec.usize("n")?, 0);
    meta.push("n", n);
    let grid = resolve_grid(args.grid, &mut sec, &mut meta, (0.05, 40.0, 400))?;
    let mut table = Table::new(&["r", "sturmian", "physical"]);
    let rows: Vec<Vec<Cell>> = grid
        .points()
        .par_iter()
        .map(|&r| {
            vec![
                r.into(),
                sturmian_radial(n, big_j, r).into(),
                physical_radial(n, big_j, r).into(),
            ]
        })
        .collect();
    table.rows = rows;
    let out = finish(meta, table, args.out, Format::Csv, &mut sec)?;
    sec.finish()?;
    Ok(out)
}

pub fn angular(args: AngularArgs, file: Option<&Toml>) -> Result<Outcome, Failure> {
    let mut sec = Section::from_file(file, "angular")?;
    let mut meta = Meta::new("angular");
    let zero = HalfInt::from_int(0);
    let qn = QuantumNumbers::new(
        pick(args.s, sec.half_int("s")?, zero),
        pick(args.c1, sec.f64("c1")?, 0.0),
        pick(args.c2, sec.f64("c2")?, 0.0),
        pick(args.m, sec.half_int("m")?, zero),
        pick(args.j, sec.half_int("j")?, zero),
    )?;
    let phi = require_finite("phi", pick(args.phi, sec.f64("phi")?, 0.0))?;
    let points = pick(args.points, sec.usize("points")?, 181);
    if points < 2 {
        return Err(bad("points", "need at least 2 points").into());
    }
    meta.push("s", qn.s);
    meta.push("c1", qn.c1);
    meta.push("c2", qn.c2);
    meta.push("m", qn.m);
    meta.push("j", qn.j);
    meta.push("J", qn.big_j);
    meta.push("phi", phi);
    meta.push("points", points);
    let z = AngularFunction::new(qn)?;
    let mut table = Table::new(&["theta", "re_z", "im_z", "abs2"]);
    for i in 0..points {
        let theta = PI * i as f64 / (points - 1) as f64;
        let v = z.value(theta.min(PI), phi)?;
        table.push(vec![theta.into(), v.re.into(), v.im.into(), v.norm_sqr().into()]);
    }
    let out = finish(meta, table, args.out, Format::Csv, &mut sec)?;
    sec.finish()?;
    Ok(out)
}

pub fn coherent(args: CoherentArgs, file: Option<&Toml>) -> Result<Outcome, Failure> {
    let mut sec = Section::from_file(file, "coherent")?;
    let mut meta = Meta::new("coherent");
    let (big_j, _) = resolve_big_j(args.sector, &mut sec, &mut meta)?;
    let n = pick(args.n, sec.usize("n")?, 0);
    meta.push("n", n);
    let p = params(
        pick(args.tau, sec.f64("tau")?, 0.5),
        pick(args.phi, sec.f64("phi")?, 0.0),
        &mut meta,
    )?;
    let time = require_finite("time", pick(args.time, sec.f64("time")?, 0.0))?;
    meta.push("time", time);
    let measure = match args.measure {
        Some(m) => m,
        None => match sec.string("measure")?.as_deref() {
            None | Some("group") => Measure::Group,
            Some("physical") => Measure::Physical,
            Some(other) => return Err(bad("measure", format!("expected group or physical, got `{other}`")).into()),
        },
    };
    meta.push("measure", if measure == Measure::Group { "group" } else { "physical" });
    let grid = resolve_grid(args.grid, &mut sec, &mut meta, (0.1, 40.0, 400))?;
    let spec = evolve(&CoherentStateSpec::new(big_j, n, p)?, time);
    let values: Vec<_> = grid
        .points()
        .par_iter()
        .map(|&r| match measure {
            Measure::Group => psi_evolved(r, &spec, 0.0),
            Measure::Physical => psi_physical(r, &spec),
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["r", "re_psi", "im_psi", "abs2"]);
    for (&r, v) in grid.points().iter().zip(values) {
        table.push(vec![r.into(), v.re.into(), v.im.into(), v.norm_sqr().into()]);
    }
    let out = finish(meta, table, args.out, Format::Csv, &mut sec)?;
    sec.finish()?;
    Ok(out)
}

/// A time: a plain number, `period` multiples, or `<c>pi/gamma`.
pub fn parse_time(text: &str, gamma: f64) -> Option<f64> {
    let t = text.trim().to_ascii_lowercase().replace(' ', "");
    let coefficient = |head: &str| -> Option<f64> {
        let head = head.trim_end_matches('*');
        if head.is_empty() {
            Some(1.0)
        } else if head == "-" {
            Some(-1.0)
        } else {
            head.parse::<f64>().ok().filter(|v| v.is_finite())
        }
    };
    if let Some(head) = t.strip_suffix("/gamma") {
        return match head.strip_suffix("pi") {
            Some(c) => coefficient(c).map(|c| c * PI / gamma),
            None => coefficient(head).map(|c| c / gamma),
        };
    }
    if let Some(head) = t.strip_suffix("period") {
        return coefficient(head).map(|c| c * 2.0 * PI / gamma);
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn evolve_trace(args: EvolveArgs, file: Option<&Toml>) -> Result<Outcome, Failure> {
    let mut sec = Section::from_file(file, "evolve")?;
    let mut meta = Meta::new("evolve");
    let (big_j, _) = resolve_big_j(args.sector, &mut sec, &mut meta)?;
    let n = pick(args.n, sec.usize("n")?, 0);
    meta.push("n", n);
    let p = params(
        pick(args.tau, sec.f64("tau")?, 0.5),
        pick(args.phi, sec.f64("phi")?, 0.0),
        &mut meta,
    )?;
    let spec = CoherentStateSpec::new(big_j, n, p)?;
    let t_min_text = pick(args.t_min, sec.string("t-min")?, "0".to_string());
    let t_max_text = pick(args.t_max, sec.string("t-max")?, "2pi/gamma".to_string());
    let t_min =
        parse_time(&t_min_text, spec.gamma).ok_or_else(|| bad("t-min", format!("cannot read `{t_min_text}`")))?;
    let t_max =
        parse_time(&t_max_text, spec.gamma).ok_or_else(|| bad("t-max", format!("cannot read `{t_max_text}`")))?;
    if !(t_max > t_min) {
        return Err(bad("t-max", format!("must exceed t-min ({t_min}), got {t_max}")).into());
    }
    let points = pick(args.points, sec.usize("points")?, 64);
    if points < 2 {
        return Err(bad("points", "need at least 2 points").into());
    }
    let cutoff = pick(args.cutoff, sec.usize("cutoff")?, default_cutoff(p.tau()));
    meta.push("t_min", t_min_text);
    meta.push("t_max", t_max_text);
    meta.push("gamma", spec.gamma);
    meta.push("points", points);
    meta.push("cutoff", cutoff);
    let v = displace_number_state(&p, spec.bargmann_index(), n, cutoff)?;
    meta.push("fock_tail", v.tail());
    let times: Vec<f64> = (0..points)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (points - 1) as f64)
        .collect();
    let rows: Vec<Vec<Cell>> = times
        .par_iter()
        .map(|&t| {
            let r_mean = fock_expectation_r(&v.evolve_diagonal(spec.gamma, t));
            vec![
                t.into(),
                r_mean.into(),
                spec.energy().into(),
                physical_normalization(big_j, n, &p, t).into(),
            ]
        })
        .collect();
    let mut table = Table::new(&["t", "r_mean", "energy", "normalization"]);
    table.rows = rows;
    let out = finish(meta, table, args.out, Format::Csv, &mut sec)?;
    sec.finish()?;
    Ok(out)
}

pub fn verify_suite(args: VerifyArgs, file: Option<&Toml>) -> Result<Outcome, Failure> {
    let mut sec = Section::from_file(file, "verify")?;
    let mut meta = Meta::new("verify");
    let suite_name = pick(args.suite, sec.string("suite")?, "all".to_string());
    let suite: Suite = suite_name
        .parse()
        .map_err(|e: micz_core::Error| ConfigError(e.to_string()))?;
    let cutoff = pick(args.cutoff, sec.usize("cutoff")?, 300);
    if cutoff < 30 {
        return Err(bad("cutoff", format!("must be at least 30, got {cutoff}")).into());
    }
    let mut tol = Tolerances::default();
    for (k, v) in sec.number_table("tolerances")? {
        tol.set(&k, v)?;
    }
    for item in &args.tolerances {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| bad("tol", format!("expected KEY=VALUE, got `{item}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| bad("tol", format!("`{v}` is not a number")))?;
        tol.set(k.trim(), v)?;
    }
    meta.push("suite", suite.to_string());
    meta.push("cutoff", cutoff);
    meta.push("tol_algebraic", tol.algebraic);
    meta.push("tol_closed_form", tol.closed_form);
    meta.push("tol_quadrature", tol.quadrature);
    meta.push("tol_synthesis", tol.synthesis);
    meta.push("tol_reduction", tol.reduction);
    let report = verify::run(suite, cutoff, &tol);
    meta.push("passed", report.passed);
    let mut table = Table::new(&["topic", "name", "value", "tolerance", "expect", "passed", "detail"]);
    for c in &report.checks {
        let expect = match c.expect {
            verify::Expect::Within => "within",
            verify::Expect::Exceeds => "exceeds",
        };
        table.push(vec![
            c.topic.into(),
            c.name.clone().into(),
            c.value.into(),
            c.tolerance.into(),
            expect.into(),
            c.passed.into(),
            c.detail.clone().map_or(Cell::Missing, Cell::Text),
        ]);
    }
    let failed: Vec<String> = report.failures().map(|c| format!("{}: {}", c.topic, c.name)).collect();
    let mut out = finish(meta, table, args.out, Format::Json, &mut sec)?;
    sec.finish()?;
    if !failed.is_empty() {
        out.failure = Some(format!("{} check(s) failed:\n  {}", failed.len(), failed.join("\n  ")));
    }
    Ok(out)
}

pub fn errata_table(args: ErrataArgs, file: Option<&Toml>) -> Result<Outcome, Failure> {
    let mut sec = Section::from_file(file, "errata")?;
    let meta = Meta::new("errata");
    let entries = errata()?;
    let mut table = Table::new(&[
        "id",
        "status",
        "variant",
        "formula",
        "quantity",
        "value",
        "tolerance",
        "passes",
    ]);
    let mut unconfirmed = Vec::new();
    for e in &entries {
        let status = match e.status {
            Status::Confirmed => "confirmed",
            Status::Unconfirmed => "unconfirmed",
            Status::Note => "note",
        };
        if e.status == Status::Unconfirmed {
            unconfirmed.push(e.id);
        }
        for ev in &e.evidence {
            let (variant, formula) = match ev.variant {
                Variant::Rejected => ("rejected", e.rejected),
                Variant::Adopted => ("adopted", e.adopted),
            };
            let tolerance = if ev.tolerance.is_finite() {
                Cell::Float(ev.tolerance)
            } else {
                Cell::Missing
            };
            table.push(vec![
                e.id.into(),
                status.into(),
                variant.into(),
                formula.into(),
                ev.quantity.clone().into(),
                ev.value.into(),
                tolerance,
                ev.passes.into(),
            ]);
        }
    }
    let mut out = finish(meta, table, args.out, Format::Csv, &mut sec)?;
    sec.finish()?;
    if !unconfirmed.is_empty() {
        out.failure = Some(format!(
            "errata not confirmed by their checks: {}",
            unconfirmed.join(", ")
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_expressions() {
        let g = 0.5;
        assert_eq!(parse_time("2pi/gamma", g), Some(2.0 * PI / g));
        assert_eq!(parse_time("pi/gamma", g), Some(PI / g));
        assert_eq!(parse_time("0.5*pi/gamma", g), Some(0.5 * PI / g));
        assert_eq!(parse_time("3/gamma", g), Some(6.0));
        assert_eq!(parse_time("2 period", g), Some(4.0 * PI / g));
        assert_eq!(parse_time("1.25", g), Some(1.25));
        assert_eq!(parse_time("two", g), None);
        assert_eq!(parse_time("inf", g), None);
    }
}
