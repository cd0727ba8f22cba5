use std::fmt::Write as _;

use nalgebra::DVector;
use randers_lie::geodesic::integrate;
use randers_lie::parallel::parallel_residual;
use randers_lie::randers::{random_orthonormal_pair, sample_rng};
use randers_lie::{mu_coefficients, tolerance, AlgebraVector, FlagSample, Geometry, GeometryError, RandersStructure};
use rayon::prelude::*;

use crate::config::{AlgebraSource, AnalysisConfig, Command, DriftSpec};
use crate::error::CliError;
use crate::report::*;

/// One row of a geodesic trajectory: `t, u_1..u_n, energy, F(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub velocity: Vec<f64>,
    pub energy: f64,
    pub finsler: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: ReportDocument,
    /// Present for the `geodesic` command.
    pub trajectory: Option<Vec<TrajectoryRow>>,
}

pub fn run(config: &AnalysisConfig, command: Command) -> Result<Outcome, CliError> {
    let r = &config.resolved;
    let geometry = Geometry::new(r.algebra.clone(), r.metric.clone())?;
    let mut doc = ReportDocument {
        schema_version: SCHEMA_VERSION,
        engine: format!("randers-lie {}", randers_lie::VERSION),
        command,
        config: echo(config),
        tolerances: Tolerances {
            null: tolerance::NULL,
            positive_definite: tolerance::POSITIVE_DEFINITE,
            flag_relative: tolerance::FLAG_RELATIVE,
            jacobi: r.algebra.jacobi_tolerance(),
            numeric: geometry.tolerance(),
        },
        check: None,
        connection: None,
        curvature: None,
        sectional: None,
        parallel: None,
        milnor: None,
        randers: None,
        scan: None,
        geodesic: None,
        notes: Vec::new(),
    };
    let mut trajectory = None;

    match command {
        Command::Check => doc.check = Some(check(&geometry)),
        Command::Connection => doc.connection = Some(connection(&geometry)),
        Command::Curvature => doc.curvature = Some(curvature(&geometry)),
        Command::Sectional => doc.sectional = Some(sectional(config, &geometry)?),
        Command::Parallel => doc.parallel = Some(parallel(&geometry)),
        Command::Milnor => doc.milnor = Some(milnor(&geometry)?),
        Command::Randers => {
            let rs = randers(config, &geometry)?;
            doc.randers = Some(randers_section(config, &rs)?);
        }
        Command::Scan => {
            let rs = randers(config, &geometry)?;
            doc.scan = Some(scan(config, &rs)?);
        }
        Command::Geodesic => {
            let rs = randers(config, &geometry)?;
            if !rs.is_berwald() {
                return Err(GeometryError::NotBerwald.into());
            }
            let (section, rows) = geodesic(config, &rs, true)?;
            doc.geodesic = Some(section);
            trajectory = rows;
            doc.notes.push(COMPLETENESS_NOTE.into());
        }
        Command::Report => report(config, &geometry, &mut doc)?,
    }
    Ok(Outcome {
        document: doc,
        trajectory,
    })
}

const COMPLETENESS_NOTE: &str =
    "conservation over a finite horizon is a numerical consistency check, not a proof of completeness";

fn report(config: &AnalysisConfig, geometry: &Geometry, doc: &mut ReportDocument) -> Result<(), CliError> {
    let check = check(geometry);
    let unimodular = check.unimodular;
    doc.check = Some(check);
    doc.connection = Some(connection(geometry));
    doc.curvature = Some(curvature(geometry));
    doc.parallel = Some(parallel(geometry));
    if geometry.dim() == 3 && unimodular {
        doc.milnor = Some(milnor(geometry)?);
    } else {
        doc.notes
            .push("Milnor frame skipped: it needs a unimodular 3-dimensional algebra".into());
    }
    let rs = randers(config, geometry)?;
    if config.resolved.drift.is_some() {
        doc.randers = Some(randers_section(config, &rs)?);
    }
    if geometry.dim() < 2 {
        doc.notes
            .push("flag curvature scan skipped: there are no planes in dimension 1".into());
        doc.geodesic = Some(geodesic(config, &rs, false)?.0);
        doc.notes.push(COMPLETENESS_NOTE.into());
    } else if rs.is_berwald() {
        doc.scan = Some(scan(config, &rs)?);
        doc.geodesic = Some(geodesic(config, &rs, false)?.0);
        doc.notes.push(COMPLETENESS_NOTE.into());
    } else {
        doc.notes
            .push("flag curvature scan and geodesic check skipped: the drift is not parallel".into());
    }
    Ok(())
}

fn to_vec(v: &AlgebraVector) -> Vec<f64> {
    v.iter().copied().collect()
}

fn echo(config: &AnalysisConfig) -> ConfigEcho {
    let r = &config.resolved;
    let n = r.algebra.dim();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let b = r.algebra.basis_bracket(i, j);
            if b.amax() > 0.0 {
                brackets.push(VectorEntry {
                    i: i + 1,
                    j: j + 1,
                    value: to_vec(&b),
                });
            }
        }
    }
    let (preset, params) = match (&config.algebra, &r.preset) {
        (AlgebraSource::Preset { name, .. }, Some(p)) => (
            Some(name.as_str().to_string()),
            Some(ParamsEcho {
                lambda: p.params.lambda,
                alpha: p.params.alpha,
                c1: p.params.c1,
                c2: p.params.c2,
                n: p.params.n,
                u: p.params.u,
            }),
        ),
        _ => (None, None),
    };
    let gram = r.metric.gram();
    let drift = r.drift.as_ref().map(|x| DriftEcho {
        source: match &config.drift {
            Some(DriftSpec::Parallel { index, .. }) => format!("parallel:{index}"),
            Some(DriftSpec::Preset) => "preset".into(),
            _ => "vector".into(),
        },
        vector: to_vec(x),
    });
    let o = &config.options;
    ConfigEcho {
        algebra: AlgebraEcho {
            dim: n,
            preset,
            params,
            brackets,
        },
        gram: (0..n).map(|i| (0..n).map(|j| gram[(i, j)]).collect()).collect(),
        drift,
        seed: o.seed,
        samples: o.samples,
        flagpole: o.flagpole.clone(),
        edge: o.edge.clone(),
        geodesic: GeodesicEcho {
            v0: initial_velocity(config).iter().copied().collect(),
            t: o.t,
            steps: o.steps,
        },
    }
}

/// The configured `v0`, or the all-ones vector.
fn initial_velocity(config: &AnalysisConfig) -> AlgebraVector {
    match &config.options.v0 {
        Some(v) => DVector::from_column_slice(v),
        None => DVector::from_element(config.dim(), 1.0),
    }
}

fn check(geometry: &Geometry) -> CheckSection {
    let a = &geometry.algebra;
    CheckSection {
        dim: a.dim(),
        jacobi_residual: a.jacobi_residual(),
        jacobi_tolerance: a.jacobi_tolerance(),
        unimodular: a.is_unimodular(),
        ad_traces: a.ad_traces(),
        metric_min_eigenvalue: geometry.metric.gram().symmetric_eigenvalues().min(),
    }
}

fn connection(geometry: &Geometry) -> ConnectionSection {
    let c = &geometry.connection;
    let n = geometry.dim();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(VectorEntry {
                i: i + 1,
                j: j + 1,
                value: to_vec(&c.basis(i, j)),
            });
        }
    }
    ConnectionSection {
        entries,
        max_abs: c.max_abs(),
        torsion_residual: c.torsion_residual(&geometry.algebra),
        compatibility_residual: c.compatibility_residual(&geometry.metric),
    }
}

fn curvature(geometry: &Geometry) -> CurvatureSection {
    let r = &geometry.curvature;
    let n = geometry.dim();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                entries.push(CurvatureEntry {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                    value: to_vec(&r.basis(i, j, k)),
                });
            }
        }
    }
    let s = r.symmetry_residuals(&geometry.metric);
    CurvatureSection {
        entries,
        max_abs: r.max_abs(),
        flat: geometry.is_flat(),
        antisymmetry: s.antisymmetry,
        skew_last_pair: s.skew_last_pair,
        pair_symmetry: s.pair_symmetry,
        bianchi: s.bianchi,
    }
}

fn plane(y: &AlgebraVector, v: &AlgebraVector, value: f64) -> Plane {
    Plane {
        y: to_vec(y),
        v: to_vec(v),
        value,
    }
}

fn flag_plane(s: &FlagSample) -> Plane {
    plane(&s.flagpole, &s.edge, s.value)
}

fn given_plane(config: &AnalysisConfig) -> Option<(AlgebraVector, AlgebraVector)> {
    let o = &config.options;
    Some((
        DVector::from_column_slice(o.flagpole.as_ref()?),
        DVector::from_column_slice(o.edge.as_ref()?),
    ))
}

fn sectional(config: &AnalysisConfig, geometry: &Geometry) -> Result<SectionalSection, CliError> {
    if geometry.dim() < 2 {
        return Err(GeometryError::ParamOutOfRange("sectional curvature needs dimension at least 2".into()).into());
    }
    if let Some((y, v)) = given_plane(config) {
        let k = geometry.sectional_curvature(&v, &y)?;
        let p = plane(&y, &v, k);
        return Ok(SectionalSection {
            samples: 0,
            seed: None,
            max: p.clone(),
            min: p,
        });
    }
    let (samples, seed) = (config.options.samples, config.options.seed);
    let metric = &geometry.metric;
    let drawn: Vec<Plane> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let (y, v) = random_orthonormal_pair(metric, &mut rng);
            geometry.sectional_curvature(&v, &y).map(|k| plane(&y, &v, k))
        })
        .collect::<Result<_, _>>()?;
    // strict comparisons keep the lowest index on ties
    let mut max = &drawn[0];
    let mut min = &drawn[0];
    for p in &drawn[1..] {
        if p.value > max.value {
            max = p;
        }
        if p.value < min.value {
            min = p;
        }
    }
    Ok(SectionalSection {
        samples,
        seed: Some(seed),
        max: max.clone(),
        min: min.clone(),
    })
}

fn parallel(geometry: &Geometry) -> ParallelSection {
    let space = geometry.parallel_space();
    let max_residual = space
        .basis
        .iter()
        .map(|b| parallel_residual(&geometry.connection, b))
        .fold(0.0, f64::max);
    ParallelSection {
        dimension: space.dimension(),
        basis: space.basis.iter().map(to_vec).collect(),
        max_residual,
    }
}

fn milnor(geometry: &Geometry) -> Result<MilnorSection, CliError> {
    let m = geometry.algebra.milnor_frame(&geometry.metric)?;
    Ok(MilnorSection {
        constants: m.constants,
        mu: mu_coefficients(m.constants).mu,
        frame: m.frame.column_iter().map(|c| c.iter().copied().collect()).collect(),
        bracket_defect: m.bracket_defect(&geometry.algebra),
    })
}

fn randers(config: &AnalysisConfig, geometry: &Geometry) -> Result<RandersStructure, CliError> {
    let drift = config
        .resolved
        .drift
        .clone()
        .unwrap_or_else(|| DVector::zeros(geometry.dim()));
    Ok(RandersStructure::new(geometry.clone(), drift)?)
}

fn randers_section(config: &AnalysisConfig, rs: &RandersStructure) -> Result<RandersSection, CliError> {
    let flag = match given_plane(config) {
        Some((y, v)) => Some(flag_plane(&rs.flag_curvature(&y, &v)?)),
        None => None,
    };
    Ok(RandersSection {
        drift: to_vec(rs.drift()),
        drift_norm: rs.drift_norm(),
        parallel_residual: rs.parallel_residual(),
        berwald: rs.is_berwald(),
        labels: rs.labels().iter().map(|l| l.to_string()).collect(),
        flag,
    })
}

fn scan(config: &AnalysisConfig, rs: &RandersStructure) -> Result<ScanSection, CliError> {
    let report = rs.nonpositivity_scan(config.options.samples, config.options.seed)?;
    Ok(ScanSection {
        samples: report.samples,
        seed: report.seed,
        max_abs: report.max_abs(),
        max: flag_plane(&report.max),
        min: flag_plane(&report.min),
    })
}

fn geodesic(
    config: &AnalysisConfig,
    rs: &RandersStructure,
    record: bool,
) -> Result<(GeodesicSection, Option<Vec<TrajectoryRow>>), CliError> {
    let (t, steps) = (config.options.t, config.options.steps);
    let u0 = initial_velocity(config);
    let metric = rs.metric();
    let x = rs.drift();
    let e0 = metric.inner(&u0, &u0);
    let p0 = metric.inner(x, &u0);
    let f0 = e0.sqrt() + p0;
    let (mut de, mut dp, mut df) = (0.0f64, 0.0f64, 0.0f64);
    let mut rows = record.then(|| Vec::with_capacity(steps + 1));
    let last = integrate(&rs.geometry().connection, &u0, t, steps, |time, u| {
        let e = metric.inner(u, u);
        let p = metric.inner(x, u);
        let f = e.sqrt() + p;
        de = de.max((e - e0).abs());
        dp = dp.max((p - p0).abs());
        df = df.max((f - f0).abs());
        if let Some(rows) = rows.as_mut() {
            rows.push(TrajectoryRow {
                t: time,
                velocity: to_vec(u),
                energy: e,
                finsler: f,
            });
        }
    })?;
    Ok((
        GeodesicSection {
            v0: to_vec(&u0),
            t,
            steps,
            final_velocity: to_vec(&last),
            energy_drift: de,
            drift_pairing_drift: dp,
            finsler_drift: df,
        },
        rows,
    ))
}

/// CSV with header `t,u1,...,un,energy,F`, floats at 17 significant digits.
pub fn trajectory_csv(rows: &[TrajectoryRow]) -> String {
    let n = rows.first().map_or(0, |r| r.velocity.len());
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",u{i}");
    }
    out.push_str(",energy,F\n");
    for r in rows {
        let _ = write!(out, "{:.16e}", r.t);
        for x in &r.velocity {
            let _ = write!(out, ",{x:.16e}");
        }
        let _ = writeln!(out, ",{:.16e},{:.16e}", r.energy, r.finsler);
    }
    out
}
