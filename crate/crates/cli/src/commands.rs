use std::io::Read;

use serde::Serialize;
use serde_json::{json, Value};
use sphere_re::dynamics::{euclidean_limit_check, PlanarState};
use sphere_re::euler::{det_grid, ere_scan, euler_limit, solve_ere, ShapeClass};
use sphere_re::inertia::{char_poly_coeffs, principal_axes, shape_matrix};
use sphere_re::lagrange::{isosceles_lre_scan, lre_polish, lre_reconstruct, scalene_lre_search, Orientation};
use sphere_re::verify::{verify_batch, verify_re, ReCandidate, VerificationReport};
use sphere_re::{MeridianShape3, PotentialKind, Shape3};

use crate::config::{Job, Mode};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Num(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    /// Rows as JSON objects keyed by column name.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Object(self.header.iter().zip(r).map(|(h, c)| (h.to_string(), c.json())).collect()))
                .collect(),
        )
    }
}

/// What a command produced: always a JSON result, plus a table for the
/// tabular modes.
pub struct Output {
    pub result: Value,
    pub table: Option<Table>,
}

impl Output {
    fn json(v: impl Serialize) -> Result<Self, CliError> {
        Ok(Self { result: serde_json::to_value(v)?, table: None })
    }

    fn table(t: Table) -> Self {
        Self { result: t.to_json(), table: Some(t) }
    }
}

pub fn envelope(job: &Job, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": job.mode.name(),
        "masses": job.masses.values(),
        "potential": job.potential.name(),
        "result": result,
    })
}

pub fn run(job: &Job) -> Result<Output, CliError> {
    match job.mode {
        Mode::EreScan => ere_scan_cmd(job),
        Mode::EreSolve => ere_solve_cmd(job),
        Mode::LreScan => lre_scan_cmd(job),
        Mode::LreSolve => lre_solve_cmd(job),
        Mode::Axis => axis_cmd(job),
        Mode::Verify => verify_cmd(job),
        Mode::EuclidLimit => euclid_cmd(job),
        Mode::ScaleneLreSearch => scalene_cmd(job),
    }
}

const VERIFY_COLUMNS: [&str; 6] =
    ["verified", "sigma_drift", "energy_drift", "momentum_drift", "frame_drift", "aborted_at"];

fn verify_cells(r: Option<&VerificationReport>) -> Vec<Cell> {
    match r {
        None => vec![Cell::Empty; VERIFY_COLUMNS.len()],
        Some(r) => vec![
            r.pass.into(),
            r.sigma_drift.into(),
            r.energy_drift.into(),
            r.momentum_drift.iter().cloned().fold(0.0, f64::max).into(),
            r.frame_drift.into(),
            r.aborted.as_ref().map(|a| a.time).into(),
        ],
    }
}

fn ere_scan_cmd(job: &Job) -> Result<Output, CliError> {
    if job.raw {
        let rows = det_grid(&job.masses, &job.potential, job.grid, job.x_grid)
            .into_iter()
            .map(|(a, x, d)| vec![a.into(), x.into(), d.into()])
            .collect();
        return Ok(Output::table(Table { header: vec!["a", "x", "det"], rows }));
    }
    let hits = ere_scan(&job.masses, &job.potential, job.grid, job.x_grid);
    let reports: Vec<Option<VerificationReport>> = if job.verify {
        let solved: Vec<(usize, ReCandidate)> = hits
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.solution.as_ref().map(|s| (i, ReCandidate::from_ere(s, &job.masses, &job.potential))))
            .collect();
        let cands: Vec<ReCandidate> = solved.iter().map(|(_, c)| c.clone()).collect();
        let mut out = vec![None; hits.len()];
        for ((i, _), r) in solved.iter().zip(verify_batch(&cands, job.t_end, job.dt)) {
            out[*i] = Some(r);
        }
        out
    } else {
        vec![None; hits.len()]
    };
    let mut header = vec![
        "a", "x", "det", "class", "theta1", "theta2", "theta3", "s", "omega2", "fixed_point", "degenerate",
        "relative_residual",
    ];
    if job.verify {
        header.extend(VERIFY_COLUMNS);
    }
    let rows = hits
        .iter()
        .zip(&reports)
        .map(|(h, r)| {
            let class = match h.class {
                ShapeClass::Isosceles => "isosceles",
                ShapeClass::Scalene => "scalene",
            };
            let mut row = vec![h.shape.a.into(), h.shape.x.into(), h.det.into(), Cell::Text(class.into())];
            match &h.solution {
                Some(s) => {
                    row.extend(s.thetas.map(Cell::from));
                    row.push(s.s.map_or(Cell::Empty, |v| Cell::Int(v.into())));
                    row.push(s.omega2.into());
                    row.push(s.fixed_point.into());
                    row.push(s.degenerate.into());
                    row.push(s.relative_residual().into());
                }
                None => row.extend(vec![Cell::Empty; 8]),
            }
            if job.verify {
                row.extend(verify_cells(r.as_ref()));
            }
            row
        })
        .collect();
    Ok(Output::table(Table { header, rows }))
}

fn maybe_verify(job: &Job, cand: &ReCandidate) -> Option<VerificationReport> {
    job.verify.then(|| verify_re(cand, job.t_end, job.dt))
}

fn ere_solve_cmd(job: &Job) -> Result<Output, CliError> {
    let [a, x] = job.shape_values::<2>("a,x")?;
    let shape = MeridianShape3::new(a, x)?;
    let sol = solve_ere(&shape, &job.masses, &job.potential)?;
    let cand = ReCandidate::from_ere(&sol, &job.masses, &job.potential);
    Output::json(json!({
        "shape": { "a": shape.a, "x": shape.x },
        "theta": sol.thetas,
        "s": sol.s,
        "omega2": sol.omega2,
        "fixed_point": sol.fixed_point,
        "degenerate": sol.degenerate,
        "residuals": sol.residuals,
        "relative_residual": sol.relative_residual(),
        "candidate": cand,
        "verification": maybe_verify(job, &cand),
    }))
}

fn lre_scan_cmd(job: &Job) -> Result<Output, CliError> {
    if !job.masses.are_equal() || !matches!(job.potential, PotentialKind::Cotangent) {
        return Err(CliError::validation(
            "unsupported_masses",
            "lre-scan traces the equal-mass cotangent isosceles family",
        ));
    }
    // λ and ω² are linear in the common mass.
    let m = job.masses[0];
    let points = isosceles_lre_scan(job.sigma12_grid, job.samples);
    let reports: Vec<Option<VerificationReport>> = if job.verify {
        let cands: Vec<Option<ReCandidate>> = points
            .iter()
            .map(|p| {
                let shape = Shape3::new(p.sigma12, p.sigma, p.sigma).ok()?;
                let c = lre_reconstruct(&shape, &job.masses, &job.potential, Orientation::CANONICAL).ok()?;
                Some(ReCandidate::from_lre(&c, &job.masses, &job.potential))
            })
            .collect();
        let present: Vec<ReCandidate> = cands.iter().flatten().cloned().collect();
        let mut done = verify_batch(&present, job.t_end, job.dt).into_iter();
        cands.iter().map(|c| c.as_ref().and_then(|_| done.next())).collect()
    } else {
        vec![None; points.len()]
    };
    let mut header = vec!["sigma12", "sigma", "omega2", "lambda", "equilateral", "residual", "mirror_q"];
    if job.verify {
        header.extend(VERIFY_COLUMNS);
    }
    let rows = points
        .iter()
        .zip(&reports)
        .map(|(p, r)| {
            let mut row = vec![
                p.sigma12.into(),
                p.sigma.into(),
                (m * p.omega2).into(),
                (m * p.lambda).into(),
                p.equilateral.into(),
                (m * p.residual).into(),
                p.mirror_q.into(),
            ];
            if job.verify {
                row.extend(verify_cells(r.as_ref()));
            }
            row
        })
        .collect();
    Ok(Output::table(Table { header, rows }))
}

fn lre_solve_cmd(job: &Job) -> Result<Output, CliError> {
    let [s12, s23, s31] = job.shape_values::<3>("s12,s23,s31")?;
    let input = Shape3::new(s12, s23, s31)?;
    let shape = lre_polish(&input, &job.masses, &job.potential)?;
    let canon = lre_reconstruct(&shape, &job.masses, &job.potential, Orientation::CANONICAL)?;
    let orientations = Orientation::all()
        .iter()
        .map(|&o| lre_reconstruct(&shape, &job.masses, &job.potential, o))
        .collect::<Result<Vec<_>, _>>()?;
    let cand = ReCandidate::from_lre(&canon, &job.masses, &job.potential);
    Output::json(json!({
        "input_shape": input.sides(),
        "shape": shape.sides(),
        "polished": shape != input,
        "psi_l": canon.psi_l,
        "lambda": canon.lambda,
        "cos_theta": canon.cos_thetas,
        "phi_diffs": canon.phi_diffs,
        "omega2": canon.omega2,
        "omega2_alt": canon.omega2_alt,
        "residuals": {
            "condition": canon.condition_residual,
            "eom": canon.eom_residual,
            "eom_relative": canon.relative_eom_residual(),
        },
        "orientations": orientations.iter().map(|c| json!({
            "orientation": c.orientation,
            "config": c.config,
            "cos_theta": c.cos_thetas,
            "phi_diffs": c.phi_diffs,
            "omega2": c.omega2,
        })).collect::<Vec<_>>(),
        "candidate": cand,
        "verification": maybe_verify(job, &cand),
    }))
}

fn axis_cmd(job: &Job) -> Result<Output, CliError> {
    let [s12, s23, s31] = job.shape_values::<3>("s12,s23,s31")?;
    let shape = Shape3::new(s12, s23, s31)?;
    let j = shape_matrix(&shape, &job.masses);
    let (c0, c1, c2) = char_poly_coeffs(&j.0);
    Output::json(json!({
        "shape": shape.sides(),
        "matrix": j.0,
        "char_poly": [c0, c1, c2],
        "eigenpairs": principal_axes(&j),
    }))
}

/// Accepts a bare candidate, an array of candidates, or the JSON written by
/// `ere-solve` / `lre-solve`.
pub fn parse_candidates(text: &str) -> Result<Vec<ReCandidate>, CliError> {
    let v: Value = serde_json::from_str(text)?;
    let v = match v.get("result") {
        Some(r) => r.get("candidate").cloned().unwrap_or_else(|| r.clone()),
        None => v,
    };
    let cands = match v {
        Value::Array(items) => items
            .into_iter()
            .map(|i| serde_json::from_value(i.get("candidate").cloned().unwrap_or(i)))
            .collect::<Result<Vec<ReCandidate>, _>>()?,
        other => vec![serde_json::from_value(other)?],
    };
    if cands.is_empty() {
        return Err(CliError::validation("empty_input", "no candidates to verify"));
    }
    Ok(cands)
}

fn verify_cmd(job: &Job) -> Result<Output, CliError> {
    let path = job
        .input
        .as_ref()
        .ok_or_else(|| CliError::validation("missing_input", "verify needs --input FILE (or - for stdin)"))?;
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)?
    };
    let cands = parse_candidates(&text)?;
    let reports = verify_batch(&cands, job.t_end, job.dt);
    let header = vec![
        "index", "kind", "pass", "sigma_drift", "theta_drift", "phi_dot_drift", "energy_drift", "cx_drift",
        "cy_drift", "cz_drift", "frame_drift", "steps", "dt", "T", "aborted_at", "abort_reason",
    ];
    let rows = reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let kind = serde_json::to_value(r.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            vec![
                i.into(),
                Cell::Text(kind),
                r.pass.into(),
                r.sigma_drift.into(),
                r.theta_drift.into(),
                r.phi_dot_drift.into(),
                r.energy_drift.into(),
                r.momentum_drift[0].into(),
                r.momentum_drift[1].into(),
                r.momentum_drift[2].into(),
                r.frame_drift.into(),
                r.steps.into(),
                r.dt.into(),
                r.t_end.into(),
                r.aborted.as_ref().map(|a| a.time).into(),
                r.aborted.as_ref().map_or(Cell::Empty, |a| Cell::Text(a.reason.clone())),
            ]
        })
        .collect();
    Ok(Output { result: serde_json::to_value(&reports)?, table: Some(Table { header, rows }) })
}

fn euclid_cmd(job: &Job) -> Result<Output, CliError> {
    let [r12, r23] = job.spacing;
    let euler = euler_limit(&job.masses, r12, r23, job.epsilon);
    let momentum = job.planar_state.as_ref().map(|p| {
        let three = |k: usize| [p[3 * k], p[3 * k + 1], p[3 * k + 2]];
        let planar = PlanarState { r: three(0), phi: three(1), r_dot: three(2), phi_dot: three(3) };
        euclidean_limit_check(&planar, &job.masses, job.epsilon)
    });
    Output::json(json!({ "euler": euler, "momentum": momentum }))
}

fn scalene_cmd(job: &Job) -> Result<Output, CliError> {
    Output::json(scalene_lre_search(job.resolution, job.margin, job.max_polish))
}
