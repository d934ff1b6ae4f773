use std::f64::consts::PI;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use moebius_core::contraction::{
    region_scan, run_agreement_trials, volterra_contraction_oracle, CellOutcome, Classification, RegionScan, Window,
};
use moebius_core::curves::{compare_wv, ReferenceBoundary};
use moebius_core::geometry::numerical_range_boundary;
use moebius_core::operators::{build_volterra, operator_power};
use moebius_core::spectral::eigenvalues;
use moebius_core::tolerances::WITNESS_QUADRATURE_TOL;
use moebius_core::witnesses::{witness_g_quotient, witness_gr_quotient, witness_h_quotient, Method};
use moebius_core::{Complex64, MoebiusParams, SpectralConfig};

use crate::error::{CliError, CliResult};
use crate::svg::{self, Curve};

/// Where and in which formats to write.
pub struct Output {
    pub dir: PathBuf,
    pub csv: bool,
    pub svg: bool,
}

impl Output {
    /// Neither flag given means both formats.
    pub fn new(dir: PathBuf, csv: bool, svg: bool) -> Self {
        let both = !csv && !svg;
        Self {
            dir,
            csv: csv || both,
            svg: svg || both,
        }
    }

    fn prepare(&self) -> CliResult<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))
    }

    fn write(&self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_writer(Vec::new());
        let to_io = |e: csv::Error| CliError::io(&path, std::io::Error::other(e));
        w.write_record(header).map_err(to_io)?;
        for row in rows {
            w.write_record(row).map_err(to_io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(&path, std::io::Error::other(e.to_string())))?;
        let written = self.write(name, &bytes)?;
        println!("wrote {}", written.display());
        Ok(())
    }

    fn write_svg(&self, name: &str, svg: &str) -> CliResult<()> {
        let written = self.write(name, svg.as_bytes())?;
        println!("wrote {}", written.display());
        Ok(())
    }
}

/// Whether the run found a violation of the property it checks.
pub struct Outcome {
    pub violation: bool,
}

/// Shortest round-trip form, with an exponent for very small or large values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn grid_size(n: usize) -> CliResult<usize> {
    if n < 2 {
        return Err(CliError::Usage(format!("grid size must be at least 2, got {n}")));
    }
    Ok(n)
}

pub fn verify_theorem1(
    out: &Output,
    trials: usize,
    dims: RangeInclusive<usize>,
    seed: u64,
    cap: f64,
    cfg: &SpectralConfig,
) -> CliResult<Outcome> {
    if trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    out.prepare()?;
    let s = run_agreement_trials(trials, dims, seed, cap, cfg)?;
    let rows: Vec<Vec<String>> = s
        .rows
        .iter()
        .map(|r| {
            vec![
                r.trial.to_string(),
                r.dim.to_string(),
                num(r.lambda.re),
                num(r.lambda.im),
                num(r.mu.re),
                num(r.mu.im),
                r.direct_norm.map(num).unwrap_or_default(),
                num(r.quad_gap),
                num(r.support_lhs),
                num(r.support_rhs),
                r.agree.to_string(),
                r.judged.to_string(),
            ]
        })
        .collect();
    out.write_csv(
        "verify_theorem1.csv",
        &[
            "trial", "dim", "lambda_re", "lambda_im", "mu_re", "mu_im", "direct_norm", "quad_gap", "support_lhs",
            "support_rhs", "agree", "judged",
        ],
        &rows,
    )?;
    let singular = s.rows.iter().filter(|r| r.direct_norm.is_none()).count();
    println!(
        "{} trials: {} judged, {} within tie bands, {} singular pencils, {} disagreements",
        s.rows.len(),
        s.judged,
        s.rows.len() - s.judged - singular,
        singular,
        s.disagreements
    );
    Ok(Outcome {
        violation: s.disagreements > 0,
    })
}

fn cell_fields(outcome: CellOutcome) -> (String, &'static str) {
    match outcome {
        CellOutcome::Norm {
            direct_norm,
            classification,
        } => (num(direct_norm), classification.as_str()),
        CellOutcome::SingularPencil { .. } => (String::new(), "singular"),
    }
}

fn count(scan: &RegionScan, class: Classification) -> usize {
    scan.cells
        .iter()
        .filter(|c| matches!(c.outcome, CellOutcome::Norm { classification, .. } if classification == class))
        .count()
}

pub struct RegionArgs {
    pub mu: Complex64,
    pub n: usize,
    pub window: Window,
    pub resolution: (usize, usize),
    pub band: f64,
}

/// Classifies the `lambda`-plane for `V_N` and checks it against the exact
/// segment: cells on `[-conj(mu), mu)` must be Boundary and no cell may be a
/// strict Contraction.
pub fn volterra_region(out: &Output, a: &RegionArgs, cfg: &SpectralConfig) -> CliResult<Outcome> {
    let v = build_volterra(grid_size(a.n)?)?;
    out.prepare()?;
    let scan = region_scan(v.matrix(), a.mu, a.window, a.resolution, a.band, cfg)?;

    let mut rows = Vec::with_capacity(scan.cells.len());
    let (mut on_segment, mut violations) = (0usize, 0usize);
    for cell in &scan.cells {
        let predicted = if cell.lambda == a.mu {
            "identity"
        } else if volterra_contraction_oracle(MoebiusParams::new(cell.lambda, a.mu)?)? {
            "segment"
        } else {
            "off"
        };
        let (norm, class) = cell_fields(cell.outcome);
        on_segment += usize::from(predicted == "segment");
        let bad = match cell.outcome {
            CellOutcome::Norm { classification, .. } => {
                classification == Classification::Contraction
                    || (predicted == "segment" && classification != Classification::Boundary)
            }
            CellOutcome::SingularPencil { .. } => false,
        };
        violations += usize::from(bad);
        rows.push(vec![
            cell.i.to_string(),
            cell.j.to_string(),
            num(cell.lambda.re),
            num(cell.lambda.im),
            norm,
            class.to_string(),
            predicted.to_string(),
        ]);
    }
    if out.csv {
        out.write_csv(
            "volterra_region.csv",
            &["i", "j", "lambda_re", "lambda_im", "direct_norm", "classification", "predicted"],
            &rows,
        )?;
    }
    if out.svg {
        let segment = (a.mu.re > 0.0).then(|| (-a.mu.conj(), a.mu));
        let title = format!("||(I+λV)(I+μV)^-1||, μ = {}, N = {}", a.mu, a.n);
        out.write_svg("volterra_region.svg", &svg::region_heatmap(&scan, &title, segment))?;
    }
    let singular = scan.cells.len()
        - count(&scan, Classification::Contraction)
        - count(&scan, Classification::Boundary)
        - count(&scan, Classification::NonContraction);
    println!(
        "{} cells: {} contraction, {} boundary, {} noncontraction, {} singular; {} on the predicted segment; {} violations",
        scan.cells.len(),
        count(&scan, Classification::Contraction),
        count(&scan, Classification::Boundary),
        count(&scan, Classification::NonContraction),
        singular,
        on_segment,
        violations
    );
    Ok(Outcome {
        violation: violations > 0,
    })
}

/// Classifies the `lambda`-plane for `V_N^power`; every cell other than
/// `lambda = mu` must have norm above 1.
pub fn vn_region(out: &Output, power: u32, a: &RegionArgs, cfg: &SpectralConfig) -> CliResult<Outcome> {
    if power < 2 {
        return Err(CliError::Usage(format!("power must be at least 2, got {power}")));
    }
    let t = operator_power(&build_volterra(grid_size(a.n)?)?, power)?;
    out.prepare()?;
    let scan = region_scan(t.matrix(), a.mu, a.window, a.resolution, a.band, cfg)?;

    let mut violations = 0usize;
    let mut boundary_reach = 0.0f64;
    let mut rows = Vec::with_capacity(scan.cells.len());
    for cell in &scan.cells {
        if cell.lambda != a.mu {
            if let CellOutcome::Norm {
                direct_norm,
                classification,
            } = cell.outcome
            {
                violations += usize::from(direct_norm <= 1.0);
                if classification == Classification::Boundary {
                    boundary_reach = boundary_reach.max((cell.lambda - a.mu).norm());
                }
            }
        }
        let (norm, class) = cell_fields(cell.outcome);
        rows.push(vec![
            cell.i.to_string(),
            cell.j.to_string(),
            num(cell.lambda.re),
            num(cell.lambda.im),
            norm,
            class.to_string(),
        ]);
    }
    if out.csv {
        out.write_csv(
            "vn_region.csv",
            &["i", "j", "lambda_re", "lambda_im", "direct_norm", "classification"],
            &rows,
        )?;
    }
    if out.svg {
        let title = format!("||(I+λV^{power})(I+μV^{power})^-1||, μ = {}, N = {}", a.mu, a.n);
        out.write_svg("vn_region.svg", &svg::region_heatmap(&scan, &title, None))?;
    }
    match scan.min_off_diagonal_norm() {
        Some(m) => println!(
            "minimum norm off lambda = mu: {m:.12} (margin {:.3e}); boundary cells reach |lambda - mu| <= {boundary_reach:.3}; {violations} cells with norm <= 1",
            m - 1.0
        ),
        None => println!("no cell off lambda = mu has a norm (singular pencil)"),
    }
    Ok(Outcome {
        violation: violations > 0,
    })
}

pub enum MatrixSource {
    Volterra(usize),
    File(PathBuf),
}

pub fn numrange(out: &Output, source: &MatrixSource, angles: usize, cfg: &SpectralConfig) -> CliResult<Outcome> {
    // eigenvalues are marked for small file matrices
    let (boundary, reference, title, marks) = match source {
        MatrixSource::Volterra(n) => {
            let cmp = compare_wv(&build_volterra(grid_size(*n)?)?, angles, cfg)?;
            println!("max support deviation from the W(V) reference curve: {:.3e}", cmp.max_deviation);
            (cmp.boundary, Some(ReferenceBoundary::new()), format!("W(V_N), N = {n}"), Vec::new())
        }
        MatrixSource::File(path) => {
            let m = crate::matrix_file::read(path)?;
            let b = numerical_range_boundary(&m, angles, cfg)?;
            let marks = if m.dim() <= 64 { eigenvalues(&m)? } else { Vec::new() };
            (b, None, format!("W(A), A from {}", file_label(path)), marks)
        }
    };
    out.prepare()?;
    if out.csv {
        let rows: Vec<Vec<String>> = boundary
            .samples()
            .iter()
            .map(|s| vec![num(s.theta), num(s.support), num(s.point.re), num(s.point.im)])
            .collect();
        out.write_csv("numrange.csv", &["theta", "support", "re", "im"], &rows)?;
    }
    if out.svg {
        let points: Vec<Complex64> = boundary.points().collect();
        let mut layers = vec![Curve {
            points: &points,
            color: "#1f4fbf",
            label: "computed boundary",
            closed: true,
            dashed: false,
        }];
        if let Some(r) = &reference {
            layers.push(Curve {
                points: r.samples(),
                color: "#c0392b",
                label: "reference curve",
                closed: true,
                dashed: true,
            });
        }
        out.write_svg("numrange.svg", &svg::curves(&title, &layers, &marks))?;
    }
    let right = boundary.rightmost();
    let top = boundary.topmost();
    println!(
        "{} boundary samples; rightmost {:.6}, topmost {:.6}",
        boundary.samples().len(),
        right,
        top
    );
    Ok(Outcome { violation: false })
}

fn file_label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

/// Quotients for `g_n^{±}` and `h_n` up to `n_max`, then each `g_r`.
/// A closed-form/quadrature mismatch above `1e-6` is a violation; range
/// errors are recorded in the row.
pub fn witnesses(out: &Output, n_max: u32, gr: &[(u32, f64, f64)]) -> CliResult<Outcome> {
    out.prepare()?;
    let mut rows = Vec::new();
    let mut violations = 0usize;
    let mut closed_vs_quad = |id: String, closed: Complex64, quad: Complex64, rows: &mut Vec<Vec<String>>| {
        let diff = (closed - quad).norm();
        violations += usize::from(!(diff <= WITNESS_QUADRATURE_TOL));
        rows.push(vec![
            id,
            String::new(),
            String::new(),
            num(closed.re),
            num(closed.im),
            num(quad.re),
            num(quad.im),
            num(diff),
            String::new(),
            String::new(),
            String::new(),
        ]);
    };
    for n in 1..=n_max {
        for sign in [1i8, -1] {
            let c = witness_g_quotient(n, sign, Method::ClosedForm)?.quotient;
            let q = witness_g_quotient(n, sign, Method::Quadrature)?.quotient;
            closed_vs_quad(format!("g{}{n}", if sign > 0 { '+' } else { '-' }), c, q, &mut rows);
        }
        let c = witness_h_quotient(n, Method::ClosedForm)?.quotient;
        let q = witness_h_quotient(n, Method::Quadrature)?.quotient;
        closed_vs_quad(format!("h{n}"), c, q, &mut rows);
    }
    for &(n, theta, r) in gr {
        let target = wrap(f64::from(n) * theta);
        let mut row = vec![format!("gr{n}"), num(theta), num(r)];
        match witness_gr_quotient(n, theta, r) {
            Ok(w) => row.extend([
                String::new(),
                String::new(),
                num(w.quotient.re),
                num(w.quotient.im),
                String::new(),
                num(target),
                num(w.quotient.arg()),
                String::new(),
            ]),
            Err(moebius_core::Error::InvalidArgument(m)) => return Err(CliError::Usage(m)),
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 5));
                row.extend([num(target), String::new(), e.to_string()]);
            }
        }
        rows.push(row);
    }
    out.write_csv(
        "witnesses.csv",
        &[
            "id", "theta", "r", "closed_re", "closed_im", "quad_re", "quad_im", "abs_diff", "target_arg", "measured_arg",
            "error",
        ],
        &rows,
    )?;
    println!("{} witness rows, {violations} closed-form mismatches above {WITNESS_QUADRATURE_TOL:e}", rows.len());
    Ok(Outcome {
        violation: violations > 0,
    })
}

/// Support of the computed `W(V_N)` against the reference curve, per angle.
pub fn curves(out: &Output, n: usize, angles: usize, cfg: &SpectralConfig) -> CliResult<Outcome> {
    let cmp = compare_wv(&build_volterra(grid_size(n)?)?, angles, cfg)?;
    out.prepare()?;
    if out.csv {
        let rows: Vec<Vec<String>> = cmp
            .per_angle
            .iter()
            .map(|d| vec![num(d.theta), num(d.computed), num(d.reference), num(d.computed - d.reference)])
            .collect();
        out.write_csv("curves.csv", &["theta", "computed", "reference", "deviation"], &rows)?;
    }
    if out.svg {
        let reference = ReferenceBoundary::new();
        let points: Vec<Complex64> = cmp.boundary.points().collect();
        let layers = [
            Curve {
                points: reference.samples(),
                color: "#c0392b",
                label: "reference curve",
                closed: true,
                dashed: true,
            },
            Curve {
                points: &points,
                color: "#1f4fbf",
                label: "computed W(V_N)",
                closed: true,
                dashed: false,
            },
        ];
        let (a, b) = cmp.boundary.longest_edge();
        out.write_svg("curves.svg", &svg::curves(&format!("W(V), N = {n}"), &layers, &[a, b]))?;
    }
    let (a, b) = cmp.boundary.longest_edge();
    println!(
        "max support deviation {:.3e} over {} angles; rightmost {:.6}; face endpoints {:.6}, {:.6}",
        cmp.max_deviation,
        cmp.per_angle.len(),
        cmp.boundary.rightmost().re,
        a,
        b
    );
    Ok(Outcome { violation: false })
}
