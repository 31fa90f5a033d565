//! Direction scans over the lattice, their CSV/SVG output, and a hill
//! climb on the estimated irrationality measure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_integer::Integer;
use rayon::prelude::*;

use crate::analysis::{estimate_values, rho_predicted, trajectory_eigen, Convergence};
use crate::error::{Error, Result};
use crate::rat::to_decimal;
use crate::trajectory::{probe_walker, RatioVectors, Walker};
use crate::{BigRat, ExactCmf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orthant {
    /// Non-negative entries only.
    Positive,
    All,
}

/// Primitive nonzero integer vectors of Euclidean norm < radius.
///
/// 2-D output is ordered by angle atan2(v₂, v₁) ∈ (−π, π]; other
/// dimensions lexicographically.
pub fn enumerate_directions(d: usize, radius: f64, orthant: Orthant) -> Vec<Vec<i64>> {
    if d == 0 {
        return Vec::new();
    }
    let m = radius.ceil() as i64;
    let lo = if orthant == Orthant::Positive { 0 } else { -m };
    let mut out = Vec::new();
    let mut v = vec![lo; d];
    loop {
        let n2: i64 = v.iter().map(|x| x * x).sum();
        if n2 > 0 && (n2 as f64) < radius * radius && v.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1 {
            out.push(v.clone());
        }
        let mut i = d;
        loop {
            if i == 0 {
                if d == 2 {
                    out.sort_by(|a, b| angle(a).total_cmp(&angle(b)).then(a.cmp(b)));
                }
                return out;
            }
            i -= 1;
            if v[i] < m {
                v[i] += 1;
                break;
            }
            v[i] = lo;
        }
    }
}

/// atan2(v₂, v₁) for a 2-D vector.
pub fn angle(v: &[i64]) -> f64 {
    (v[1] as f64).atan2(v[0] as f64)
}

pub fn norm(v: &[i64]) -> f64 {
    (v.iter().map(|x| (x * x) as f64).sum::<f64>()).sqrt()
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub cmf: ExactCmf,
    pub x: Vec<BigRat>,
    pub vectors: RatioVectors,
    pub radius: f64,
    pub orthant: Orthant,
    /// Probe index; walks run to 2N.
    pub n: usize,
    pub workers: usize,
    /// Decimal places of l̂ in reports.
    pub digits: usize,
}

impl ScanConfig {
    pub fn new(cmf: ExactCmf, x: Vec<BigRat>, vectors: RatioVectors) -> Self {
        ScanConfig { cmf, x, vectors, radius: 8.0, orthant: Orthant::Positive, n: 100, workers: 1, digits: 30 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || !self.n.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!("N = {} must be positive and even", self.n)));
        }
        if self.radius < 1.0 {
            return Err(Error::InvalidConfig(format!("radius {} is below 1", self.radius)));
        }
        if self.x.len() != self.cmf.dim() {
            return Err(Error::InvalidConfig(format!("x has {} entries, CMF dimension is {}", self.x.len(), self.cmf.dim())));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectionReport {
    pub v: Vec<i64>,
    pub angle: Option<f64>,
    pub norm: f64,
    pub l_hat: Option<BigRat>,
    pub rho_norm: Option<f64>,
    pub delta_hat: Option<f64>,
    pub eta_norm: Option<f64>,
    pub log_moduli_norm: Vec<f64>,
    pub pp_ok: Option<bool>,
    /// (ln|λ₂| − ln|λ₁|)/|v| when the eigenvalues satisfy Poincaré–Perron.
    pub rho_predicted_norm: Option<f64>,
    /// All pair predictions ln|λ_k/λ_j|/|v|.
    pub rho_pairs_norm: Vec<f64>,
    pub classification: Option<Convergence>,
    pub error: Option<String>,
}

impl DirectionReport {
    fn empty(v: &[i64]) -> Self {
        DirectionReport {
            v: v.to_vec(),
            angle: (v.len() == 2).then(|| angle(v)),
            norm: norm(v),
            l_hat: None,
            rho_norm: None,
            delta_hat: None,
            eta_norm: None,
            log_moduli_norm: Vec::new(),
            pp_ok: None,
            rho_predicted_norm: None,
            rho_pairs_norm: Vec::new(),
            classification: None,
            error: None,
        }
    }

    fn note(&mut self, msg: String) {
        self.error = Some(match self.error.take() {
            Some(e) => format!("{e}; {msg}"),
            None => msg,
        });
    }

    /// The search score: δ̂ on converging directions, −∞ otherwise.
    pub fn score(&self) -> f64 {
        match (self.classification, self.delta_hat) {
            (Some(Convergence::Converging), Some(d)) => d,
            _ => f64::NEG_INFINITY,
        }
    }
}

/// Walks and analyzes one direction. Failures are recorded in `error`.
pub fn evaluate_direction(cfg: &ScanConfig, v: &[i64]) -> DirectionReport {
    let mut rep = DirectionReport::empty(v);
    let t = match cfg.cmf.trajectory(&cfg.x, v) {
        Ok(t) => t,
        Err(e) => {
            rep.note(e.to_string());
            return rep;
        }
    };
    match trajectory_eigen(&t) {
        Ok(eig) => {
            rep.log_moduli_norm = eig.log_moduli.iter().map(|l| l / rep.norm).collect();
            rep.pp_ok = Some(eig.pp_ok);
            if let Ok(p) = rho_predicted(&eig) {
                rep.rho_predicted_norm = Some(p.default / rep.norm);
                rep.rho_pairs_norm = p.pairs.iter().map(|&(_, _, r)| r / rep.norm).collect();
            }
        }
        Err(e) => rep.note(format!("eigen: {e}")),
    }
    let n = cfg.n;
    let probed = Walker::from_trajectory(&cfg.cmf, &t, &cfg.vectors).and_then(|w| probe_walker(w, &[n / 2, n, 2 * n]));
    let (vals, singular) = match probed {
        Ok(r) => r,
        Err(e) => {
            rep.note(e.to_string());
            return rep;
        }
    };
    if let Some(k) = singular.first() {
        rep.note(format!("singular step {k}"));
        return rep;
    }
    match estimate_values(n, &vals[0], &vals[1], &vals[2]) {
        Ok(est) => {
            rep.l_hat = Some(est.l_hat);
            rep.rho_norm = est.rho.map(|r| r / rep.norm);
            rep.delta_hat = est.delta;
            rep.eta_norm = Some(est.eta / rep.norm);
            rep.classification = Some(est.converged);
        }
        Err(e) => rep.note(e.to_string()),
    }
    rep
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

/// One report per enumerated direction, in enumeration order.
pub fn scan(cfg: &ScanConfig) -> Result<Vec<DirectionReport>> {
    cfg.validate()?;
    let dirs = enumerate_directions(cfg.cmf.dim(), cfg.radius, cfg.orthant);
    scan_directions(cfg, &dirs)
}

/// Evaluates the given directions in parallel, preserving their order.
pub fn scan_directions(cfg: &ScanConfig, dirs: &[Vec<i64>]) -> Result<Vec<DirectionReport>> {
    cfg.validate()?;
    Ok(pool(cfg.workers)?.install(|| dirs.par_iter().map(|v| evaluate_direction(cfg, v)).collect()))
}

/// CSV header for a d-dimensional scan.
pub fn csv_header(d: usize) -> Vec<String> {
    let axes = ["vx", "vy", "vz"];
    let mut h: Vec<String> = (0..d).map(|i| axes.get(i).map_or_else(|| format!("v{}", i + 1), |s| s.to_string())).collect();
    for c in ["angle", "norm", "l_hat", "rho_norm", "delta_hat", "eta_norm", "pp_ok", "classification", "eig_log_moduli", "error"] {
        h.push(c.to_string());
    }
    h
}

fn f(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.9}")).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, d: usize, reports: &[DirectionReport], digits: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(d))?;
    for r in reports {
        let mut rec: Vec<String> = r.v.iter().map(|x| x.to_string()).collect();
        rec.push(f(r.angle));
        rec.push(format!("{:.9}", r.norm));
        rec.push(r.l_hat.as_ref().map(|l| to_decimal(l, digits)).unwrap_or_default());
        rec.push(f(r.rho_norm));
        rec.push(f(r.delta_hat));
        rec.push(f(r.eta_norm));
        rec.push(r.pp_ok.map(|b| b.to_string()).unwrap_or_default());
        rec.push(r.classification.map(|c| c.as_str().to_string()).unwrap_or_default());
        rec.push(r.log_moduli_norm.iter().map(|x| format!("{x:.9}")).collect::<Vec<_>>().join(";"));
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

/// A named panel: x = angle, several point series.
struct Panel<'a> {
    title: &'a str,
    series: Vec<(&'a str, Vec<(f64, f64)>)>,
}

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 48.0;

fn svg_panel(p: &Panel, ox: f64, oy: f64, out: &mut String) {
    let pts: Vec<(f64, f64)> = p.series.iter().flat_map(|s| s.1.iter().copied()).filter(|(_, y)| y.is_finite()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| ox + PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| oy + H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let _ = writeln!(out, r#"<g><rect x="{:.2}" y="{:.2}" width="{W}" height="{H}" fill="white" stroke="none"/>"#, ox, oy);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
        ox + W / 2.0,
        oy + 20.0,
        p.title
    );
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        ox + PAD,
        oy + H - PAD,
        ox + W - PAD,
        oy + H - PAD,
        ox + PAD,
        oy + PAD,
        ox + PAD,
        oy + H - PAD
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">angle of v (rad)</text>"#,
        ox + W / 2.0,
        oy + H - 12.0
    );
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="{anchor}">{x:.3}</text>"#, sx(x), oy + H - PAD + 14.0);
    }
    for y in [y0, y1] {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{y:.4}</text>"#, ox + PAD - 4.0, sy(y) + 4.0);
    }
    for (name, s) in &p.series {
        let color = match *name {
            "predicted" | "reference" => "red",
            _ => "steelblue",
        };
        for &(x, y) in s.iter().filter(|(_, y)| y.is_finite()) {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(x), sy(y));
        }
    }
    let _ = writeln!(out, "</g>");
}

fn svg_doc(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n{body}</svg>\n"
    )
}

fn panels(reports: &[DirectionReport], reference: Option<f64>) -> Vec<(&'static str, Panel<'static>)> {
    use num_traits::ToPrimitive;
    let pts = |g: &dyn Fn(&DirectionReport) -> Option<f64>| -> Vec<(f64, f64)> {
        reports.iter().filter_map(|r| Some((r.angle?, g(r)?))).collect()
    };
    let mut l = vec![("estimate", pts(&|r| r.l_hat.as_ref().and_then(|l| l.to_f64())))];
    if let Some(c) = reference {
        l.push(("reference", reports.iter().filter_map(|r| Some((r.angle?, c))).collect()));
    }
    let eig: Vec<(f64, f64)> = reports
        .iter()
        .filter_map(|r| r.angle.map(|a| (a, r)))
        .flat_map(|(a, r)| r.log_moduli_norm.iter().map(move |&m| (a, m)))
        .collect();
    vec![
        ("l_hat", Panel { title: "estimated limit", series: l }),
        ("delta", Panel { title: "estimated irrationality measure", series: vec![("estimate", pts(&|r| r.delta_hat))] }),
        (
            "rho",
            Panel {
                title: "normalized convergence rate",
                series: vec![("estimate", pts(&|r| r.rho_norm)), ("predicted", pts(&|r| r.rho_predicted_norm))],
            },
        ),
        ("eigen", Panel { title: "normalized log eigenvalue moduli", series: vec![("estimate", eig)] }),
    ]
}

/// SVG documents for the four panels and their 2×2 layout, keyed by
/// file stem. `reference` draws a horizontal marker in the limit panel.
pub fn render_svg(reports: &[DirectionReport], reference: Option<f64>) -> Vec<(String, String)> {
    let ps = panels(reports, reference);
    let mut out = Vec::new();
    let mut combined = String::new();
    for (i, (name, p)) in ps.iter().enumerate() {
        let mut body = String::new();
        svg_panel(p, 0.0, 0.0, &mut body);
        out.push((format!("panel_{name}"), svg_doc(W, H, &body)));
        svg_panel(p, (i % 2) as f64 * W, (i / 2) as f64 * H, &mut combined);
    }
    out.push(("panels".to_string(), svg_doc(2.0 * W, 2.0 * H, &combined)));
    out
}

/// Writes `scan.csv` and the SVG panels (2-D only) under `dir`.
pub fn emit(dir: &Path, d: usize, reports: &[DirectionReport], digits: usize, reference: Option<f64>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let csv_path = dir.join("scan.csv");
    write_csv(std::fs::File::create(&csv_path)?, d, reports, digits)?;
    written.push(csv_path);
    if d == 2 {
        for (stem, svg) in render_svg(reports, reference) {
            let path = dir.join(format!("{stem}.svg"));
            std::fs::write(&path, svg)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Divides out the gcd of the entries; None for the zero vector.
pub fn primitive(v: &[i64]) -> Option<Vec<i64>> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    (g != 0).then(|| v.iter().map(|x| x / g).collect())
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: DirectionReport,
    /// Every evaluated direction, in evaluation order.
    pub visited: Vec<DirectionReport>,
    pub steps: usize,
}

fn better(a: &DirectionReport, b: &DirectionReport) -> bool {
    // a strictly preferred over b: higher score, then smaller norm, then lexicographic
    match a.score().total_cmp(&b.score()) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => match a.norm.total_cmp(&b.norm) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => a.v < b.v,
        },
    }
}

/// Neighbours of v: primitive reductions of v ± e_i inside the scan region.
pub fn neighbours(cfg: &ScanConfig, v: &[i64]) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for i in 0..v.len() {
        for s in [1, -1] {
            let mut w = v.to_vec();
            w[i] += s;
            let Some(w) = primitive(&w) else { continue };
            if cfg.orthant == Orthant::Positive && w.iter().any(|&x| x < 0) {
                continue;
            }
            if norm(&w) >= cfg.radius || w == v || out.contains(&w) {
                continue;
            }
            out.push(w);
        }
    }
    out.sort();
    out
}

/// Hill climbing on δ̂ over primitive directions.
pub fn search_delta(cfg: &ScanConfig, start: &[i64], max_steps: usize) -> Result<SearchResult> {
    cfg.validate()?;
    let start = primitive(start).ok_or_else(|| Error::InvalidConfig("start direction is zero".into()))?;
    let mut seen: BTreeMap<Vec<i64>, DirectionReport> = BTreeMap::new();
    let mut visited = Vec::new();
    let pool = pool(cfg.workers)?;
    let first = evaluate_direction(cfg, &start);
    seen.insert(start.clone(), first.clone());
    visited.push(first.clone());
    let mut current = first;
    let mut steps = 0;
    while steps < max_steps {
        let fresh: Vec<Vec<i64>> = neighbours(cfg, &current.v).into_iter().filter(|w| !seen.contains_key(w)).collect();
        let reports: Vec<DirectionReport> = pool.install(|| fresh.par_iter().map(|w| evaluate_direction(cfg, w)).collect());
        for r in reports {
            seen.insert(r.v.clone(), r.clone());
            visited.push(r);
        }
        let best = neighbours(cfg, &current.v)
            .iter()
            .map(|w| &seen[w])
            .fold(None::<&DirectionReport>, |b, r| match b {
                Some(b) if !better(r, b) => Some(b),
                _ => Some(r),
            })
            .cloned();
        match best {
            Some(b) if b.score() > current.score() => {
                current = b;
                steps += 1;
            }
            _ => break,
        }
    }
    Ok(SearchResult { best: current, visited, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations() {
        let v = enumerate_directions(2, 1.5, Orthant::All);
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], vec![-1, -1]);
        assert_eq!(v[7], vec![-1, 0]);
        assert_eq!(enumerate_directions(2, 14.0, Orthant::Positive).len(), 97);
        assert_eq!(enumerate_directions(2, 12.0, Orthant::All).len(), 264);
    }

    #[test]
    fn csv_header_only_for_empty() {
        let mut buf = Vec::new();
        write_csv(&mut buf, 2, &[], 30).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "vx,vy,angle,norm,l_hat,rho_norm,delta_hat,eta_norm,pp_ok,classification,eig_log_moduli,error\n"
        );
    }

    #[test]
    fn primitive_reduction() {
        assert_eq!(primitive(&[4, -6]), Some(vec![2, -3]));
        assert_eq!(primitive(&[0, 0]), None);
    }
}
