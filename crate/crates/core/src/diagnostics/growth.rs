//! Growth-class fitting for checkpoint sequences.
//!
//! Checkpoint values `s(N)` are fitted by least squares against three
//! two-parameter templates `a + b·φ(N)`:
//!
//! * bounded: `φ = N^β` with `β ∈ [-2, -0.25]` (convergence to `a`), or a constant;
//! * logarithmic: `φ = ln N`;
//! * polynomial: `φ = N^β` with `β ∈ [0.2, 2]`.
//!
//! The best template wins if its residual norm is at least ten times smaller
//! than every other template's; otherwise the class is `Other`. A sequence
//! whose final step is below `1e-4` of its total spread is `Bounded`
//! regardless of template, which catches convergence faster than `N^{-2}`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClass {
    Bounded,
    Logarithmic,
    Polynomial,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Checkpoint {
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TemplateFit {
    pub exponent: Option<f64>,
    pub intercept: f64,
    pub slope: f64,
    /// Root of the residual sum of squares.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthFit {
    pub class: GrowthClass,
    pub bounded: TemplateFit,
    pub logarithmic: TemplateFit,
    pub polynomial: TemplateFit,
    /// Second-best residual over best residual.
    pub dominance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthRecord {
    pub checkpoints: Vec<Checkpoint>,
    pub fit: GrowthFit,
}

impl GrowthRecord {
    pub fn from_checkpoints(checkpoints: Vec<Checkpoint>) -> Self {
        let fit = fit_growth(&checkpoints);
        GrowthRecord { checkpoints, fit }
    }

    pub fn class(&self) -> GrowthClass {
        self.fit.class
    }

    pub fn last(&self) -> f64 {
        self.checkpoints.last().map_or(0.0, |c| c.value)
    }

    /// Writes `n,value` rows with a header.
    pub fn write_csv<W: std::io::Write>(&self, out: W, label: &str) -> crate::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["series", "n", "value"])?;
        for c in &self.checkpoints {
            w.write_record([label.to_string(), c.n.to_string(), format!("{:e}", c.value)])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub const DEFAULT_CHECKPOINTS: usize = 20;
pub const DOMINANCE: f64 = 10.0;

/// About `count` log-spaced distinct checkpoints in `[1, n]`, ending at `n`.
pub fn log_checkpoints(n: usize, count: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let count = count.max(2);
    let mut out: Vec<usize> = (0..count)
        .map(|i| (n as f64).powf(i as f64 / (count - 1) as f64).round() as usize)
        .map(|k| k.clamp(1, n))
        .collect();
    out.push(n);
    out.sort_unstable();
    out.dedup();
    out
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    (intercept, slope, rss.sqrt())
}

fn best_power_fit(ns: &[f64], ys: &[f64], lo: f64, hi: f64, with_constant: bool) -> TemplateFit {
    let mut best = if with_constant {
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let rss: f64 = ys.iter().map(|y| (y - mean) * (y - mean)).sum();
        TemplateFit {
            exponent: Some(0.0),
            intercept: mean,
            slope: 0.0,
            residual: rss.sqrt(),
        }
    } else {
        TemplateFit {
            exponent: None,
            intercept: 0.0,
            slope: 0.0,
            residual: f64::INFINITY,
        }
    };
    const STEPS: usize = 72;
    for i in 0..=STEPS {
        let beta = lo + (hi - lo) * i as f64 / STEPS as f64;
        let xs: Vec<f64> = ns.iter().map(|n| n.powf(beta)).collect();
        let (a, b, r) = linear_fit(&xs, ys);
        if r < best.residual {
            best = TemplateFit {
                exponent: Some(beta),
                intercept: a,
                slope: b,
                residual: r,
            };
        }
    }
    best
}

/// Checkpoints below this index are left out of the fit when enough
/// larger ones remain; small-`N` transients are not growth.
pub const FIT_MIN_N: usize = 10;

/// Last checkpoint step, relative to the total spread, below which the
/// sequence counts as settled.
pub const SETTLED: f64 = 1e-4;

pub fn fit_growth(points: &[Checkpoint]) -> GrowthFit {
    let large = points.iter().filter(|c| c.n >= FIT_MIN_N).count();
    let points: Vec<Checkpoint> = if large >= 8 {
        points.iter().filter(|c| c.n >= FIT_MIN_N).copied().collect()
    } else {
        points.to_vec()
    };
    let ns: Vec<f64> = points.iter().map(|c| c.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|c| c.value).collect();
    let spread = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = ys.iter().map(|y| y.abs()).fold(1.0, f64::max);

    let bounded = best_power_fit(&ns, &ys, -2.0, -0.25, true);
    let logs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (a, b, r) = if points.len() >= 2 { linear_fit(&logs, &ys) } else { (0.0, 0.0, 0.0) };
    let logarithmic = TemplateFit {
        exponent: None,
        intercept: a,
        slope: b,
        residual: r,
    };
    let polynomial = best_power_fit(&ns, &ys, 0.2, 2.0, false);

    if points.len() < 3 || !(spread > 1e-12 * scale) {
        return GrowthFit {
            class: GrowthClass::Bounded,
            bounded,
            logarithmic,
            polynomial,
            dominance: f64::INFINITY,
        };
    }

    let mut ranked = [
        (bounded.residual, GrowthClass::Bounded),
        (logarithmic.residual, GrowthClass::Logarithmic),
        (polynomial.residual, GrowthClass::Polynomial),
    ];
    ranked.sort_by(|x, y| x.0.total_cmp(&y.0));
    // A sequence whose last step is negligible against its total movement
    // has settled, whatever template fits its early transient.
    let last_step = (ys[ys.len() - 1] - ys[ys.len() - 2]).abs();
    if last_step <= SETTLED * spread {
        return GrowthFit {
            class: GrowthClass::Bounded,
            bounded,
            logarithmic,
            polynomial,
            dominance: f64::INFINITY,
        };
    }

    let floor = 1e-15 * scale * (points.len() as f64).sqrt();
    let dominance = ranked[1].0 / ranked[0].0.max(floor);
    let class = if dominance >= DOMINANCE {
        ranked[0].1
    } else {
        GrowthClass::Other
    };
    GrowthFit {
        class,
        bounded,
        logarithmic,
        polynomial,
        dominance,
    }
}
