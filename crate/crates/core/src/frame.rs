//! Finite frames in `R^d`: bounds, canonical duals, analysis, synthesis and
//! coefficient thresholding.
//!
//! Reconstruction after thresholding always uses the canonical dual
//! `φ̃_n = S^{-1} φ_n`, where `S = Σ φ_n φ_nᵀ` is the frame operator.
//! With `c = analyze(f)` and any mask `0 ≤ λ_n ≤ 1`,
//!
//! ```text
//! f - Σ λ_n c_n φ̃_n = S^{-1} Σ (1 - λ_n) c_n φ_n
//! ```
//!
//! so the error is at most `(1/A)·‖Σ (1 - λ_n) c_n φ_n‖ ≤ (√B / A)·‖(1 - λ_n) c_n‖`.
//! In finite dimension no bounded mask can make the synthesis diverge:
//! `‖Σ λ_n c_n φ̃_n‖ ≤ (B/A)·‖f‖`.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::stream_rng;

pub const TIGHT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Frame {
    pub name: String,
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
    /// `(A, B)`: extreme eigenvalues of the frame operator.
    pub frame_bounds: (f64, f64),
    pub tight: bool,
    pub canonical_dual: Vec<Vec<f64>>,
}

fn operator(vectors: &[Vec<f64>], d: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(d, d);
    for v in vectors {
        let v = DVector::from_column_slice(v);
        s += &v * v.transpose();
    }
    s
}

/// `(A, B)` for a family of vectors in `R^d`.
pub fn frame_bounds(vectors: &[Vec<f64>]) -> Result<(f64, f64)> {
    let d = check_family(vectors)?;
    bounds_of(&operator(vectors, d))
}

fn check_family(vectors: &[Vec<f64>]) -> Result<usize> {
    let d = vectors.first().map_or(0, |v| v.len());
    if d == 0 {
        return Err(Error::NotAFrame("empty family".into()));
    }
    if let Some(i) = vectors.iter().position(|v| v.len() != d) {
        return Err(Error::Shape(format!("vector {} has length {}, expected {d}", i + 1, vectors[i].len())));
    }
    if vectors.iter().flatten().any(|x| !x.is_finite()) {
        return Err(invalid("frame vectors must be finite"));
    }
    if vectors.len() < d {
        return Err(Error::NotAFrame(format!("{} vectors cannot span R^{d}", vectors.len())));
    }
    Ok(d)
}

fn bounds_of(s: &DMatrix<f64>) -> Result<(f64, f64)> {
    let eig = SymmetricEigen::new(s.clone()).eigenvalues;
    let a = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let b = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(a > 1e-12 * b.max(1.0)) {
        return Err(Error::NotAFrame(format!("frame operator is singular (smallest eigenvalue {a:e})")));
    }
    Ok((a, b))
}

impl Frame {
    pub fn new(name: impl Into<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let d = check_family(&vectors)?;
        let s = operator(&vectors, d);
        let (a, b) = bounds_of(&s)?;
        let cholesky = s
            .cholesky()
            .ok_or_else(|| Error::NotAFrame("frame operator is not positive definite".into()))?;
        let canonical_dual = vectors
            .iter()
            .map(|v| cholesky.solve(&DVector::from_column_slice(v)).as_slice().to_vec())
            .collect();
        Ok(Frame {
            name: name.into(),
            dim: d,
            vectors,
            frame_bounds: (a, b),
            tight: (b - a).abs() <= TIGHT_TOL,
            canonical_dual,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn orthonormal(d: usize) -> Result<Self> {
        let vectors = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(format!("orthonormal({d})"), vectors)
    }

    /// Three unit vectors in `R^2` at 120° spacing, starting at `(0, 1)`.
    pub fn mercedes_benz() -> Result<Self> {
        let h = 3f64.sqrt() / 2.0;
        Self::new("mercedes-benz", vec![vec![0.0, 1.0], vec![-h, -0.5], vec![h, -0.5]])
    }

    /// Union of `copies` orthonormal bases; copy 0 is the standard basis,
    /// the rest are seeded random rotations of it.
    pub fn rotated_bases(d: usize, copies: usize, seed: u64) -> Result<Self> {
        if copies == 0 {
            return Err(invalid("need at least one basis"));
        }
        let mut vectors: Vec<Vec<f64>> = Self::orthonormal(d)?.vectors;
        let mut rng = stream_rng(seed, 0);
        for _ in 1..copies {
            let m = DMatrix::from_fn(d, d, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let q = m.qr().q();
            vectors.extend((0..d).map(|j| q.column(j).iter().copied().collect::<Vec<f64>>()));
        }
        Self::new(format!("rotated-bases({d}, {copies}, seed={seed})"), vectors)
    }

    /// `m` seeded random unit vectors in `R^d`.
    pub fn random_unit(d: usize, m: usize, seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, 1);
        let vectors = (0..m)
            .map(|_| loop {
                let v: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n > 1e-3 {
                    break v.into_iter().map(|x| x / n).collect();
                }
            })
            .collect();
        Self::new(format!("random-unit({d}, {m}, seed={seed})"), vectors)
    }

    /// Discrete Haar system on `2^k` points: the normalised constant, then
    /// wavelets level by level, coarse to fine.
    pub fn haar(k: u32) -> Result<Self> {
        if k > 12 {
            return Err(invalid("haar resolution is limited to 2^12 points"));
        }
        let n = 1usize << k;
        let mut vectors = vec![vec![1.0 / (n as f64).sqrt(); n]];
        for j in 0..k {
            let blocks = 1usize << j;
            let width = n / blocks;
            let height = (blocks as f64 / n as f64).sqrt();
            for l in 0..blocks {
                let mut v = vec![0.0; n];
                for (i, x) in v.iter_mut().enumerate().skip(l * width).take(width) {
                    *x = if i < l * width + width / 2 { height } else { -height };
                }
                vectors.push(v);
            }
        }
        Self::new(format!("haar({k})"), vectors)
    }

    /// Header `d M`, then `M` rows of `d` decimals; `#` lines are comments.
    pub fn parse<R: Read>(name: &str, reader: R) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut vectors = Vec::new();
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: i + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match header {
                None => {
                    let [d, m] = fields[..] else {
                        return Err(err("expected header `d M`".into()));
                    };
                    header = Some((
                        d.parse().map_err(|_| err(format!("bad dimension `{d}`")))?,
                        m.parse().map_err(|_| err(format!("bad vector count `{m}`")))?,
                    ));
                }
                Some((d, _)) => {
                    if fields.len() != d {
                        return Err(err(format!("expected {d} coordinates, found {}", fields.len())));
                    }
                    vectors.push(
                        fields
                            .iter()
                            .map(|f| f.parse::<f64>().map_err(|_| err(format!("bad number `{f}`"))))
                            .collect::<Result<Vec<f64>>>()?,
                    );
                }
            }
        }
        let (_, m) = header.ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing header `d M`".into(),
        })?;
        if vectors.len() != m {
            return Err(Error::Parse {
                line: 1,
                message: format!("header declares {m} vectors, found {}", vectors.len()),
            });
        }
        Self::new(name, vectors)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&path.display().to_string(), File::open(path)?)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.dim, self.len())?;
        for v in &self.vectors {
            let row: Vec<String> = v.iter().map(|x| format!("{x:e}")).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }

    fn check_signal(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.dim {
            return Err(Error::Shape(format!("signal has length {}, frame lives in R^{}", f.len(), self.dim)));
        }
        Ok(())
    }

    fn check_coefficients(&self, c: &[f64]) -> Result<()> {
        if c.len() != self.len() {
            return Err(Error::Shape(format!("{} coefficients for {} frame vectors", c.len(), self.len())));
        }
        Ok(())
    }
}

/// `c_n = ⟨f, φ_n⟩`.
pub fn analyze(frame: &Frame, f: &[f64]) -> Result<Vec<f64>> {
    frame.check_signal(f)?;
    Ok(frame.vectors.iter().map(|v| dot(v, f)).collect())
}

/// `Σ c_n ψ_n`.
pub fn synthesize(vectors: &[Vec<f64>], c: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (v, cn) in vectors.iter().zip(c) {
        if *cn != 0.0 {
            for (o, x) in out.iter_mut().zip(v) {
                *o += cn * x;
            }
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ThresholdRule {
    /// Keep `c_n` when `|c_n| > τ`.
    Hard { tau: f64 },
    /// Shrink by `λ_n = max(0, 1 - τ/|c_n|)`.
    Soft { tau: f64 },
    Mask { lambdas: Vec<f64> },
}

impl ThresholdRule {
    /// The rule as a mask over `c`.
    pub fn mask(&self, c: &[f64]) -> Result<Vec<f64>> {
        match self {
            ThresholdRule::Hard { tau } | ThresholdRule::Soft { tau } if !(*tau >= 0.0) => {
                Err(Error::InvalidRule(format!("threshold must be >= 0, got {tau}")))
            }
            ThresholdRule::Hard { tau } => Ok(c.iter().map(|x| if x.abs() > *tau { 1.0 } else { 0.0 }).collect()),
            ThresholdRule::Soft { tau } => Ok(c
                .iter()
                .map(|x| if x.abs() > *tau { 1.0 - tau / x.abs() } else { 0.0 })
                .collect()),
            ThresholdRule::Mask { lambdas } => {
                if lambdas.len() != c.len() {
                    return Err(Error::InvalidRule(format!("{} mask entries for {} coefficients", lambdas.len(), c.len())));
                }
                if let Some(i) = lambdas.iter().position(|l| !(0.0..=1.0).contains(l)) {
                    return Err(Error::InvalidRule(format!("mask entry {} = {} is outside [0, 1]", i + 1, lambdas[i])));
                }
                Ok(lambdas.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Reconstruction {
    pub signal: Vec<f64>,
    pub mask: Vec<f64>,
    pub kept: usize,
    /// `‖f - f̃‖` when `f` was supplied, else `‖Σ (1-λ_n) c_n φ̃_n‖`.
    pub error_norm: f64,
    /// `(1/A)·‖Σ (1-λ_n) c_n φ_n‖`.
    pub synthesis_bound: f64,
    /// `(√B / A)·‖((1-λ_n) c_n)_n‖`.
    pub coefficient_bound: f64,
    pub bound_holds: bool,
}

/// `f̃ = Σ λ_n c_n φ̃_n` under the rule's mask.
pub fn reconstruct(frame: &Frame, c: &[f64], rule: &ThresholdRule, f: Option<&[f64]>) -> Result<Reconstruction> {
    frame.check_coefficients(c)?;
    if let Some(f) = f {
        frame.check_signal(f)?;
    }
    let mask = rule.mask(c)?;
    let kept_c: Vec<f64> = c.iter().zip(&mask).map(|(x, l)| l * x).collect();
    let dropped_c: Vec<f64> = c.iter().zip(&mask).map(|(x, l)| (1.0 - l) * x).collect();
    let signal = synthesize(&frame.canonical_dual, &kept_c, frame.dim);
    let error_norm = match f {
        Some(f) => l2(&signal.iter().zip(f).map(|(a, b)| b - a).collect::<Vec<f64>>()),
        None => l2(&synthesize(&frame.canonical_dual, &dropped_c, frame.dim)),
    };
    let (a, b) = frame.frame_bounds;
    let synthesis_bound = l2(&synthesize(&frame.vectors, &dropped_c, frame.dim)) / a;
    let coefficient_bound = b.sqrt() / a * l2(&dropped_c);
    let slack = 1e-10 * (1.0 + l2(c));
    // The error bounds presuppose c = analyze(f); they are checked as stated.
    let bound_holds = error_norm <= synthesis_bound + slack && synthesis_bound <= coefficient_bound + slack;
    Ok(Reconstruction {
        kept: mask.iter().filter(|l| **l > 0.0).count(),
        signal,
        mask,
        error_norm,
        synthesis_bound,
        coefficient_bound,
        bound_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HaarLevel {
    pub k: u32,
    pub points: usize,
    /// ℓ² norm of the finest-level wavelet coefficients.
    pub tail_norm: f64,
    pub kept: usize,
    pub error_norm: f64,
}

/// Hard-thresholded Haar expansions of `signal` sampled at midpoints of
/// `2^k` cells of `[0, 1)`, scaled so ℓ² norms approximate `L²` norms.
pub fn haar_resolution_report(signal: &dyn Fn(f64) -> f64, levels: &[u32], tau: f64) -> Result<Vec<HaarLevel>> {
    levels
        .iter()
        .map(|&k| {
            let frame = Frame::haar(k)?;
            let n = frame.dim;
            let f: Vec<f64> = (0..n).map(|i| signal((i as f64 + 0.5) / n as f64) / (n as f64).sqrt()).collect();
            let c = analyze(&frame, &f)?;
            let finest = if k == 0 { &c[..0] } else { &c[n / 2..] };
            let r = reconstruct(&frame, &c, &ThresholdRule::Hard { tau }, Some(&f))?;
            Ok(HaarLevel {
                k,
                points: n,
                tail_norm: l2(finest),
                kept: r.kept,
                error_norm: r.error_norm,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bounds_of_reference_frames() {
        let (a, b) = Frame::orthonormal(4).unwrap().frame_bounds;
        assert!(close(a, 1.0, 1e-12) && close(b, 1.0, 1e-12));
        let mb = Frame::mercedes_benz().unwrap();
        assert!(close(mb.frame_bounds.0, 1.5, 1e-10) && close(mb.frame_bounds.1, 1.5, 1e-10));
        assert!(mb.tight);
        let mut twice = Frame::orthonormal(3).unwrap().vectors;
        twice.extend(twice.clone());
        let (a, b) = frame_bounds(&twice).unwrap();
        assert!(close(a, 2.0, 1e-12) && close(b, 2.0, 1e-12));
        let rb = Frame::rotated_bases(3, 3, 1).unwrap();
        assert!(close(rb.frame_bounds.0, 3.0, 1e-10) && rb.tight);
        let h = Frame::haar(4).unwrap();
        assert!(close(h.frame_bounds.0, 1.0, 1e-10) && close(h.frame_bounds.1, 1.0, 1e-10));
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let v = vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![-1.0, 0.0]];
        assert!(matches!(frame_bounds(&v), Err(Error::NotAFrame(_))));
        assert!(matches!(Frame::new("x", vec![vec![1.0, 0.0]]), Err(Error::NotAFrame(_))));
    }

    #[test]
    fn analysis_examples() {
        let mb = Frame::mercedes_benz().unwrap();
        assert!(analyze(&mb, &[0.0, 0.0]).unwrap().iter().all(|c| *c == 0.0));
        let c = analyze(&mb, &[1.0, 0.0]).unwrap();
        assert!(close(c.iter().map(|x| x * x).sum(), 1.5, 1e-15));
        let on = Frame::orthonormal(3).unwrap();
        assert_eq!(analyze(&on, &[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert!(matches!(analyze(&on, &[1.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn full_and_empty_masks() {
        let frame = Frame::random_unit(3, 7, 4).unwrap();
        let f = [0.3, -1.2, 2.0];
        let c = analyze(&frame, &f).unwrap();
        let all = reconstruct(&frame, &c, &ThresholdRule::Mask { lambdas: vec![1.0; 7] }, Some(&f)).unwrap();
        assert!(all.error_norm <= 1e-10);
        let none = reconstruct(&frame, &c, &ThresholdRule::Mask { lambdas: vec![0.0; 7] }, Some(&f)).unwrap();
        assert!(none.signal.iter().all(|x| *x == 0.0));
        assert!(close(none.error_norm, l2(&f), 1e-15));
        assert!(none.bound_holds && all.bound_holds);
    }

    #[test]
    fn mercedes_benz_drop_smallest() {
        let mb = Frame::mercedes_benz().unwrap();
        let f = [1.0, 0.0];
        let c = analyze(&mb, &f).unwrap();
        // c = (0, -√3/2, √3/2): a threshold of 0.1 drops only the zero coefficient
        let r = reconstruct(&mb, &c, &ThresholdRule::Hard { tau: 0.1 }, Some(&f)).unwrap();
        assert_eq!(r.kept, 2);
        assert!(r.bound_holds && r.error_norm <= r.coefficient_bound + 1e-12);
        let g = [0.6, 0.8];
        let cg = analyze(&mb, &g).unwrap();
        let smallest = cg.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        let r = reconstruct(&mb, &cg, &ThresholdRule::Hard { tau: smallest }, Some(&g)).unwrap();
        assert_eq!(r.kept, 2);
        // S = 1.5 I, so the error is the dropped synthesis over 1.5
        assert!(close(r.error_norm, smallest / 1.5, 1e-12));
        assert!(r.error_norm <= (1.5f64).sqrt() / 1.5 * smallest + 1e-12);
    }

    #[test]
    fn invalid_rules() {
        let mb = Frame::mercedes_benz().unwrap();
        let c = [1.0, 0.0, -1.0];
        for rule in [
            ThresholdRule::Hard { tau: -1.0 },
            ThresholdRule::Soft { tau: f64::NAN },
            ThresholdRule::Mask { lambdas: vec![0.5, 1.5, 0.0] },
            ThresholdRule::Mask { lambdas: vec![1.0] },
        ] {
            assert!(matches!(reconstruct(&mb, &c, &rule, None), Err(Error::InvalidRule(_))));
        }
    }

    #[test]
    fn soft_threshold_mask() {
        let m = ThresholdRule::Soft { tau: 0.5 }.mask(&[2.0, -0.25, -1.0, 0.0]).unwrap();
        assert_eq!(m, vec![0.75, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn haar_tails_shrink_for_smooth_signals() {
        let report = haar_resolution_report(&|x| (2.0 * std::f64::consts::PI * x).sin(), &[3, 5, 7, 9], 1e-3).unwrap();
        assert!(report.windows(2).all(|w| w[1].tail_norm < w[0].tail_norm), "{report:?}");
        assert!(report.iter().all(|l| l.error_norm.is_finite()));
    }

    #[test]
    fn file_roundtrip() {
        let frame = Frame::random_unit(2, 5, 3).unwrap();
        let mut buf = Vec::new();
        frame.write(&mut buf).unwrap();
        let back = Frame::parse("copy", buf.as_slice()).unwrap();
        assert_eq!(back.vectors, frame.vectors);
        assert!(Frame::parse("x", "2 3\n1 0\n0 1\n".as_bytes()).is_err());
    }
}
