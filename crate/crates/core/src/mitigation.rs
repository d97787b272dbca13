//! Readout-error mitigation: response-matrix calibration and iterative
//! Bayesian unfolding (IBU) with first-order covariance propagation.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde_json::json;

use crate::error::{Error, Result};
use crate::noise::{corrupt_shots, rng_stream, ReadoutModel};
use crate::sim::dist::bitstring;
use crate::sim::ProbDist;

pub const MAX_RESPONSE_QUBITS: usize = 10;

/// Column-stochastic `2^n × 2^n` matrix; entry `(s, s')` is the probability
/// of reading `s` after preparing `s'`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    pub n: usize,
    pub matrix: DMatrix<f64>,
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_RESPONSE_QUBITS {
        return Err(Error::QubitCountExceeded {
            n,
            max: MAX_RESPONSE_QUBITS,
        });
    }
    Ok(())
}

impl ResponseMatrix {
    pub fn identity(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(ResponseMatrix {
            n,
            matrix: DMatrix::identity(1 << n, 1 << n),
        })
    }

    /// Tensor product of the per-bit matrices of an uncorrelated model.
    pub fn from_model(model: &ReadoutModel, n: usize) -> Result<Self> {
        check_size(n)?;
        let dim = 1usize << n;
        let per: Vec<[[f64; 2]; 2]> = (0..n).map(|b| model.matrix(b)).collect();
        let matrix = DMatrix::from_fn(dim, dim, |o, t| {
            per.iter()
                .enumerate()
                .map(|(b, m)| m[(o >> b) & 1][(t >> b) & 1])
                .product()
        });
        Ok(ResponseMatrix { n, matrix })
    }

    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "response matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let r = ResponseMatrix {
            n: dim.trailing_zeros() as usize,
            matrix,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        for (j, col) in self.matrix.column_iter().enumerate() {
            let s: f64 = col.sum();
            if s == 0.0 {
                return Err(Error::ZeroColumn(j));
            }
            if (s - 1.0).abs() > 1e-9 || col.iter().any(|&x| x < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "response column {j} is not a distribution (sum {s})"
                )));
            }
        }
        Ok(())
    }

    /// Applies the matrix to a true distribution.
    pub fn apply(&self, dist: &ProbDist) -> Result<ProbDist> {
        if dist.bits != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}-bit distribution, {}-bit response",
                dist.bits, self.n
            )));
        }
        let v = DVector::from_vec(dist.to_dense()?);
        let out = &self.matrix * v;
        Ok(ProbDist::from_dense(out.as_slice(), dist.shot_count))
    }

    /// Rows are observed bitstrings, columns prepared ones, both listed qubit 0 first.
    pub fn to_csv(&self) -> String {
        let dim = self.dim();
        let mut s = String::from("observed");
        for j in 0..dim {
            write!(s, ",{}", bitstring(j as u64, self.n)).unwrap();
        }
        s.push('\n');
        for i in 0..dim {
            s.push_str(&bitstring(i as u64, self.n));
            for j in 0..dim {
                write!(s, ",{}", self.matrix[(i, j)]).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (line_no, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> = line.split(',').skip(1).map(|x| x.trim().parse()).collect();
            rows.push(vals.map_err(|e| Error::Parse {
                line: line_no + 1,
                msg: e.to_string(),
            })?);
        }
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("response CSV is not square".into()));
        }
        Self::from_matrix(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
    }
}

/// Estimates the response matrix by preparing every basis state. With
/// `shots_per_basis = None` the analytic matrix is returned; otherwise each
/// column is the histogram of `shots_per_basis` noisy readouts.
pub fn calibrate_response(
    model: &ReadoutModel,
    n: usize,
    shots_per_basis: Option<u64>,
    seed: u64,
) -> Result<ResponseMatrix> {
    check_size(n)?;
    let Some(shots) = shots_per_basis else {
        return ResponseMatrix::from_model(model, n);
    };
    if shots == 0 {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    let dim = 1usize << n;
    let mut matrix = DMatrix::zeros(dim, dim);
    for prepared in 0..dim {
        let mut rng = rng_stream(seed, prepared as u64);
        let ideal = vec![prepared as u64; shots as usize];
        for s in corrupt_shots(&ideal, n, model, &mut rng) {
            matrix[(s as usize, prepared)] += 1.0;
        }
    }
    matrix /= shots as f64;
    Ok(ResponseMatrix { n, matrix })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbuOptions {
    pub iterations: usize,
    /// Stop once the L1 change of an update falls below this value.
    pub tol: Option<f64>,
    pub propagate_covariance: bool,
}

impl IbuOptions {
    pub fn new(iterations: usize) -> Self {
        IbuOptions {
            iterations,
            tol: None,
            propagate_covariance: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct UnfoldResult {
    pub dist: ProbDist,
    /// Covariance of the unfolded probabilities (zero for exact input).
    pub covariance: DMatrix<f64>,
    pub iterations_used: usize,
}

impl UnfoldResult {
    /// Distribution plus a covariance digest (diagonal, trace, max |entry|).
    pub fn to_json(&self) -> serde_json::Value {
        let dim = self.covariance.nrows();
        let probs: serde_json::Map<String, serde_json::Value> = self
            .dist
            .probs
            .iter()
            .map(|(&s, &p)| (bitstring(s, self.dist.bits), json!(p)))
            .collect();
        let diag: Vec<f64> = (0..dim).map(|i| self.covariance[(i, i)]).collect();
        json!({
            "bits": self.dist.bits,
            "shot_count": self.dist.shot_count,
            "iterations_used": self.iterations_used,
            "probabilities": probs,
            "covariance": {
                "trace": self.covariance.trace(),
                "max_abs": self.covariance.amax(),
                "diagonal": diag,
            },
        })
    }
}

/// Covariance of multinomial frequencies, estimated without bias from the
/// observed frequencies: `(diag(m) - m mᵀ)/(n - 1)`.
pub fn multinomial_covariance(m: &DVector<f64>, shots: u64) -> Result<DMatrix<f64>> {
    if shots < 2 {
        return Err(Error::TooFewSamples {
            need: 2,
            got: shots as usize,
        });
    }
    let mut c = -(m * m.transpose());
    for i in 0..m.len() {
        c[(i, i)] += m[i];
    }
    Ok(c / (shots - 1) as f64)
}

pub fn ibu_unfold(measured: &ProbDist, r: &ResponseMatrix, iterations: usize) -> Result<UnfoldResult> {
    ibu_unfold_with(measured, r, &IbuOptions::new(iterations))
}

/// Iterates `t_j ← t_j Σ_i R_ij m_i / f_i` with `f = R t` from a uniform
/// prior. The Jacobian `J = ∂t/∂m` obeys `J' = A + B J` with
/// `A_jk = t_j R_kj / f_k` and
/// `B_jl = δ_jl Σ_i R_ij m_i / f_i - t_j Σ_i R_ij R_il m_i / f_i²`,
/// and the output covariance is `J C_m Jᵀ`.
pub fn ibu_unfold_with(measured: &ProbDist, r: &ResponseMatrix, opts: &IbuOptions) -> Result<UnfoldResult> {
    if opts.iterations == 0 {
        return Err(Error::InvalidParameter("IBU needs at least one iteration".into()));
    }
    if measured.bits != r.n {
        return Err(Error::DimensionMismatch(format!(
            "{}-bit distribution, {}-bit response",
            measured.bits, r.n
        )));
    }
    for (j, col) in r.matrix.column_iter().enumerate() {
        if col.sum() == 0.0 {
            return Err(Error::ZeroColumn(j));
        }
    }
    let dim = r.dim();
    let rm = &r.matrix;
    let rt = rm.transpose();
    let m = DVector::from_vec(measured.to_dense()?);
    let mut t = DVector::from_element(dim, 1.0 / dim as f64);
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    let inv = |x: f64| if x > 0.0 { 1.0 / x } else { 0.0 };
    let mut used = 0;
    for _ in 0..opts.iterations {
        used += 1;
        let f = rm * &t;
        let finv = f.map(inv);
        let ratio = &rt * m.component_mul(&finv);
        let next = t.component_mul(&ratio);
        if opts.propagate_covariance {
            // A = diag(t) Rᵀ diag(1/f)
            let mut a = rt.clone();
            for j in 0..dim {
                for k in 0..dim {
                    a[(j, k)] *= t[j] * finv[k];
                }
            }
            // B = diag(ratio) - diag(t) Rᵀ diag(m/f²) R
            let w = m.component_mul(&finv).component_mul(&finv);
            let mut rw = rm.clone();
            for i in 0..dim {
                rw.row_mut(i).scale_mut(w[i]);
            }
            let mut b = -(&rt * rw);
            for j in 0..dim {
                b.row_mut(j).scale_mut(t[j]);
                b[(j, j)] += ratio[j];
            }
            jac = a + b * &jac;
        }
        let change = (&next - &t).abs().sum();
        t = next;
        if opts.tol.is_some_and(|tol| change < tol) {
            break;
        }
    }
    let covariance = match (opts.propagate_covariance, measured.shot_count) {
        (true, Some(n)) => {
            let cm = multinomial_covariance(&m, n)?;
            &jac * cm * jac.transpose()
        }
        _ => DMatrix::zeros(dim, dim),
    };
    let mut dist = ProbDist::from_dense(t.as_slice(), measured.shot_count);
    dist.unfolded = true;
    Ok(UnfoldResult {
        dist,
        covariance,
        iterations_used: used,
    })
}

/// Unbiased estimate of `E[P(s)]·E[P(s')]` from one estimated distribution:
/// `P(s)P(s') - Cov(P(s), P(s'))`. Raw shot data use the multinomial
/// covariance, which gives `P(s)(nP(s) - 1)/(n - 1)` on the diagonal; exact
/// distributions need no correction; unfolded data require `covariance`.
pub fn unbiased_cross_moment(dist: &ProbDist, covariance: Option<&DMatrix<f64>>, s: u64, s2: u64) -> Result<f64> {
    let (p, q) = (dist.prob(s), dist.prob(s2));
    if let Some(c) = covariance {
        let dim = c.nrows() as u64;
        if s >= dim || s2 >= dim {
            return Err(Error::DimensionMismatch(format!(
                "outcome outside {dim}x{dim} covariance"
            )));
        }
        return Ok(p * q - c[(s as usize, s2 as usize)]);
    }
    if dist.unfolded && dist.shot_count.is_some() {
        return Err(Error::MissingCovariance);
    }
    match dist.shot_count {
        None => Ok(p * q),
        Some(n) if n < 2 => Err(Error::TooFewSamples {
            need: 2,
            got: n as usize,
        }),
        Some(n) => {
            let n = n as f64;
            let delta = if s == s2 { p } else { 0.0 };
            Ok((n * p * q - delta) / (n - 1.0))
        }
    }
}
