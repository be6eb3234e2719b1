//! Negative gradient flow of `||m_sl||^2`, the squared norm of the moment map
//! of the special linear group, for brackets and for forms.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{act, GroupElement, TwoStepAlgebra};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polynomials::{moment_map_form, pi_form, HomogeneousForm};
use crate::scalar::Scalar;

/// A point on which the flow can run.
pub trait FlowState: Clone {
    /// `||m_sl||^2` at this point.
    fn objective(&self) -> f64;

    /// The point `v - h pi(m_sl(v)) v`, renormalized when the flow is normalized.
    fn advance(&self, h: f64) -> Self;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowVerdict {
    MinimalVectorFound,
    Plateau,
    MaxIterations,
}

#[derive(Clone, Debug)]
pub struct FlowOptions {
    pub max_iter: usize,
    pub step: f64,
    pub tol_grad: f64,
    pub seed: u64,
    /// Size of a seeded random `GL` perturbation applied before flowing; 0 disables it.
    pub jitter: f64,
    /// Record the objective every this many iterations.
    pub sample_every: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { max_iter: 5000, step: 0.1, tol_grad: 1e-8, seed: 0, jitter: 0.0, sample_every: 10 }
    }
}

/// Iterations over which the relative decrease is measured for a plateau.
const PLATEAU_WINDOW: usize = 50;
const PLATEAU_REL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct FlowOutcome<T> {
    pub state: T,
    pub iterations: usize,
    pub final_grad_norm: f64,
    pub verdict: FlowVerdict,
    /// Sampled objective values, first and last included; non-increasing.
    pub trajectory: Vec<f64>,
}

/// Explicit Euler with backtracking: the step is halved until the objective decreases.
pub fn run_flow<T: FlowState>(start: T, opts: &FlowOptions) -> FlowOutcome<T> {
    let mut state = start;
    let mut f = state.objective();
    let mut trajectory = vec![f];
    let mut window: VecDeque<f64> = VecDeque::with_capacity(PLATEAU_WINDOW + 1);
    let finish = |state: T, it: usize, f: f64, verdict, mut trajectory: Vec<f64>| {
        if trajectory.last() != Some(&f) {
            trajectory.push(f);
        }
        FlowOutcome { state, iterations: it, final_grad_norm: f.max(0.0).sqrt(), verdict, trajectory }
    };
    for it in 0..opts.max_iter {
        let grad = f.max(0.0).sqrt();
        if grad < opts.tol_grad {
            return finish(state, it, f, FlowVerdict::MinimalVectorFound, trajectory);
        }
        window.push_back(f);
        if window.len() > PLATEAU_WINDOW {
            let old = window.pop_front().unwrap();
            if (old - f) / old < PLATEAU_REL && grad > 10.0 * opts.tol_grad {
                return finish(state, it, f, FlowVerdict::Plateau, trajectory);
            }
        }
        let mut h = opts.step;
        loop {
            let cand = state.advance(h);
            let fc = cand.objective();
            if fc < f {
                state = cand;
                f = fc;
                break;
            }
            h *= 0.5;
            if h < 1e-14 {
                return finish(state, it, f, FlowVerdict::Plateau, trajectory);
            }
        }
        if (it + 1) % opts.sample_every.max(1) == 0 {
            trajectory.push(f);
        }
    }
    let grad = f.max(0.0).sqrt();
    let verdict = if grad < opts.tol_grad { FlowVerdict::MinimalVectorFound } else { FlowVerdict::MaxIterations };
    finish(state, opts.max_iter, f, verdict, trajectory)
}

/// Dense float bracket `(J(Z_1), ..., J(Z_n))` kept at a fixed norm.
#[derive(Clone, Debug)]
pub struct AlgebraState {
    js: Vec<DMatrix<f64>>,
    norm: f64,
    m1_sl: DMatrix<f64>,
    m2_sl: DMatrix<f64>,
    objective: f64,
}

impl AlgebraState {
    pub fn new<S: Scalar>(alg: &TwoStepAlgebra<S>) -> Result<Self> {
        if alg.is_zero() {
            return Err(Error::ZeroInput("flow from the zero bracket".into()));
        }
        let js: Vec<DMatrix<f64>> = alg.j_matrices().iter().map(Matrix::to_dmatrix).collect();
        let norm = js.iter().map(|j| j.norm_squared()).sum::<f64>().sqrt();
        Ok(Self::from_js(js, norm))
    }

    fn from_js(mut js: Vec<DMatrix<f64>>, norm: f64) -> Self {
        let current = js.iter().map(|j| j.norm_squared()).sum::<f64>().sqrt();
        for j in &mut js {
            *j *= norm / current;
        }
        let norm2 = norm * norm;
        let m = js[0].nrows();
        let n = js.len();
        let mut m1 = DMatrix::zeros(m, m);
        for j in &js {
            m1 += j * j;
        }
        m1 *= 2.0 / norm2;
        let m2 = DMatrix::from_fn(n, n, |k, l| -(&js[k] * &js[l]).trace() / norm2);
        // Traces are -2 and 1 for every nonzero bracket.
        let m1_sl = m1 + DMatrix::identity(m, m) * (2.0 / m as f64);
        let m2_sl = m2 - DMatrix::identity(n, n) * (1.0 / n as f64);
        let objective = m1_sl.norm_squared() + m2_sl.norm_squared();
        Self { js, norm, m1_sl, m2_sl, objective }
    }

    pub fn to_algebra(&self) -> TwoStepAlgebra<f64> {
        let m = self.js[0].nrows();
        let mats: Vec<Matrix<f64>> = self.js.iter().map(Matrix::from_dmatrix).collect();
        TwoStepAlgebra::from_j_matrices_unchecked(m, &mats).expect("dense bracket")
    }

    pub fn moment_sl(&self) -> (&DMatrix<f64>, &DMatrix<f64>) {
        (&self.m1_sl, &self.m2_sl)
    }
}

impl FlowState for AlgebraState {
    fn objective(&self) -> f64 {
        self.objective
    }

    fn advance(&self, h: f64) -> Self {
        let alpha = &self.m1_sl;
        let beta = &self.m2_sl;
        let at = alpha.transpose();
        let next: Vec<DMatrix<f64>> = (0..self.js.len())
            .map(|k| {
                let mut tangent = -(&at * &self.js[k]) - &self.js[k] * alpha;
                for (l, jl) in self.js.iter().enumerate() {
                    tangent += jl * beta[(k, l)];
                }
                &self.js[k] - tangent * h
            })
            .collect();
        Self::from_js(next, self.norm)
    }
}

/// A float form under the `SL_n` flow, optionally kept at fixed norm.
#[derive(Clone, Debug)]
pub struct FormState {
    pub form: HomogeneousForm<f64>,
    normalize: Option<f64>,
    m_sl: Matrix<f64>,
    objective: f64,
}

impl FormState {
    pub fn new<S: Scalar>(f: &HomogeneousForm<S>, normalize: bool) -> Result<Self> {
        let form = f.to_float();
        let norm = form.norm_sq().sqrt();
        Self::build(form, normalize.then_some(norm))
    }

    fn build(form: HomogeneousForm<f64>, normalize: Option<f64>) -> Result<Self> {
        let form = match normalize {
            Some(target) => {
                let cur = form.norm_sq().sqrt();
                form.scale(&(target / cur))
            }
            None => form,
        };
        let m = moment_map_form(&form)?;
        let n = form.n();
        let shift = form.degree() as f64 / n as f64;
        let m_sl = m.add(&Matrix::identity(n).scale(&shift));
        let objective = m_sl.frobenius_sq();
        Ok(Self { form, normalize, m_sl, objective })
    }

    pub fn norm(&self) -> f64 {
        self.form.norm_sq().sqrt()
    }
}

impl FlowState for FormState {
    fn objective(&self) -> f64 {
        self.objective
    }

    fn advance(&self, h: f64) -> Self {
        let next = self.form.sub(&pi_form(&self.m_sl, &self.form).scale(&h));
        Self::build(next, self.normalize).unwrap_or_else(|_| {
            // The form collapsed to zero; keep an unusable state with infinite objective.
            let mut s = self.clone();
            s.objective = f64::INFINITY;
            s
        })
    }
}

/// Flow of a form; with `normalize` the norm is kept fixed.
pub fn form_flow<S: Scalar>(f: &HomogeneousForm<S>, normalize: bool, opts: &FlowOptions) -> Result<FlowOutcome<FormState>> {
    Ok(run_flow(FormState::new(f, normalize)?, opts))
}

#[derive(Clone, Debug)]
pub struct FlowReport {
    pub iterations: usize,
    pub final_algebra: TwoStepAlgebra<f64>,
    pub final_grad_norm: f64,
    pub verdict: FlowVerdict,
    pub seed: u64,
    pub trajectory_norms: Vec<f64>,
}

/// Runs the normalized flow on `alg`, after a seeded random perturbation when
/// `opts.jitter > 0`.
pub fn gradient_flow<S: Scalar>(alg: &TwoStepAlgebra<S>, opts: &FlowOptions) -> Result<FlowReport> {
    let start = if opts.jitter > 0.0 {
        random_perturbation(alg, opts.jitter, opts.seed)?
    } else {
        alg.to_float()
    };
    let out = run_flow(AlgebraState::new(&start)?, opts);
    Ok(FlowReport {
        iterations: out.iterations,
        final_algebra: out.state.to_algebra(),
        final_grad_norm: out.final_grad_norm,
        verdict: out.verdict,
        seed: opts.seed,
        trajectory_norms: out.trajectory,
    })
}

/// `g . mu` for `g = (I + s R1, I + s R2)` with seeded uniform entries of `R1, R2` in `[-1, 1]`.
pub fn random_perturbation<S: Scalar>(alg: &TwoStepAlgebra<S>, scale: f64, seed: u64) -> Result<TwoStepAlgebra<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..16 {
        let mut near_identity = |size: usize| {
            Matrix::from_fn(size, size, |i, j| {
                let r: f64 = rng.gen_range(-1.0..1.0);
                if i == j { 1.0 + scale * r } else { scale * r }
            })
        };
        let psi = near_identity(alg.m());
        let phi = near_identity(alg.n());
        if let Ok(g) = GroupElement::new(psi, phi) {
            return act(&g, &alg.to_float());
        }
    }
    Err(Error::Numeric("could not draw an invertible perturbation".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nilsoliton::check_nilso;

    #[test]
    fn heisenberg_is_already_minimal() {
        let alg = TwoStepAlgebra::from_brackets(2, 1, [(0, 1, 0, 1.0)]).unwrap();
        let r = gradient_flow(&alg, &FlowOptions::default()).unwrap();
        assert_eq!(r.verdict, FlowVerdict::MinimalVectorFound);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn perturbed_heisenberg_sum_flows_back() {
        // h3 + h3 over a shared one-dimensional center is the 5-dim Heisenberg algebra.
        let alg = TwoStepAlgebra::from_brackets(4, 1, [(0, 1, 0, 1.0), (2, 3, 0, 1.0)]).unwrap();
        let opts = FlowOptions { jitter: 0.3, seed: 7, ..FlowOptions::default() };
        let r = gradient_flow(&alg, &opts).unwrap();
        assert_eq!(r.verdict, FlowVerdict::MinimalVectorFound, "{:?}", r.final_grad_norm);
        assert!(check_nilso(&r.final_algebra, 1e-6).holds());
        assert!(r.trajectory_norms.windows(2).all(|w| w[1] <= w[0]));
    }
}
