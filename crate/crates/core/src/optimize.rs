//! Derivative-free minimization: Nelder–Mead with seeded restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// True when the evaluation budget ran out before the simplex collapsed.
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    /// Edge length of the initial simplex.
    pub step: f64,
    /// Stop once the spread of simplex values falls below this.
    pub ftol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { step: 0.5, ftol: 1e-12 }
    }
}

impl NelderMead {
    /// Minimizes `f` from `x0` with at most `budget` evaluations.
    pub fn minimize(&self, f: &mut impl FnMut(&[f64]) -> f64, x0: &[f64], budget: usize) -> Minimum {
        let dim = x0.len();
        let mut evals = 0;
        let mut eval = |x: &[f64], evals: &mut usize| {
            *evals += 1;
            f(x)
        };
        if budget == 0 || dim == 0 {
            let value = if budget == 0 { f64::INFINITY } else { eval(x0, &mut evals) };
            return Minimum { x: x0.to_vec(), value, evals, budget_exhausted: budget == 0 };
        }
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        simplex.push((x0.to_vec(), eval(x0, &mut evals)));
        for i in 0..dim {
            if evals >= budget {
                break;
            }
            let mut x = x0.to_vec();
            x[i] += self.step;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        let by_value = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| a.1.total_cmp(&b.1);
        if simplex.len() < dim + 1 {
            let best = simplex.into_iter().min_by(by_value).unwrap();
            return Minimum { x: best.0, value: best.1, evals, budget_exhausted: true };
        }

        let mut converged = false;
        while evals < budget {
            simplex.sort_by(by_value);
            if simplex[dim].1 - simplex[0].1 <= self.ftol * simplex[0].1.abs().max(1e-300) {
                converged = true;
                break;
            }
            let centroid: Vec<f64> =
                (0..dim).map(|i| simplex[..dim].iter().map(|p| p.0[i]).sum::<f64>() / dim as f64).collect();
            let along = |t: f64, worst: &[f64]| -> Vec<f64> {
                centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect()
            };
            let worst = simplex[dim].0.clone();
            let xr = along(1.0, &worst);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                if evals >= budget {
                    simplex[dim] = (xr, fr);
                    break;
                }
                let xe = along(2.0, &worst);
                let fe = eval(&xe, &mut evals);
                simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (xr, fr);
            } else {
                if evals >= budget {
                    break;
                }
                let (xc, fc) = if fr < simplex[dim].1 {
                    let xc = along(0.5, &worst);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                } else {
                    let xc = along(-0.5, &worst);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                };
                if fc < fr.min(simplex[dim].1) {
                    simplex[dim] = (xc, fc);
                } else {
                    // shrink towards the best vertex
                    let best = simplex[0].0.clone();
                    for p in simplex.iter_mut().skip(1) {
                        if evals >= budget {
                            break;
                        }
                        let x: Vec<f64> = best.iter().zip(&p.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                        let v = eval(&x, &mut evals);
                        *p = (x, v);
                    }
                }
            }
        }
        let best = simplex.into_iter().min_by(by_value).unwrap();
        Minimum { x: best.0, value: best.1, evals, budget_exhausted: !converged }
    }

    /// `restarts` runs from points drawn uniformly on `[-spread, spread]^dim`,
    /// each with `budget / restarts` evaluations; the seed of run `r` is
    /// derived from `seed` and `r`.
    pub fn minimize_restarts(
        &self,
        f: &mut impl FnMut(&[f64]) -> f64,
        dim: usize,
        spread: f64,
        restarts: usize,
        budget: usize,
        seed: u64,
    ) -> Minimum {
        let restarts = restarts.max(1);
        let share = budget / restarts;
        let mut overall: Option<Minimum> = None;
        let mut total = 0;
        let mut exhausted = false;
        for r in 0..restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(r as u64));
            let x0: Vec<f64> = (0..dim).map(|_| rng.gen_range(-spread..=spread)).collect();
            let run = self.minimize(f, &x0, share + if r == restarts - 1 { budget % restarts } else { 0 });
            total += run.evals;
            exhausted |= run.budget_exhausted;
            if overall.as_ref().map_or(true, |b| run.value < b.value) {
                overall = Some(run);
            }
        }
        let mut best = overall.unwrap();
        best.evals = total;
        best.budget_exhausted = exhausted;
        best
    }
}
