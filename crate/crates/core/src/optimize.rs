//! Global maximization of a function on SO(3): Euler-angle grid followed by
//! multi-start Nelder-Mead refinement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rotation::{mat_mul, rot_y, rot_z, Mat3, RotationSO3};
use crate::scalar::Real;

/// Search parameters for [`maximize_over_so3`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Grid points per Euler angle: `alpha, gamma ∈ [0, 2π)`, `beta ∈ [0, π]`.
    pub grid: usize,
    /// Number of best grid points refined by Nelder-Mead.
    pub starts: usize,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Refinement stops once every vertex lies within this distance of the best one.
    pub simplex_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid: 30,
            starts: 10,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            simplex_tolerance: 1e-9,
            max_iterations: 500,
        }
    }
}

/// Best rotation found and bookkeeping about the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3Maximum<T> {
    pub rotation: RotationSO3<T>,
    pub value: T,
    /// Best value seen on the grid alone.
    pub grid_value: T,
    /// Value at the identity rotation (always a grid point).
    pub identity_value: T,
    pub evaluations: usize,
}

/// Known invariances of the objective under `R → S·R`. They halve the grid and keep
/// refinement starts from being spent on copies of the same basin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    None,
    /// Invariant under sign changes of the first two rows of `R`.
    RowSigns,
    /// Also invariant under exchanging the first two rows.
    RowSignsAndSwap,
}

/// Maximizes `f(scratch, R)` over rotations.
///
/// `init` creates per-thread scratch space. Any symmetry other than [`Symmetry::None`] includes
/// `f(diag(-1,-1,1)·R) = f(R)`, i.e. invariance under `alpha → alpha + π`, so only the non-redundant
/// half of the alpha grid is evaluated (for even grid sizes). Refinement starts are the best grid
/// local maxima, skipping any that are symmetric images of one already taken, topped up with the
/// best remaining grid points. Ties are broken towards the lexicographically smallest angle triple
/// and then the lowest start index, so the result does not depend on thread scheduling.
pub fn maximize_over_so3<T, S, I, F>(config: &OptimizerConfig, symmetry: Symmetry, init: I, f: F) -> So3Maximum<T>
where
    T: Real,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &Mat3<T>) -> T + Sync + Send,
{
    let n = config.grid.max(1);
    let halved = symmetry != Symmetry::None && n % 2 == 0;
    let n_alpha = if halved { n / 2 } else { n };
    let two_pi = T::PI() + T::PI();
    let alpha_at = |i: usize| two_pi * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
    let gamma_at = alpha_at;
    let beta_at = |j: usize| {
        if n == 1 {
            T::zero()
        } else {
            T::PI() * T::from_usize(j).unwrap() / T::from_usize(n - 1).unwrap()
        }
    };
    let alpha_rot: Vec<Mat3<T>> = (0..n_alpha).map(|i| rot_z(alpha_at(i))).collect();

    // values[(j * n + k) * n_alpha + i] holds f at (alpha_i, beta_j, gamma_k)
    let values: Vec<T> = (0..n * n)
        .into_par_iter()
        .map_init(&init, |scratch, jk| {
            let (j, k) = (jk / n, jk % n);
            let tail = mat_mul(&rot_y(beta_at(j)), &rot_z(gamma_at(k)));
            alpha_rot.iter().map(|ra| f(scratch, &mat_mul(ra, &tail))).collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    let mut evaluations = values.len();
    let identity_value = values[0];

    let key = |idx: usize| {
        let i = idx % n_alpha;
        let jk = idx / n_alpha;
        (i, jk / n, jk % n)
    };
    let index = |i: usize, j: usize, k: usize| (j * n + k) * n_alpha + i;
    // alpha wraps (through the half turn when halved), gamma wraps, beta does not
    let is_local_max = |idx: usize| {
        let (i, j, k) = key(idx);
        let v = values[idx];
        let mut neighbours = vec![
            index((i + 1) % n_alpha, j, k),
            index((i + n_alpha - 1) % n_alpha, j, k),
            index(i, j, (k + 1) % n),
            index(i, j, (k + n - 1) % n),
        ];
        if j + 1 < n {
            neighbours.push(index(i, j + 1, k));
        }
        if j > 0 {
            neighbours.push(index(i, j - 1, k));
        }
        neighbours.iter().all(|&m| !(values[m] > v))
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal).then_with(|| key(a).cmp(&key(b)))
    });
    let grid_value = values[order[0]];
    let angles_of = |idx: usize| {
        let (i, j, k) = key(idx);
        [alpha_at(i), beta_at(j), gamma_at(k)]
    };

    let wanted = config.starts.max(1);
    let separation = two_pi / T::from_usize(n).unwrap();
    let mut chosen: Vec<usize> = Vec::with_capacity(wanted);
    let mut chosen_rot: Vec<Mat3<T>> = Vec::with_capacity(wanted);
    for &idx in order.iter().filter(|&&idx| is_local_max(idx)) {
        if chosen.len() == wanted {
            break;
        }
        let r = RotationSO3::from_angles(angles_of(idx)).to_matrix();
        if chosen_rot.iter().all(|c| basin_distance(symmetry, c, &r) > separation) {
            chosen.push(idx);
            chosen_rot.push(r);
        }
    }
    for &idx in &order {
        if chosen.len() == wanted {
            break;
        }
        if !chosen.contains(&idx) {
            chosen.push(idx);
        }
    }
    let starts: Vec<[T; 3]> = chosen.iter().map(|&idx| angles_of(idx)).collect();

    let step = [T::PI() / T::from_usize(n).unwrap(), T::FRAC_PI_2() / T::from_usize(n.max(2) - 1).unwrap(), T::PI() / T::from_usize(n).unwrap()];
    let refined: Vec<([T; 3], T, usize)> = starts
        .par_iter()
        .map_init(&init, |scratch, x0| {
            let mut g = |x: &[T; 3]| -f(scratch, &RotationSO3::from_angles(*x).to_matrix());
            let (x, v, evals) = nelder_mead(&mut g, *x0, step, config);
            (x, -v, evals)
        })
        .collect();

    let mut best = 0;
    for (s, r) in refined.iter().enumerate() {
        evaluations += r.2;
        if r.1 > refined[best].1 {
            best = s;
        }
    }
    let (x, value, _) = refined[best];
    So3Maximum { rotation: RotationSO3::from_angles(x).canonical(), value, grid_value, identity_value, evaluations }
}

/// Distance between two rotations after quotienting out `symmetry`, measured on the first two rows.
fn basin_distance<T: Real>(symmetry: Symmetry, a: &Mat3<T>, b: &Mat3<T>) -> T {
    let diff = |x: &[T; 3], y: &[T; 3], sign: T| (0..3).map(|k| (x[k] - sign * y[k]) * (x[k] - sign * y[k])).sum::<T>().sqrt();
    let row = |x: &[T; 3], y: &[T; 3]| match symmetry {
        Symmetry::None => diff(x, y, T::one()),
        _ => diff(x, y, T::one()).min(diff(x, y, -T::one())),
    };
    let direct = match symmetry {
        Symmetry::None => diff(&a[0], &b[0], T::one()) + diff(&a[1], &b[1], T::one()) + diff(&a[2], &b[2], T::one()),
        _ => row(&a[0], &b[0]) + row(&a[1], &b[1]),
    };
    if symmetry == Symmetry::RowSignsAndSwap {
        direct.min(row(&a[0], &b[1]) + row(&a[1], &b[0]))
    } else {
        direct
    }
}

/// Derivative-free minimization of `g` over `R^3` started from the simplex
/// `x0, x0 + step_k e_k`. Returns the best vertex, its value and the evaluation count.
pub fn nelder_mead<T: Real>(
    g: &mut impl FnMut(&[T; 3]) -> T,
    x0: [T; 3],
    step: [T; 3],
    config: &OptimizerConfig,
) -> ([T; 3], T, usize) {
    let rho = T::lit(config.reflection);
    let chi = T::lit(config.expansion);
    let gam = T::lit(config.contraction);
    let sig = T::lit(config.shrink);
    let tol = T::lit(config.simplex_tolerance);

    let mut simplex: Vec<([T; 3], T)> = Vec::with_capacity(4);
    simplex.push((x0, g(&x0)));
    for k in 0..3 {
        let mut x = x0;
        x[k] = x[k] + step[k];
        simplex.push((x, g(&x)));
    }
    let mut evals = 4;
    let lin = |a: &[T; 3], b: &[T; 3], t: T| [0, 1, 2].map(|k| a[k] + t * (b[k] - a[k]));
    let dist = |a: &[T; 3], b: &[T; 3]| (0..3).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum::<T>().sqrt();

    for _ in 0..config.max_iterations {
        // stable sort keeps the older vertex first among equals
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let diameter = simplex[1..].iter().map(|v| dist(&v.0, &simplex[0].0)).fold(T::zero(), T::max);
        if diameter < tol {
            break;
        }
        let third = T::one() / T::lit(3.0);
        let c = [0, 1, 2].map(|k| (simplex[0].0[k] + simplex[1].0[k] + simplex[2].0[k]) * third);
        let worst = simplex[3];
        // x(t) = c + t (c - worst)
        let xr = lin(&c, &worst.0, -rho);
        let fr = g(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = lin(&c, &worst.0, -rho * chi);
            let fe = g(&xe);
            evals += 1;
            simplex[3] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[2].1 {
            simplex[3] = (xr, fr);
            continue;
        }
        let (xc, fc, accept) = if fr < worst.1 {
            let xc = lin(&c, &worst.0, -rho * gam);
            let fc = g(&xc);
            (xc, fc, fc <= fr)
        } else {
            let xc = lin(&c, &worst.0, gam);
            let fc = g(&xc);
            (xc, fc, fc < worst.1)
        };
        evals += 1;
        if accept {
            simplex[3] = (xc, fc);
            continue;
        }
        let best = simplex[0].0;
        for v in simplex.iter_mut().skip(1) {
            v.0 = lin(&best, &v.0, sig);
            v.1 = g(&v.0);
        }
        evals += 3;
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    (simplex[0].0, simplex[0].1, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let mut g = |x: &[f64; 3]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + 0.5 * (x[2] - 3.0).powi(2);
        let (x, v, _) = nelder_mead(&mut g, [0.0, 0.0, 0.0], [0.1, 0.1, 0.1], &OptimizerConfig::default());
        assert!(v < 1e-15);
        assert!((x[0] - 1.0).abs() < 1e-8 && (x[1] + 0.5).abs() < 1e-8 && (x[2] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn finds_rotation_aligning_axis() {
        // maximize (R v)_1 for a fixed unit v: optimum 1.
        let v = [0.3f64, -0.5, 0.8];
        let nv = crate::rotation::norm3(v);
        let res = maximize_over_so3(&OptimizerConfig::default(), Symmetry::None, || (), |_, r: &Mat3<f64>| {
            (r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2]) / nv
        });
        assert!((res.value - 1.0).abs() < 1e-12);
        assert!(res.grid_value <= res.value);
        assert!((res.identity_value - 0.3 / nv).abs() < 1e-15);
    }

    #[test]
    fn basin_distance_ignores_symmetric_images() {
        let r = RotationSO3::new(0.4f64, 1.1, -0.7).to_matrix();
        let flipped = [r[0].map(|x| -x), r[1], r[2].map(|x| -x)];
        let swapped = [r[1], r[0], r[2].map(|x| -x)];
        assert!(basin_distance(Symmetry::RowSigns, &r, &flipped) < 1e-15);
        assert!(basin_distance(Symmetry::RowSigns, &r, &swapped) > 0.1);
        assert!(basin_distance(Symmetry::RowSignsAndSwap, &r, &swapped) < 1e-15);
        assert!(basin_distance(Symmetry::None, &r, &flipped) > 0.1);
    }
}
