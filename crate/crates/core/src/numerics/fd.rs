//! Central finite differences: gradients, second derivatives, scalar
//! Hessians, and discrete exterior derivatives of form fields.
//!
//! Fields are fallible closures; any stencil point rejected by a domain
//! check surfaces as [`GeomError::StencilOutOfDomain`]. Steps scale with
//! `max(1, |point|)` so relative truncation error stays uniform across a
//! chart.

use crate::error::{GeomError, Result};

/// Stencil order for central differences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdOrder {
    Two,
    Four,
}

/// Settings for finite-difference evaluations.
#[derive(Clone, Copy, Debug)]
pub struct FdSettings {
    /// Base step, scaled by `max(1, |point|_inf)` at the evaluation point.
    pub step: f64,
    pub order: FdOrder,
    /// Combine evaluations at `h` and `h/2` to cancel the leading error
    /// term; raises a 2nd-order stencil to 4th order.
    pub richardson: bool,
}

impl Default for FdSettings {
    fn default() -> Self {
        Self {
            step: 1e-4,
            order: FdOrder::Two,
            richardson: false,
        }
    }
}

impl FdSettings {
    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    pub fn richardson(step: f64) -> Self {
        Self {
            step,
            order: FdOrder::Two,
            richardson: true,
        }
    }

    /// Step scaled to the local length scale of `p`.
    pub fn scaled_step<const K: usize>(&self, p: &[f64; K]) -> f64 {
        let scale = p.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        self.step * scale
    }
}

fn shifted<const K: usize>(p: &[f64; K], i: usize, dx: f64) -> [f64; K] {
    let mut q = *p;
    q[i] += dx;
    q
}

fn try_eval<const K: usize, F: Fn(&[f64; K]) -> Result<f64>>(f: &F, p: &[f64; K]) -> Result<f64> {
    f(p).map_err(GeomError::into_stencil)
}

fn central_<const K: usize, F: Fn(&[f64; K]) -> Result<f64>>(
    f: &F,
    p: &[f64; K],
    i: usize,
    h: f64,
    order: FdOrder,
) -> Result<f64> {
    match order {
        FdOrder::Two => {
            let fp = try_eval(f, &shifted(p, i, h))?;
            let fm = try_eval(f, &shifted(p, i, -h))?;
            Ok((fp - fm) / (2.0 * h))
        }
        FdOrder::Four => {
            let f2p = try_eval(f, &shifted(p, i, 2.0 * h))?;
            let fp = try_eval(f, &shifted(p, i, h))?;
            let fm = try_eval(f, &shifted(p, i, -h))?;
            let f2m = try_eval(f, &shifted(p, i, -2.0 * h))?;
            Ok((-f2p + 8.0 * fp - 8.0 * fm + f2m) / (12.0 * h))
        }
    }
}

/// First partial derivative of a scalar field along axis `i`.
pub fn fd_partial<const K: usize, F: Fn(&[f64; K]) -> Result<f64>>(
    f: &F,
    p: &[f64; K],
    i: usize,
    settings: &FdSettings,
) -> Result<f64> {
    let h = settings.scaled_step(p);
    if settings.richardson {
        let d_h = central_(f, p, i, h, settings.order)?;
        let d_h2 = central_(f, p, i, 0.5 * h, settings.order)?;
        Ok(match settings.order {
            FdOrder::Two => (4.0 * d_h2 - d_h) / 3.0,
            FdOrder::Four => (16.0 * d_h2 - d_h) / 15.0,
        })
    } else {
        central_(f, p, i, h, settings.order)
    }
}

/// Central-difference gradient of a scalar field on `R^K`.
pub fn fd_gradient<const K: usize, F: Fn(&[f64; K]) -> Result<f64>>(
    f: &F,
    p: &[f64; K],
    settings: &FdSettings,
) -> Result<[f64; K]> {
    let mut g = [0.0; K];
    for (i, gi) in g.iter_mut().enumerate() {
        *gi = fd_partial(f, p, i, settings)?;
    }
    Ok(g)
}

fn second_diag<const K: usize, F: Fn(&[f64; K]) -> Result<f64>>(
    f: &F,
    p: &[f64; K],
    i: usize,
    h: f64,
) -> Result<f64> {
    let fp = try_eval(f, &shifted(p, i, h))?;
    let f0 = try_eval(f, p)?;
    let fm = try_eval(f, &shifted(p, i, -h))?;
    Ok((fp - 2.0 * f0 + fm) / (h * h))
}

/// Second partial derivative along axis `i`, Richardson-extrapolated when
/// requested.
pub fn fd_second<const K: usize, F: Fn(&[f64; K]) -> Result<f64>>(
    f: &F,
    p: &[f64; K],
    i: usize,
    settings: &FdSettings,
) -> Result<f64> {
    let h = settings.scaled_step(p);
    if settings.richardson {
        let d_h = second_diag(f, p, i, h)?;
        let d_h2 = second_diag(f, p, i, 0.5 * h)?;
        Ok((4.0 * d_h2 - d_h) / 3.0)
    } else {
        second_diag(f, p, i, h)
    }
}

/// Flat Laplacian of a scalar field on `R^K` by summed second differences.
pub fn fd_laplacian<const K: usize, F: Fn(&[f64; K]) -> Result<f64>>(
    f: &F,
    p: &[f64; K],
    settings: &FdSettings,
) -> Result<f64> {
    let mut acc = 0.0;
    for i in 0..K {
        acc += fd_second(f, p, i, settings)?;
    }
    Ok(acc)
}

fn mixed_second<const K: usize, F: Fn(&[f64; K]) -> Result<f64>>(
    f: &F,
    p: &[f64; K],
    i: usize,
    j: usize,
    h: f64,
) -> Result<f64> {
    let pp = try_eval(f, &shifted(&shifted(p, i, h), j, h))?;
    let pm = try_eval(f, &shifted(&shifted(p, i, h), j, -h))?;
    let mp = try_eval(f, &shifted(&shifted(p, i, -h), j, h))?;
    let mm = try_eval(f, &shifted(&shifted(p, i, -h), j, -h))?;
    Ok((pp - pm - mp + mm) / (4.0 * h * h))
}

/// Full Hessian of a scalar field on `R^K`.
pub fn fd_hessian<const K: usize, F: Fn(&[f64; K]) -> Result<f64>>(
    f: &F,
    p: &[f64; K],
    settings: &FdSettings,
) -> Result<[[f64; K]; K]> {
    let h = settings.scaled_step(p);
    let entry = |i: usize, j: usize, h: f64| -> Result<f64> {
        if i == j {
            second_diag(f, p, i, h)
        } else {
            mixed_second(f, p, i, j, h)
        }
    };
    let mut out = [[0.0; K]; K];
    for i in 0..K {
        for j in i..K {
            let v = if settings.richardson {
                let d_h = entry(i, j, h)?;
                let d_h2 = entry(i, j, 0.5 * h)?;
                (4.0 * d_h2 - d_h) / 3.0
            } else {
                entry(i, j, h)?
            };
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Exterior derivative of a 1-form field on `R^3`.
///
/// Input components in the basis `(dx, dy, dz)`; output components in the
/// basis `(dy^dz, dz^dx, dx^dy)` so that the result compares directly with
/// [`crate::numerics::hodge_star_r3`] images.
pub fn fd_d_one_form_r3<F: Fn(&[f64; 3]) -> Result<[f64; 3]>>(
    form: &F,
    p: &[f64; 3],
    settings: &FdSettings,
) -> Result<[f64; 3]> {
    let comp = |k: usize| move |q: &[f64; 3]| form(q).map(|a| a[k]);
    // (d a)_{ij} = d_i a_j - d_j a_i
    let d = |i: usize, j: usize| -> Result<f64> {
        Ok(fd_partial(&comp(j), p, i, settings)? - fd_partial(&comp(i), p, j, settings)?)
    };
    Ok([d(1, 2)?, d(2, 0)?, d(0, 1)?])
}

/// Index pairs for the 6 independent 2-form components on `R^4`, in the
/// order used throughout this crate.
pub const TWO_FORM_PAIRS_R4: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index triples for the 4 independent 3-form components on `R^4`.
pub const THREE_FORM_TRIPLES_R4: [(usize, usize, usize); 4] =
    [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];

/// Exterior derivative of a 2-form field on `R^4`.
///
/// Input: the 6 components ordered as [`TWO_FORM_PAIRS_R4`]. Output: the 4
/// components `(d w)_{ijk} = d_i w_{jk} - d_j w_{ik} + d_k w_{ij}` ordered as
/// [`THREE_FORM_TRIPLES_R4`].
pub fn fd_d_two_form_r4<F: Fn(&[f64; 4]) -> Result<[f64; 6]>>(
    form: &F,
    p: &[f64; 4],
    settings: &FdSettings,
) -> Result<[f64; 4]> {
    let comp_index = |i: usize, j: usize| -> (usize, f64) {
        debug_assert!(i != j);
        let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let k = TWO_FORM_PAIRS_R4
            .iter()
            .position(|&(p, q)| p == a && q == b)
            .expect("valid pair");
        (k, sign)
    };
    let partial = |axis: usize, i: usize, j: usize| -> Result<f64> {
        let (k, sign) = comp_index(i, j);
        let f = |q: &[f64; 4]| form(q).map(|w| sign * w[k]);
        fd_partial(&f, p, axis, settings)
    };
    let mut out = [0.0; 4];
    for (m, &(i, j, k)) in THREE_FORM_TRIPLES_R4.iter().enumerate() {
        out[m] = partial(i, j, k)? - partial(j, i, k)? + partial(k, i, j)?;
    }
    Ok(out)
}
