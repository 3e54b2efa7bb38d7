//! Adaptive Gauss-Kronrod quadrature (G7/K15) for complex-valued integrands
//! of one real parameter, used for the nested contour integrals of the
//! surface construction.

use crate::error::QuadError;
use num_complex::Complex64;

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights, with
// the embedded 7-point Gauss weights. Literals carry the full tabulated
// digits; the compiler rounds them to the nearest double.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_DEPTH: usize = 28;
const MAX_EVALS: usize = 400_000;

/// Integral value with an error estimate and the evaluation count.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub err: f64,
    pub evals: usize,
}

fn qk15<F>(f: &mut F, a: f64, b: f64) -> Result<(Complex64, f64), QuadError>
where
    F: FnMut(f64) -> Result<Complex64, QuadError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center)?;

    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = kronrod.norm();
    let mut values = [Complex64::new(0.0, 0.0); 14];

    for j in 0..7 {
        let abscissa = half * XGK[j];
        let v1 = f(center - abscissa)?;
        let v2 = f(center + abscissa)?;
        values[2 * j] = v1;
        values[2 * j + 1] = v2;
        kronrod += (v1 + v2) * WGK[j];
        res_abs += WGK[j] * (v1.norm() + v2.norm());
        if j % 2 == 1 {
            // odd Kronrod indices carry the embedded Gauss nodes
            gauss += (v1 + v2) * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((values[2 * j] - mean).norm() + (values[2 * j + 1] - mean).norm());
    }
    res_asc *= half.abs();
    res_abs *= half.abs();

    let value = kronrod * half;
    let raw = ((kronrod - gauss) * half).norm();
    let mut err = raw;
    if res_asc != 0.0 && raw != 0.0 {
        err = res_asc * (200.0 * raw / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if floor > err {
        err = floor;
    }
    Ok((value, err))
}

fn adapt<F>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
    evals: &mut usize,
) -> Result<(Complex64, f64), QuadError>
where
    F: FnMut(f64) -> Result<Complex64, QuadError>,
{
    *evals += 15;
    if *evals > MAX_EVALS {
        return Err(QuadError::ToleranceNotMet { tol, best: f64::NAN });
    }
    let (value, err) = qk15(f, a, b)?;
    if err <= tol || (b - a).abs() < f64::EPSILON * 4.0 {
        return Ok((value, err));
    }
    if depth >= MAX_DEPTH {
        return Err(QuadError::ToleranceNotMet { tol, best: err });
    }
    let mid = 0.5 * (a + b);
    let (v1, e1) = adapt(f, a, mid, tol * 0.5, depth + 1, evals)?;
    let (v2, e2) = adapt(f, mid, b, tol * 0.5, depth + 1, evals)?;
    Ok((v1 + v2, e1 + e2))
}

/// Adaptively integrate `f` over `[a, b]` to absolute/relative tolerance.
pub fn integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> Result<Complex64, QuadError>,
{
    let mut evals = 15;
    let (first, first_err) = qk15(&mut f, a, b)?;
    let tol = abs_tol.max(rel_tol * first.norm());
    if first_err <= tol {
        return Ok(QuadResult {
            value: first,
            err: first_err,
            evals,
        });
    }
    let (value, err) = adapt(&mut f, a, b, tol, 0, &mut evals)?;
    Ok(QuadResult { value, err, evals })
}
