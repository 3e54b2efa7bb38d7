//! modsurf evaluates, classifies, constructs and verifies modular surfaces:
//! graphs `(x, y, |F(x+iy)|)` of the modulus of a complex analytic function,
//! read in Lorentz-Minkowski 3-space (and, as a variant, Euclidean 3-space).
//!
//! The crate is organized around:
//!
//! - [`expr`]: the expression language for generating functions;
//! - [`jet`]: truncated-Taylor evaluation of `F, F', F'', ...` with branch
//!   control, plus an independent contour-integral derivative oracle;
//! - [`geometry`]: height, causal character, Gaussian/mean curvature and the
//!   `alpha`/`beta`/`t` sign machinery, pointwise and over grids;
//! - [`classify`]: the local sign-of-curvature taxonomy keyed on zero
//!   profiles of `F, F', F''`, with an empirical circle census;
//! - [`construct`]: prescribed-curvature-sign construction by nested contour
//!   integration, and the closed-form flat families;
//! - [`fieldtheory`]: residual checks tying modular heights to
//!   zero/constant-mean-curvature equations, Liouville and massless-scalar
//!   Euler-Lagrange reductions, and sigma-model Christoffel recovery;
//! - [`raster`]: PGM/OBJ/CSV exports and marching-squares isocurves.

pub mod classify;
pub mod construct;
pub mod error;
pub mod expr;
pub mod fieldtheory;
pub mod geometry;
pub mod jet;
pub mod quad;
pub mod raster;

pub use error::{DegeneracyError, EvalError, QuadError};
pub use expr::{parse, Expr, Func, ParseDiagnostic};
pub use geometry::{
    sample_point, scan_grid, CausalCharacter, Curvature, GridField, KMode, Rect, SurfaceSample,
};
pub use jet::{eval_jet, eval_value, fd_oracle, zero_profile, BranchPolicy, ComplexJet, ZeroProfile};

/// Parse a complex number written as `a`, `bi`, or `a+bi` / `a-bi` with no
/// spaces (the CLI and config-file format).
pub fn parse_complex(s: &str) -> Result<num_complex::Complex64, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    // pure imaginary / pure real fast paths, then the a+bi split
    let parse_part = |t: &str| -> Result<f64, String> {
        t.parse::<f64>().map_err(|e| format!("bad number `{t}`: {e}"))
    };
    if let Some(im) = s.strip_suffix('i') {
        // find the split between real and imaginary parts: the last +/-
        // that is not a leading sign and not part of an exponent
        let bytes = im.as_bytes();
        let mut split = None;
        for j in (1..bytes.len()).rev() {
            let b = bytes[j];
            if (b == b'+' || b == b'-') && bytes[j - 1] != b'e' && bytes[j - 1] != b'E' {
                split = Some(j);
                break;
            }
        }
        match split {
            None => {
                let imag = if im.is_empty() {
                    1.0
                } else if im == "-" {
                    -1.0
                } else {
                    parse_part(im)?
                };
                Ok(num_complex::Complex64::new(0.0, imag))
            }
            Some(j) => {
                let re = parse_part(&im[..j])?;
                let imag_txt = &im[j..];
                let imag = if imag_txt == "+" {
                    1.0
                } else if imag_txt == "-" {
                    -1.0
                } else {
                    parse_part(imag_txt)?
                };
                Ok(num_complex::Complex64::new(re, imag))
            }
        }
    } else {
        Ok(num_complex::Complex64::new(parse_part(s)?, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::parse_complex;
    use num_complex::Complex64;

    #[test]
    fn complex_literals_parse() {
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("-0.5").unwrap(), Complex64::new(-0.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("0.5-0.3i").unwrap(), Complex64::new(0.5, -0.3));
        assert_eq!(parse_complex("1e-3+2e-4i").unwrap(), Complex64::new(1e-3, 2e-4));
        assert_eq!(parse_complex("-1-i").unwrap(), Complex64::new(-1.0, -1.0));
        assert!(parse_complex("").is_err());
        assert!(parse_complex("1+").is_err());
    }
}
