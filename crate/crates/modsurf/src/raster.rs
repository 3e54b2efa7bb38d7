//! Grid fields to artifacts: causal-character rasters (plain PGM),
//! zero-curvature isocurves by marching squares, height meshes (Wavefront
//! OBJ, v/f lines only), and CSV tables. All outputs are deterministic byte
//! streams with LF line endings.

use crate::geometry::{CausalCharacter, Curvature, GridField};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// Pixel classification codes.
pub const CODE_TIMELIKE: u8 = 0;
pub const CODE_LIGHTLIKE: u8 = 1;
pub const CODE_SPACELIKE: u8 = 2;
pub const CODE_EXCLUDED: u8 = 3;

const GRAY: [u8; 4] = [0, 85, 170, 255];

/// A classification raster matching the source grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    /// Plain (P2) PGM text, codes scaled to gray levels 0/85/170/255.
    pub fn to_pgm(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "P2");
        let _ = writeln!(out, "{} {}", self.width, self.height);
        let _ = writeln!(out, "255");
        for row in self.pixels.chunks(self.width) {
            let line: Vec<String> = row
                .iter()
                .map(|&c| GRAY[c as usize].to_string())
                .collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// Classify every sample; the lightlike locus is widened so that the curve
/// where `|grad h|^2` crosses 1 stays visible at pixel resolution: a pixel
/// whose right or down neighbor sits on the other side of the threshold is
/// drawn lightlike.
pub fn causal_raster(g: &GridField) -> Raster {
    let mut pixels = vec![CODE_EXCLUDED; g.nx * g.ny];
    let side = |ix: usize, iy: usize| -> Option<f64> {
        g.at(ix, iy).map(|s| s.grad_sq - 1.0)
    };
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let Some(s) = g.at(ix, iy) else {
                continue;
            };
            let mut code = match s.causal {
                CausalCharacter::Timelike => CODE_TIMELIKE,
                CausalCharacter::Lightlike => CODE_LIGHTLIKE,
                CausalCharacter::Spacelike => CODE_SPACELIKE,
            };
            if code != CODE_LIGHTLIKE {
                let here = s.grad_sq - 1.0;
                for (jx, jy) in [(ix + 1, iy), (ix, iy + 1)] {
                    if jx < g.nx && jy < g.ny {
                        if let Some(there) = side(jx, jy) {
                            if here * there < 0.0 {
                                code = CODE_LIGHTLIKE;
                            }
                        }
                    }
                }
            }
            pixels[iy * g.nx + ix] = code;
        }
    }
    Raster {
        width: g.nx,
        height: g.ny,
        pixels,
    }
}

/// Polylines of the zero level of the curvature numerator, in domain
/// coordinates.
#[derive(Debug, Clone)]
pub struct IsoCurveSet {
    pub polylines: Vec<Vec<(f64, f64)>>,
}

/// Result of contouring: either curves, or a flag when the whole field is
/// zero to rounding (identically flat surfaces have nothing to contour).
#[derive(Debug, Clone)]
pub enum IsoResult {
    Curves(IsoCurveSet),
    DegenerateLevel,
}

/// Marching squares at level zero over the curvature numerator, linear
/// interpolation on edges, saddles resolved by the cell-center mean.
pub fn zero_k_isocurves(g: &GridField) -> IsoResult {
    let value = |ix: usize, iy: usize| g.at(ix, iy).map(|s| s.k_numerator);

    let mut max_abs = 0.0f64;
    let mut max_scale = 0.0f64;
    for s in g.samples() {
        max_abs = max_abs.max(s.k_numerator.abs());
        max_scale = max_scale.max(s.k_num_scale);
    }
    if max_abs <= 1e-12 * max_scale {
        return IsoResult::DegenerateLevel;
    }

    let mut segments: Vec<((f64, f64), (f64, f64))> = Vec::new();
    for iy in 0..g.ny.saturating_sub(1) {
        for ix in 0..g.nx.saturating_sub(1) {
            let (Some(v00), Some(v10), Some(v01), Some(v11)) = (
                value(ix, iy),
                value(ix + 1, iy),
                value(ix, iy + 1),
                value(ix + 1, iy + 1),
            ) else {
                continue;
            };
            let (x0, x1) = (g.x_at(ix), g.x_at(ix + 1));
            let (y0, y1) = (g.y_at(iy), g.y_at(iy + 1));
            // interpolated crossing on an edge from value a (at pa) to b
            let lerp = |a: f64, b: f64, pa: (f64, f64), pb: (f64, f64)| -> (f64, f64) {
                let t = a / (a - b);
                (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1))
            };
            let p00 = (x0, y0);
            let p10 = (x1, y0);
            let p01 = (x0, y1);
            let p11 = (x1, y1);
            let neg = |v: f64| v < 0.0;
            let case = (neg(v00) as u8)
                | (neg(v10) as u8) << 1
                | (neg(v11) as u8) << 2
                | (neg(v01) as u8) << 3;
            let bottom = || lerp(v00, v10, p00, p10);
            let right = || lerp(v10, v11, p10, p11);
            let top = || lerp(v01, v11, p01, p11);
            let left = || lerp(v00, v01, p00, p01);
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left(), bottom())),
                2 | 13 => segments.push((bottom(), right())),
                3 | 12 => segments.push((left(), right())),
                4 | 11 => segments.push((right(), top())),
                6 | 9 => segments.push((bottom(), top())),
                7 | 8 => segments.push((left(), top())),
                5 | 10 => {
                    // saddle: connect according to the sign at the center
                    let center_neg = neg((v00 + v10 + v01 + v11) * 0.25);
                    let same_as_00 = (case == 5) == center_neg;
                    if same_as_00 {
                        segments.push((left(), top()));
                        segments.push((bottom(), right()));
                    } else {
                        segments.push((left(), bottom()));
                        segments.push((right(), top()));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    IsoResult::Curves(IsoCurveSet {
        polylines: chain_segments(segments),
    })
}

fn key(p: (f64, f64)) -> (u64, u64) {
    (p.0.to_bits(), p.1.to_bits())
}

/// Join shared-endpoint segments into polylines.
fn chain_segments(segments: Vec<((f64, f64), (f64, f64))>) -> Vec<Vec<(f64, f64)>> {
    let mut adjacency: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for (i, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(key(*a)).or_default().push(i);
        adjacency.entry(key(*b)).or_default().push(i);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segments[start];
        let mut line = vec![a, b];
        // extend forward from the tail, then backward from the head
        for dir in 0..2 {
            loop {
                let end = if dir == 0 {
                    *line.last().expect("nonempty")
                } else {
                    line[0]
                };
                let Some(cands) = adjacency.get(&key(end)) else {
                    break;
                };
                let next = cands.iter().find(|&&i| !used[i]).copied();
                let Some(i) = next else { break };
                used[i] = true;
                let (a, b) = segments[i];
                let far = if key(a) == key(end) { b } else { a };
                if dir == 0 {
                    line.push(far);
                } else {
                    line.insert(0, far);
                }
            }
        }
        polylines.push(line);
    }
    polylines
}

/// OBJ text: one `v x y h` line per unmasked sample, two triangles per
/// fully unmasked cell, 1-based indices.
pub fn mesh_string(g: &GridField) -> String {
    let mut out = String::new();
    let mut index = vec![0usize; g.nx * g.ny];
    let mut next = 0usize;
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            if let Some(s) = g.at(ix, iy) {
                next += 1;
                index[iy * g.nx + ix] = next;
                let _ = writeln!(out, "v {} {} {}", g.x_at(ix), g.y_at(iy), s.h);
            }
        }
    }
    for iy in 0..g.ny.saturating_sub(1) {
        for ix in 0..g.nx.saturating_sub(1) {
            let i00 = index[iy * g.nx + ix];
            let i10 = index[iy * g.nx + ix + 1];
            let i01 = index[(iy + 1) * g.nx + ix];
            let i11 = index[(iy + 1) * g.nx + ix + 1];
            if i00 > 0 && i10 > 0 && i01 > 0 && i11 > 0 {
                let _ = writeln!(out, "f {} {} {}", i00, i10, i11);
                let _ = writeln!(out, "f {} {} {}", i00, i11, i01);
            }
        }
    }
    out
}

pub fn export_mesh(g: &GridField, path: impl AsRef<Path>) -> io::Result<()> {
    std::fs::write(path, mesh_string(g))
}

fn sig17(v: f64) -> String {
    format!("{:.16e}", v)
}

/// CSV rows `x,y,h,gradsq,K,H,causal,kmode`, row-major, floats at 17
/// significant digits, undefined values empty.
pub fn csv_string(g: &GridField) -> String {
    let mut out = String::from("x,y,h,gradsq,K,H,causal,kmode\n");
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let x = g.x_at(ix);
            let y = g.y_at(iy);
            match g.at(ix, iy) {
                None => {
                    let _ = writeln!(out, "{},{},,,,,excluded,", sig17(x), sig17(y));
                }
                Some(s) => {
                    let k = match s.k {
                        Curvature::Defined(v) | Curvature::LimitDefined(v) => sig17(v),
                        Curvature::Undefined => String::new(),
                    };
                    let h_mean = s.h_mean.map(sig17).unwrap_or_default();
                    let causal = match s.causal {
                        CausalCharacter::Spacelike => "spacelike",
                        CausalCharacter::Timelike => "timelike",
                        CausalCharacter::Lightlike => "lightlike",
                    };
                    let kmode = s.k_mode.map(|m| m.label()).unwrap_or("");
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        sig17(x),
                        sig17(y),
                        sig17(s.h),
                        sig17(s.grad_sq),
                        k,
                        h_mean,
                        causal,
                        kmode
                    );
                }
            }
        }
    }
    out
}

pub fn export_csv(g: &GridField, path: impl AsRef<Path>) -> io::Result<()> {
    std::fs::write(path, csv_string(g))
}

pub fn export_pgm(g: &GridField, path: impl AsRef<Path>) -> io::Result<()> {
    std::fs::write(path, causal_raster(g).to_pgm())
}
