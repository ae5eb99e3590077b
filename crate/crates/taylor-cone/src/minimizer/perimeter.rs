//! Marching-squares interface geometry on a binary cell bitmap.
//!
//! The contour of the phase indicator at level 1/2 is extracted on the
//! dual lattice spanned by cell centers. The bitmap is mirror-padded by
//! one cell so the contour continues to the domain boundary, and every
//! segment is clipped back to the closed square. Crossings sit at edge
//! midpoints (corner values are 0 or 1), which makes a straight
//! axis-aligned cut of length exactly 1 on any resolution, while cell-edge
//! counting would overestimate diagonal interfaces by up to sqrt(2).

/// One oriented interface segment: `normal` points out of the phase
/// (from 1-cells toward 0-cells).
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub mid: (f64, f64),
    pub len: f64,
    pub normal: (f64, f64),
}

/// Square domain `[x0, x0 + n h]^2` carrying an `n x n` cell bitmap.
#[derive(Debug, Clone, Copy)]
pub struct BitmapDomain {
    pub n: usize,
    pub h: f64,
    pub x0: f64,
    pub y0: f64,
}

impl BitmapDomain {
    pub fn unit_square_centered(n: usize) -> Self {
        let h = 1.0 / n as f64;
        Self { n, h, x0: -0.5, y0: -0.5 }
    }

    fn side(&self) -> f64 {
        self.n as f64 * self.h
    }
}

/// Padded lookup: indices in `-1..=n` map edge cells outward.
fn padded(phase: &[bool], n: usize, ix: isize, iy: isize) -> bool {
    let cx = ix.clamp(0, n as isize - 1) as usize;
    let cy = iy.clamp(0, n as isize - 1) as usize;
    phase[cy * n + cx]
}

/// Segments of the dual cell whose lower-left corner is the center of
/// cell `(ix, iy)` (dual indices run over -1..n in each direction when
/// padding is included; callers pass `dx, dy in 0..=n` for the padded
/// lattice shifted by -1).
fn dual_cell_segments(
    dom: &BitmapDomain,
    phase: &[bool],
    dx: isize,
    dy: isize,
    out: &mut Vec<Segment>,
) {
    let n = dom.n;
    let h = dom.h;
    // Corner cells of this dual cell.
    let c00 = padded(phase, n, dx, dy);
    let c10 = padded(phase, n, dx + 1, dy);
    let c01 = padded(phase, n, dx, dy + 1);
    let c11 = padded(phase, n, dx + 1, dy + 1);
    let case = (c00 as u8) | (c10 as u8) << 1 | (c11 as u8) << 2 | (c01 as u8) << 3;
    if case == 0 || case == 15 {
        return;
    }
    // Dual-cell geometry: corner (0,0) is the center of cell (dx, dy).
    let cx = dom.x0 + (dx as f64 + 0.5) * h;
    let cy = dom.y0 + (dy as f64 + 0.5) * h;
    // Edge midpoints of the dual cell.
    let bottom = (cx + 0.5 * h, cy);
    let top = (cx + 0.5 * h, cy + h);
    let left = (cx, cy + 0.5 * h);
    let right = (cx + h, cy + 0.5 * h);

    let mut push = |p: (f64, f64), q: (f64, f64), inside_corner: (f64, f64)| {
        if let Some(seg) = clip_and_orient(dom, p, q, inside_corner) {
            out.push(seg);
        }
    };

    // inside_corner: a representative point on the phase-1 side, used to
    // orient the outward normal.
    match case {
        1 => push(left, bottom, (cx, cy)),
        2 => push(bottom, right, (cx + h, cy)),
        3 => push(left, right, (cx + 0.5 * h, cy)),
        4 => push(right, top, (cx + h, cy + h)),
        6 => push(bottom, top, (cx + h, cy + 0.5 * h)),
        7 => push(left, top, (cx + 0.75 * h, cy + 0.5 * h)),
        8 => push(top, left, (cx, cy + h)),
        9 => push(top, bottom, (cx, cy + 0.5 * h)),
        11 => push(top, right, (cx + 0.25 * h, cy + 0.5 * h)),
        12 => push(right, left, (cx + 0.5 * h, cy + h)),
        13 => push(right, bottom, (cx + 0.25 * h, cy + 0.5 * h)),
        14 => push(bottom, left, (cx + 0.75 * h, cy + 0.5 * h)),
        5 => {
            // Saddle (c00, c11 set): connect so the 1-corners separate.
            push(left, top, (cx, cy));
            push(right, bottom, (cx + h, cy + h));
        }
        10 => {
            push(top, right, (cx + h, cy));
            push(bottom, left, (cx, cy + h));
        }
        _ => unreachable!(),
    }
}

/// Clips a segment to the closed domain square and orients its normal
/// away from the inside point.
fn clip_and_orient(
    dom: &BitmapDomain,
    p: (f64, f64),
    q: (f64, f64),
    inside: (f64, f64),
) -> Option<Segment> {
    let (lo_x, lo_y) = (dom.x0, dom.y0);
    let (hi_x, hi_y) = (dom.x0 + dom.side(), dom.y0 + dom.side());
    // Liang-Barsky on the parameter t in [0, 1].
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = (q.0 - p.0, q.1 - p.1);
    for (pd, qd) in [
        (-d.0, p.0 - lo_x),
        (d.0, hi_x - p.0),
        (-d.1, p.1 - lo_y),
        (d.1, hi_y - p.1),
    ] {
        if pd == 0.0 {
            if qd < 0.0 {
                return None;
            }
        } else {
            let r = qd / pd;
            if pd < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t0 >= t1 {
        return None;
    }
    let a = (p.0 + t0 * d.0, p.1 + t0 * d.1);
    let b = (p.0 + t1 * d.0, p.1 + t1 * d.1);
    let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
    if len == 0.0 {
        return None;
    }
    let mid = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
    let tangent = ((b.0 - a.0) / len, (b.1 - a.1) / len);
    let mut normal = (tangent.1, -tangent.0);
    // Flip so the normal points away from the inside representative.
    let to_inside = (inside.0 - mid.0, inside.1 - mid.1);
    if normal.0 * to_inside.0 + normal.1 * to_inside.1 > 0.0 {
        normal = (-normal.0, -normal.1);
    }
    Some(Segment { a, b, mid, len, normal })
}

/// Segments of one dual cell, appended to `out`; `dx, dy` range over
/// `-1..n` (the padded lattice). Exposed for the minimizer's local
/// perimeter deltas.
pub fn dual_cell_segments_for(
    dom: &BitmapDomain,
    phase: &[bool],
    dx: isize,
    dy: isize,
    out: &mut Vec<Segment>,
) {
    dual_cell_segments(dom, phase, dx, dy, out);
}

/// All interface segments of the bitmap.
pub fn interface_segments(dom: &BitmapDomain, phase: &[bool]) -> Vec<Segment> {
    assert_eq!(phase.len(), dom.n * dom.n);
    let mut out = Vec::new();
    for dy in -1..dom.n as isize {
        for dx in -1..dom.n as isize {
            dual_cell_segments(dom, phase, dx, dy, &mut out);
        }
    }
    out
}

/// Total interface length (the discrete relative perimeter in the open
/// square).
pub fn perimeter(dom: &BitmapDomain, phase: &[bool]) -> f64 {
    interface_segments(dom, phase).iter().map(|s| s.len).sum()
}

/// Perimeter restricted to the dual cells whose corners involve cell
/// `(ix, iy)`: the only dual cells whose segments a flip of that cell
/// can change.
pub fn local_perimeter(dom: &BitmapDomain, phase: &[bool], ix: usize, iy: usize) -> f64 {
    let mut out = Vec::new();
    for dy in iy as isize - 1..=iy as isize {
        for dx in ix as isize - 1..=ix as isize {
            dual_cell_segments(dom, phase, dx, dy, &mut out);
        }
    }
    out.iter().map(|s| s.len).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertical_cut(n: usize, cols: usize) -> Vec<bool> {
        let mut phase = vec![false; n * n];
        for iy in 0..n {
            for ix in 0..cols {
                phase[iy * n + ix] = true;
            }
        }
        phase
    }

    #[test]
    fn straight_cut_has_exact_unit_length() {
        for n in [16usize, 33, 64] {
            let dom = BitmapDomain::unit_square_centered(n);
            let p = perimeter(&dom, &vertical_cut(n, n / 2));
            assert!((p - 1.0).abs() < 1e-12, "n={n}: {p}");
        }
    }

    #[test]
    fn empty_and_full_have_zero_perimeter() {
        let dom = BitmapDomain::unit_square_centered(16);
        assert_eq!(perimeter(&dom, &vec![false; 256]), 0.0);
        assert_eq!(perimeter(&dom, &vec![true; 256]), 0.0);
    }

    #[test]
    fn single_cell_has_square_perimeter() {
        // One interior cell: the contour is the diamond through its edge
        // midpoints at distance h/2, total 4 * h/sqrt(2) = 2 sqrt(2) h.
        let n = 16;
        let dom = BitmapDomain::unit_square_centered(n);
        let mut phase = vec![false; n * n];
        phase[8 * n + 8] = true;
        let p = perimeter(&dom, &phase);
        let expected = 2.0 * std::f64::consts::SQRT_2 * dom.h;
        assert!((p - expected).abs() < 1e-12, "{p} vs {expected}");
    }

    #[test]
    fn disk_perimeter_close_to_circumference() {
        // Binary marching squares carries a small angle-dependent length
        // bias (~5.5% averaged over a circle; cell-edge counting would
        // give 27%). The bias is a plateau, not a divergence.
        let r = 0.3;
        let mut errs = Vec::new();
        for n in [64usize, 128, 256] {
            let dom = BitmapDomain::unit_square_centered(n);
            let mut phase = vec![false; n * n];
            for iy in 0..n {
                for ix in 0..n {
                    let x = dom.x0 + (ix as f64 + 0.5) * dom.h;
                    let y = dom.y0 + (iy as f64 + 0.5) * dom.h;
                    phase[iy * n + ix] = x * x + y * y < r * r;
                }
            }
            let p = perimeter(&dom, &phase);
            errs.push((p - 2.0 * std::f64::consts::PI * r).abs() / (2.0 * std::f64::consts::PI * r));
        }
        assert!(errs.iter().all(|&e| e < 0.07), "relative error {errs:?}");
    }

    #[test]
    fn normals_point_out_of_phase() {
        let n = 32;
        let dom = BitmapDomain::unit_square_centered(n);
        let phase = vertical_cut(n, n / 2);
        for seg in interface_segments(&dom, &phase) {
            // Phase occupies x < 0; outward normal is +x.
            assert!(seg.normal.0 > 0.99, "normal {:?}", seg.normal);
            assert!(seg.normal.1.abs() < 1e-12);
        }
    }

    #[test]
    fn local_perimeter_tracks_flip_deltas() {
        let n = 32;
        let dom = BitmapDomain::unit_square_centered(n);
        let mut phase = vertical_cut(n, n / 2);
        for &(ix, iy) in &[(16usize, 7usize), (3, 3), (15, 31), (0, 0)] {
            let before_total = perimeter(&dom, &phase);
            let before_local = local_perimeter(&dom, &phase, ix, iy);
            phase[iy * n + ix] = !phase[iy * n + ix];
            let after_total = perimeter(&dom, &phase);
            let after_local = local_perimeter(&dom, &phase, ix, iy);
            phase[iy * n + ix] = !phase[iy * n + ix];
            assert!(
                ((after_total - before_total) - (after_local - before_local)).abs() < 1e-12,
                "flip at ({ix}, {iy})"
            );
        }
    }
}
