//! Isocurves of a swept field over the `(pc, rho)` plane by marching squares.
//!
//! No-harvest cells count as `+∞`; cells without a solution are holes and
//! every square touching one is skipped. An edge between a finite corner and
//! an infinite one is crossed at its midpoint.

use std::collections::{BTreeMap, BTreeSet};
use std::io;

use serde::{Deserialize, Serialize};

use crate::chain::Classification;
use crate::error::{Result, RotationError};
use crate::sweep::{format_number, SweepCell};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub level: f64,
    /// `(pc, rho)` vertices in order.
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

/// Values on a rectangular `(pc, rho)` grid, row-major in rho.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub pc: Vec<f64>,
    pub rho: Vec<f64>,
    pub values: Vec<f64>,
}

impl Field {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.pc.len() + i]
    }

    /// Builds the field for one `(model, beta)` group. Missing grid points
    /// become holes.
    pub fn from_cells(cells: &[SweepCell], selection: Option<(&str, f64)>) -> Result<Self> {
        let groups: BTreeSet<(String, u64)> = cells.iter().map(|c| (c.model.clone(), c.beta.to_bits())).collect();
        let (model, beta) = match selection {
            Some((m, b)) => (m.to_owned(), b),
            None if groups.len() == 1 => {
                let (m, b) = groups.iter().next().expect("one group");
                (m.clone(), f64::from_bits(*b))
            }
            None if groups.is_empty() => return Err(RotationError::Config("sweep has no rows".into())),
            None => {
                return Err(RotationError::Config(
                    "sweep holds several (model, beta) groups; select one".into(),
                ))
            }
        };
        let rows: Vec<&SweepCell> = cells.iter().filter(|c| c.model == model && c.beta == beta).collect();
        if rows.is_empty() {
            return Err(RotationError::Config(format!("no rows for model {model} beta {beta}")));
        }
        let quantities: BTreeSet<&str> = rows.iter().map(|c| c.quantity.as_str()).collect();
        if quantities.len() > 1 {
            return Err(RotationError::Config("selected rows mix several quantities".into()));
        }
        let sorted = |xs: Vec<f64>| {
            let mut xs = xs;
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            xs
        };
        let pc = sorted(rows.iter().map(|c| c.pc).collect());
        let rho = sorted(rows.iter().map(|c| c.rho).collect());
        let mut values = vec![f64::NAN; pc.len() * rho.len()];
        for c in rows {
            let i = pc.partition_point(|&x| x < c.pc);
            let j = rho.partition_point(|&x| x < c.rho);
            values[j * pc.len() + i] = match (c.classification, c.value) {
                (Classification::NoHarvest, _) => f64::INFINITY,
                (Classification::Interior, Some(v)) => v,
                _ => f64::NAN,
            };
        }
        Ok(Self { pc, rho, values })
    }
}

fn crossing(p0: (f64, f64), z0: f64, p1: (f64, f64), z1: f64, level: f64) -> (f64, f64) {
    let t = if z0.is_infinite() || z1.is_infinite() || z1 == z0 {
        0.5
    } else {
        ((level - z0) / (z1 - z0)).clamp(0.0, 1.0)
    };
    (p0.0 + t * (p1.0 - p0.0), p0.1 + t * (p1.1 - p0.1))
}

/// Edge identity for stitching: (horizontal?, i, j).
type EdgeKey = (bool, usize, usize);

fn contour_1d(coords: &[(f64, f64)], values: &[f64], level: f64) -> Vec<Polyline> {
    let mut out = Vec::new();
    for k in 0..values.len().saturating_sub(1) {
        let (z0, z1) = (values[k], values[k + 1]);
        if z0.is_nan() || z1.is_nan() {
            continue;
        }
        if (z0 >= level) != (z1 >= level) {
            out.push(Polyline {
                level,
                points: vec![crossing(coords[k], z0, coords[k + 1], z1, level)],
                closed: false,
            });
        }
    }
    out
}

/// Contour polylines of `field` at `level`.
pub fn contour(field: &Field, level: f64) -> Vec<Polyline> {
    let (nx, ny) = (field.pc.len(), field.rho.len());
    if nx == 0 || ny == 0 {
        return Vec::new();
    }
    if ny == 1 || nx == 1 {
        let coords: Vec<(f64, f64)> = if ny == 1 {
            field.pc.iter().map(|&p| (p, field.rho[0])).collect()
        } else {
            field.rho.iter().map(|&r| (field.pc[0], r)).collect()
        };
        return contour_1d(&coords, &field.values, level);
    }

    let point = |i: usize, j: usize| (field.pc[i], field.rho[j]);
    let mut segments: Vec<[(EdgeKey, (f64, f64)); 2]> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let z = [field.at(i, j), field.at(i + 1, j), field.at(i + 1, j + 1), field.at(i, j + 1)];
            if z.iter().any(|v| v.is_nan()) {
                continue;
            }
            let case = z
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &v)| acc | (u8::from(v >= level) << k));
            if case == 0 || case == 15 {
                continue;
            }
            // Edges: 0 bottom, 1 right, 2 top, 3 left.
            let edge = |e: usize| -> (EdgeKey, (f64, f64)) {
                match e {
                    0 => ((true, i, j), crossing(point(i, j), z[0], point(i + 1, j), z[1], level)),
                    1 => ((false, i + 1, j), crossing(point(i + 1, j), z[1], point(i + 1, j + 1), z[2], level)),
                    2 => ((true, i, j + 1), crossing(point(i, j + 1), z[3], point(i + 1, j + 1), z[2], level)),
                    _ => ((false, i, j), crossing(point(i, j), z[0], point(i, j + 1), z[3], level)),
                }
            };
            let center_above = z.iter().sum::<f64>() / 4.0 >= level;
            let pairs: &[(usize, usize)] = match case {
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(3, 2)],
                // Saddles: corners 0 and 2 above.
                5 if center_above => &[(3, 2), (0, 1)],
                5 => &[(3, 0), (1, 2)],
                // Corners 1 and 3 above.
                10 if center_above => &[(3, 0), (1, 2)],
                10 => &[(3, 2), (0, 1)],
                _ => &[],
            };
            for &(a, b) in pairs {
                segments.push([edge(a), edge(b)]);
            }
        }
    }
    stitch(&segments, level)
}

fn stitch(segments: &[[(EdgeKey, (f64, f64)); 2]], level: f64) -> Vec<Polyline> {
    let mut by_edge: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (s, seg) in segments.iter().enumerate() {
        for (key, _) in seg {
            by_edge.entry(*key).or_default().push(s);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start: usize, from: EdgeKey, used: &mut Vec<bool>| -> (Vec<(f64, f64)>, bool) {
        let mut points = Vec::new();
        let mut current = start;
        let mut entry = from;
        let first_key = from;
        loop {
            used[current] = true;
            let seg = &segments[current];
            let (a, b) = if seg[0].0 == entry { (seg[0], seg[1]) } else { (seg[1], seg[0]) };
            if points.is_empty() {
                points.push(a.1);
            }
            points.push(b.1);
            if b.0 == first_key {
                points.pop();
                return (points, true);
            }
            let next = by_edge[&b.0].iter().copied().find(|&s| !used[s]);
            match next {
                Some(n) => {
                    current = n;
                    entry = b.0;
                }
                None => return (points, false),
            }
        }
    };
    // Open curves start at edges touched by a single segment.
    for (s, seg) in segments.iter().enumerate() {
        if used[s] {
            continue;
        }
        for &(key, _) in seg {
            if by_edge[&key].len() == 1 {
                let (points, closed) = walk(s, key, &mut used);
                out.push(Polyline { level, points, closed });
                break;
            }
        }
    }
    for (s, seg) in segments.iter().enumerate() {
        if !used[s] {
            let (points, closed) = walk(s, seg[0].0, &mut used);
            out.push(Polyline { level, points, closed });
        }
    }
    out
}

/// Contours of the selected group for every level, in level order.
pub fn emit_isocurves(cells: &[SweepCell], levels: &[f64], selection: Option<(&str, f64)>) -> Result<Vec<Polyline>> {
    if levels.iter().any(|l| !l.is_finite()) {
        return Err(RotationError::Config("isocurve levels must be finite".into()));
    }
    let field = Field::from_cells(cells, selection)?;
    Ok(levels.iter().flat_map(|&l| contour(&field, l)).collect())
}

/// Writes `level,segment_id,pc,rho` rows; segment ids count from zero within each level.
pub fn write_isocurves<W: io::Write>(polylines: &[Polyline], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["level", "segment_id", "pc", "rho"])?;
    let mut next_id: BTreeMap<u64, usize> = BTreeMap::new();
    for line in polylines {
        let id = next_id.entry(line.level.to_bits()).or_insert(0);
        let mut points = line.points.clone();
        if line.closed {
            if let Some(&p) = points.first() {
                points.push(p);
            }
        }
        for (pc, rho) in points {
            w.write_record([format_number(line.level), id.to_string(), format_number(pc), format_number(rho)])?;
        }
        *id += 1;
    }
    w.flush()?;
    Ok(())
}
