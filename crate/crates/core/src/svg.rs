//! Deterministic SVG rendering of tables, orbits, unfoldings and multi-panel
//! level sequences.  Exact coordinates are converted to floats only here.

use std::fmt::Write as _;

use crate::billiard::Orbit;
use crate::compat::CompatSequence;
use crate::geom::Point2;
use crate::scalar::Scalar;
use crate::tables::Table;
use crate::unfold::UnfoldedOrbit;

const STROKE_TABLE: &str = "#1a1a1a";
const STROKE_ORBIT: &str = "#c0392b";
const STROKE_OBSTACLE: &str = "#4a4a4a";

fn fmt_coord(v: f64) -> String {
    format!("{v:.6}")
}

struct Canvas {
    body: String,
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl Canvas {
    fn new() -> Self {
        Canvas {
            body: String::new(),
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        }
    }

    fn see(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    fn polygon<T: Scalar>(&mut self, pts: &[Point2<T>], stroke: &str, closed: bool) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = (p.x.to_f64(), -p.y.to_f64());
            self.see(x, y);
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{} {} ", fmt_coord(x), fmt_coord(y));
        }
        if closed {
            d.push('Z');
        }
        let _ = writeln!(
            self.body,
            r#"<path d="{}" fill="none" stroke="{stroke}" stroke-width="0.006" />"#,
            d.trim_end()
        );
    }

    fn finish(self) -> String {
        let (min_x, min_y, max_x, max_y) = if self.min_x.is_finite() {
            (self.min_x, self.min_y, self.max_x, self.max_y)
        } else {
            (0.0, 0.0, 1.0, 1.0)
        };
        let pad = 0.05 * ((max_x - min_x).max(max_y - min_y)).max(1e-9);
        let vb = format!(
            "{} {} {} {}",
            fmt_coord(min_x - pad),
            fmt_coord(min_y - pad),
            fmt_coord(max_x - min_x + 2.0 * pad),
            fmt_coord(max_y - min_y + 2.0 * pad)
        );
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{vb}\" width=\"640\" height=\"640\">\n{}</svg>\n",
            self.body
        )
    }
}

/// Render a table alone.
pub fn table_svg<T: Scalar>(table: &Table<T>) -> String {
    let mut c = Canvas::new();
    draw_table(&mut c, table);
    c.finish()
}

fn draw_table<T: Scalar>(c: &mut Canvas, table: &Table<T>) {
    c.polygon(&table.boundary().points, STROKE_TABLE, true);
    for ob in table.obstacles() {
        c.polygon(&ob.points, STROKE_OBSTACLE, true);
    }
}

/// Render a table with an orbit's traversed path.
pub fn orbit_svg<T: Scalar>(table: &Table<T>, orbit: &Orbit<T>) -> String {
    let mut c = Canvas::new();
    draw_table(&mut c, table);
    let mut path = orbit.path_points();
    if orbit.is_periodic() {
        path.push(orbit.init.point.clone());
    }
    c.polygon(&path, STROKE_ORBIT, false);
    c.finish()
}

/// Render the chain of reflected copies with the straightened orbit chord.
pub fn unfolded_svg<T: Scalar>(table: &Table<T>, unfolded: &UnfoldedOrbit<T>) -> String {
    let mut c = Canvas::new();
    for copy in &unfolded.copies {
        let pts: Vec<Point2<T>> = table
            .boundary()
            .points
            .iter()
            .map(|p| copy.isometry.apply_point(p))
            .collect();
        c.polygon(&pts, STROKE_TABLE, true);
    }
    let chord: Vec<Point2<T>> = unfolded
        .copies
        .iter()
        .map(|cp| cp.segment.0.clone())
        .chain(unfolded.copies.last().map(|cp| cp.segment.1.clone()))
        .collect();
    c.polygon(&chord, STROKE_ORBIT, false);
    c.finish()
}

/// Render each level of a compatible sequence side by side.
pub fn sequence_svg<T: Scalar>(tables: &[Table<T>], seq: &CompatSequence<T>) -> String {
    let mut c = Canvas::new();
    let mut offset = 0.0f64;
    for run in &seq.levels {
        let table = tables.iter().find(|t| t.level == run.level);
        let Some(table) = table else { continue };
        let xs: Vec<f64> = table
            .boundary()
            .points
            .iter()
            .map(|p| p.x.to_f64())
            .collect();
        let width = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - xs.iter().cloned().fold(f64::INFINITY, f64::min);
        draw_shifted(&mut c, table, &run.orbit, offset);
        offset += width * 1.25;
    }
    c.finish()
}

fn draw_shifted<T: Scalar>(c: &mut Canvas, table: &Table<T>, orbit: &Orbit<T>, dx: f64) {
    let shift = |p: &Point2<T>| (p.x.to_f64() + dx, -p.y.to_f64());
    let mut emit = |pts: Vec<(f64, f64)>, stroke: &str, closed: bool| {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            c.see(*x, *y);
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{} {} ", fmt_coord(*x), fmt_coord(*y));
        }
        if closed {
            d.push('Z');
        }
        let _ = writeln!(
            c.body,
            r#"<path d="{}" fill="none" stroke="{stroke}" stroke-width="0.006" />"#,
            d.trim_end()
        );
    };
    emit(
        table.boundary().points.iter().map(&shift).collect(),
        STROKE_TABLE,
        true,
    );
    for ob in table.obstacles() {
        emit(
            ob.points.iter().map(&shift).collect(),
            STROKE_OBSTACLE,
            true,
        );
    }
    let mut path = orbit.path_points();
    if orbit.is_periodic() {
        path.push(orbit.init.point.clone());
    }
    emit(path.iter().map(&shift).collect(), STROKE_ORBIT, false);
}
