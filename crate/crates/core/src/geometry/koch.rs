use super::planar::Point2;

/// Vertices of the Koch snowflake prefractal at `level`, counterclockwise,
/// centred at the origin with circumradius 1.
pub fn snowflake_vertices(level: u32) -> Vec<Point2> {
    let mut v: Vec<Point2> = (0..3)
        .map(|k| {
            let a = std::f64::consts::FRAC_PI_2 + k as f64 * 2.0 * std::f64::consts::FRAC_PI_3;
            Point2::new(a.cos(), a.sin())
        })
        .collect();
    let h = 3f64.sqrt() / 6.0;
    for _ in 0..level {
        let n = v.len();
        let mut next = Vec::with_capacity(4 * n);
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            let e = b.sub(a);
            // outward side of a counterclockwise edge is its right-hand side
            let out = Point2::new(e.y, -e.x);
            next.push(a);
            next.push(a.add(e.scale(1.0 / 3.0)));
            next.push(a.add(e.scale(0.5)).add(out.scale(h)));
            next.push(a.add(e.scale(2.0 / 3.0)));
        }
        v = next;
    }
    v
}

pub fn koch_dimension() -> f64 {
    4f64.ln() / 3f64.ln()
}
