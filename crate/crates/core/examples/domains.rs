//! Builds each domain family and prints its basic geometry.

use rbm_trace::geometry::*;

fn main() -> rbm_trace::Result<()> {
    let domains = [
        make_square(1.0)?,
        make_koch_snowflake(5)?,
        make_product(&make_koch_snowflake(3)?, 1.0)?,
        make_corridor_domain(3, 1.5)?,
    ];
    for d in &domains {
        let b = d.bounding_box();
        let c = d.centroid();
        println!("{}", d.label());
        println!("  ambient dim      {}", d.ambient_dim());
        println!("  boundary dim     {:?}", d.analytic_boundary_dim());
        println!("  bounding box     {:?} .. {:?}", b.min, b.max);
        println!("  start point      {:?} at distance {:.4}", c, d.dist_to_boundary(&c)?);
    }
    let sq = &domains[0];
    let out = sq.reflect_step(&[0.5, 0.05], &[0.6, -0.05]);
    println!("reflecting (0.5, 0.05) -> (0.6, -0.05) in the square lands at {out:?}");
    Ok(())
}
