//! Convergence tables for quadratic elements on both manufactured problems.

use rectmix::assembly::Material;
use rectmix::study::{convergence_table, Problem, StressNorm};
use rectmix::Family;

fn main() -> Result<(), rectmix::Error> {
    let m = Material::default();
    let clamped = convergence_table(Problem::SinusoidalDisplacement, 2, Family::Full, &m, &[1, 2, 3, 4, 5, 6, 7])?;
    println!("{}", clamped.to_markdown());
    print!("{}", clamped.to_csv());
    let free = convergence_table(Problem::TractionBubble, 2, Family::Full, &m, &[2, 3, 4, 5, 6])?;
    println!("{}", free.to_markdown());
    print!("{}", free.to_csv());
    let free = free.with_stress_norm(StressNorm::FirstComponent);
    println!("{}", free.to_markdown());
    print!("{}", free.to_csv());
    Ok(())
}
