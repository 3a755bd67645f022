// Recovering the operator behind an orbit, and why duplicates break it.

use framelab::frames::{self, Frame};
use framelab::orbitrep;
use framelab::SeqVec;

pub fn run_example() -> framelab::Result<()> {
    let frame = frames::scaled_basis(8);
    let dual = orbitrep::truncation_dual(&frame)?;
    let rep = orbitrep::representation_operator(&frame, &dual)?;
    println!(
        "k e_k: |T| = {:.6}, residual = {:e}, kernel invariant = {}",
        rep.norm,
        rep.residual,
        rep.kernel_invariant()
    );

    let seq = frames::scaled_basis(50).elements().to_vec();
    let span = orbitrep::span_representation(&seq)?;
    println!("span representation of k e_k, k <= 50: |T| = {:.9}", span.norm);

    let dup = Frame::new(
        "duplicate",
        vec![SeqVec::basis(1), SeqVec::basis(1), SeqVec::basis(2), SeqVec::basis(3)],
    )?;
    let rep = orbitrep::representation_operator(&dup, &frames::canonical_dual(&dup)?)?;
    println!(
        "(e1, e1, e2, e3): residual = {:.4}, kernel invariant = {} (distance {:.4})",
        rep.residual,
        rep.kernel_invariant(),
        rep.kernel.distance
    );

    let decay = orbitrep::decay_diagnostic(&framelab::OperatorSpec::RightShift, &SeqVec::basis(1), 10)?;
    println!("right shift orbit norms: {:?}", decay.trend);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("orbit representation example");
}
