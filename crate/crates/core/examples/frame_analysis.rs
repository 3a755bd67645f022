// Frame bounds, excess, canonical dual reconstruction, and ε-approximation.

use framelab::frames::{self, Frame};
use framelab::SeqVec;

pub fn run_example() -> framelab::Result<()> {
    for frame in [frames::onb(4), frames::doubled_onb(3), frames::riesz_perturbed(5, 0.3)] {
        let b = frames::frame_bounds(&frame);
        println!(
            "{:<24} A = {:.6} B = {:.6} excess = {}",
            frame.label(),
            b.lower,
            b.upper,
            frames::excess(&frame)
        );
    }

    let frame = frames::riesz_perturbed(5, 0.3);
    let dual = frames::canonical_dual(&frame)?;
    let f = SeqVec::from_real([(1, 1.0), (3, -2.0), (5, 0.5)])?;
    let (g, residual) = frames::reconstruct(&frame, &dual, &f)?;
    println!("reconstruction {g} (residual {residual:e})");

    let nudged: Vec<SeqVec> = frame
        .elements()
        .iter()
        .map(|e| e.add(&SeqVec::basis(e.max_index()).scale_real(0.01)))
        .collect();
    let approx = Frame::new("nudged", nudged)?;
    let report = frames::epsilon_approx_check(&frame, &approx, 0.01)?;
    println!(
        "|U - U~| = {:.4}, bounds within interval: {}, excess preserved: {:?}",
        report.synthesis_gap, report.bounds_within, report.excess_match
    );
    println!("{}", frame.to_json_string()?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("frame analysis example");
}
