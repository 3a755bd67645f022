// Carleson sequences and the orbit frames of their diagonal operators.

use framelab::carleson;
use framelab::frames;
use framelab::orbitrep;

pub fn run_example() -> framelab::Result<()> {
    let seq = carleson::geometric_lambda(2.0, 10)?;
    let ratio = carleson::ratio_test(&seq)?;
    println!("geometric(2): c_max = {}, passes = {}", ratio.c_max, ratio.passes);
    println!("carleson infimum = {:.6e}", seq.carleson_inf()?);

    let harmonic = carleson::harmonic_lambda(10)?;
    let r = carleson::ratio_test(&harmonic)?;
    println!("harmonic: c_max = {:.4}, passes = {}, {:?}", r.c_max, r.passes, r.asymptotics);

    let sys = carleson::build_default_system(&seq)?;
    for m in [20, 40, 80] {
        let orbit = orbitrep::generate_orbit(&sys.op, &sys.phi, m)?;
        let frame = framelab::Frame::with_ambient("orbit", orbit.frame.elements().to_vec(), sys.dim())?;
        let b = frames::frame_bounds(&frame);
        println!(
            "M = {m:>2}: A = {:.3e}, B = {:.4}, excess = {}",
            b.ambient_lower(),
            b.upper,
            frames::excess(&frame)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("carleson example");
}
