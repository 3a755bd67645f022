// A vector whose Rolewicz orbit passes close to every element of a frame.

use framelab::frames;
use framelab::hypercyclic;

pub fn run_example() -> framelab::Result<()> {
    let targets = frames::onb(10);
    let plan = hypercyclic::plan_hypercyclic_vector(targets.elements(), 2.0, 0.125)?;
    println!("alphas = {:?}", plan.alphas);
    for (k, (e, t)) in plan.certified_errors.iter().zip(plan.tolerances()).enumerate() {
        println!("k = {:>2}: error^2 = {e:.3e} <= {t:.3e}", k + 1);
    }
    let suborbit = plan.suborbit()?;
    let check = frames::epsilon_approx_check(&targets, &suborbit, plan.epsilon)?;
    println!("suborbit is an eps-approximation: {}, excess {:?}", check.verdict, check.excess_match);

    for (n, b) in hypercyclic::orbit_section_bounds(&plan.phi, 2.0, &[20, 60, 200])? {
        println!("orbit section n <= {n:>3}: B/A = {:.3e}", b.ratio());
    }
    println!("{}", serde_json::to_string(&plan.to_json())?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("hypercyclic example");
}
