// Approximating a frame by a suborbit of a scaled left shift.

use framelab::approxrep::{self, ScheduleKind};
use framelab::frames;

pub fn run_example() -> framelab::Result<()> {
    let lambda = 2f64.sqrt();
    for (frame, kind) in [
        (frames::onb(8), ScheduleKind::Dyadic),
        (frames::doubled_onb(4), ScheduleKind::Dyadic),
        (frames::riesz_perturbed(6, 0.2), ScheduleKind::General),
    ] {
        let r = approxrep::approx_suborbit_pipeline(&frame, lambda, 0.0625, kind)?;
        println!(
            "{}: {:?} alphas {:?}",
            frame.label(),
            r.schedule.provenance,
            &r.schedule.alphas[..frame.len()]
        );
        println!(
            "  certified = {}, |U - U~| = {:.3e}, excess {} -> {}",
            r.all_certified(),
            r.report.synthesis_gap,
            r.report.excess_reference,
            r.report.excess_approx
        );
    }

    let r = approxrep::approx_suborbit_pipeline(&frames::onb(4), lambda, 0.125, ScheduleKind::Dyadic)?;
    r.write_csv(std::io::stdout())?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("approximate suborbit example");
}
