macro_rules! example_test {
    ($module:ident, $file:literal, $test:ident) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example_test!(sequence_shifts, "sequence_shifts.rs", sequence_shifts_runs);
example_test!(frame_analysis, "frame_analysis.rs", frame_analysis_runs);
example_test!(carleson_frame, "carleson_frame.rs", carleson_frame_runs);
example_test!(orbit_representation, "orbit_representation.rs", orbit_representation_runs);
example_test!(hypercyclic_plan, "hypercyclic_plan.rs", hypercyclic_plan_runs);
example_test!(approximate_suborbit, "approximate_suborbit.rs", approximate_suborbit_runs);
example_test!(experiment_runner, "experiment_runner.rs", experiment_runner_runs);
