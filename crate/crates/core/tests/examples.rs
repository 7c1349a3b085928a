//! Every example doubles as a smoke test.

macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(projection, "projection.rs");
example!(nmea_depth, "nmea_depth.rs");
example!(simulate_survey, "simulate_survey.rs");
example!(inspect_log, "inspect_log.rs");
example!(time_sync, "time_sync.rs");
example!(self_motion, "self_motion.rs");
example!(gp_regression, "gp_regression.rs");
example!(hyperparameters, "hyperparameters.rs");
example!(field_map, "field_map.rs");
example!(model_files, "model_files.rs");
example!(pipeline, "pipeline.rs");
