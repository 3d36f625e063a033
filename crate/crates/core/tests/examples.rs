macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect($file);
        }
    };
}

example!(
    swap_decomposition,
    "swap_decomposition.rs",
    swap_decomposition_runs
);
example!(
    complementarity_sweep,
    "complementarity_sweep.rs",
    complementarity_sweep_runs
);
example!(chsh_bridge, "chsh_bridge.rs", chsh_bridge_runs);
example!(delayed_choice, "delayed_choice.rs", delayed_choice_runs);
example!(
    classical_fidelity,
    "classical_fidelity.rs",
    classical_fidelity_runs
);
example!(violation_chain, "violation_chain.rs", violation_chain_runs);
