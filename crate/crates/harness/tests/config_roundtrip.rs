use hardcore_thin::config::{parse_config, ExperimentKind};
use proptest::prelude::*;

proptest! {
    #[test]
    fn serialized_config_reparses_equal(
        kind in 0usize..8,
        intensity in 0.01..5.0f64,
        side in 5.0..60.0f64,
        s in prop::collection::vec(0.0..4.0f64, 1..5),
        ps in prop::collection::vec(0.0..=1.0f64, 1..5),
        seed in any::<u64>(),
        reps in 1usize..1000,
        s_max in 1usize..=16,
    ) {
        let kind = ExperimentKind::ALL[kind];
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let text = format!(
            "intensity = {intensity}\nseed_intensities = {}\np_values = {}\nmaster_seed = {seed}\nreplicates = {reps}\ns_max = {s_max}\nout = results/x\n",
            list(&s), list(&ps)
        );
        let mut overrides = vec![("experiment".to_string(), kind.name().to_string())];
        if kind != ExperimentKind::ThetaGrid {
            overrides.push(("side".into(), side.to_string()));
        }
        let c = parse_config(&text, &overrides).unwrap();
        prop_assert_eq!(parse_config(&c.serialize(), &[]).unwrap(), c);
    }
}
