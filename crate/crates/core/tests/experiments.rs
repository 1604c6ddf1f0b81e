use permlab::experiments::{parse_n_grid, run, write_output, BRule, ExperimentConfig, Kind, Provenance};
use permlab::partition::exact_order_law;
use permlab::weights::WeightSequence;
use proptest::prelude::*;

fn mc(kind: Kind, gamma: f64, n: Vec<usize>, samples: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind, gamma, n).unwrap();
    c.samples = samples;
    c.seed = Some(99);
    c.deterministic = true;
    c
}

fn render(cfg: &ExperimentConfig) -> Vec<u8> {
    let mut buf = Vec::new();
    write_output(&run(cfg).unwrap(), cfg, &mut buf).unwrap();
    buf
}

#[test]
fn sampled_delta_matches_exact_law() {
    let n = 40;
    let w = WeightSequence::power(0.5).unwrap();
    let law = exact_order_law(&w, n).unwrap();
    let exact = law.mean_log_y() - law.mean_log_order();
    let out = run(&mc(Kind::Closeness, 0.5, vec![n], 20_000)).unwrap();
    let r = out.records_named("mean_delta").next().unwrap();
    assert!(
        (r.value() - exact).abs() < 4.5 * r.std_error().unwrap(),
        "sampled {} vs exact {exact}",
        r.value()
    );
}

#[test]
fn worker_count_and_chunking_of_output() {
    let mut a = mc(Kind::Fclt, 0.5, vec![500, 2000], 1500);
    a.workers = 1;
    let mut b = a.clone();
    b.workers = 5;
    assert_eq!(render(&a), render(&b));
    // the chunk size picks the streams, so it is part of the experiment
    let mut c = a.clone();
    c.chunk_size = 400;
    assert_ne!(render(&a), render(&c));
}

#[test]
fn every_record_echoes_config() {
    let out = run(&mc(Kind::CltOrder, 0.5, vec![1000], 1000)).unwrap();
    for r in &out.records {
        assert_eq!(r.kind(), Kind::CltOrder);
        assert_eq!(r.samples(), Some(1000));
        assert_eq!(r.std_error().is_some(), r.provenance() == Provenance::MonteCarlo);
    }
}

proptest! {
    #[test]
    fn geometric_grid_shape(a in 1usize..1000, k in 0u32..8, mult in 2usize..5) {
        let b = a * mult.pow(k);
        let g = parse_n_grid(&format!("{a}:{b}:{mult}")).unwrap();
        prop_assert_eq!(g.len(), k as usize + 1);
        prop_assert_eq!(g[0], a);
        prop_assert_eq!(*g.last().unwrap(), b);
        prop_assert!(g.windows(2).all(|w| w[1] == w[0] * mult));
    }

    #[test]
    fn b_rule_is_monotone_floor(p in 0.0f64..1.0, n in 1usize..1_000_000) {
        let r = BRule { power: p };
        let b = r.eval(n);
        prop_assert!(b <= n);
        prop_assert!(r.eval(n + 1) >= b);
        prop_assert!((b as f64) <= (n as f64).powf(p) * (1.0 + 1e-9));
        prop_assert!(((b + 1) as f64) > (n as f64).powf(p));
    }
}
