use hcburger::harness::{run, ExperimentId, ExperimentSpec};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let mut specs = Vec::new();
    let mut e1 = ExperimentSpec::new(ExperimentId::E1);
    e1.replicas = 20_000;
    specs.push(e1);
    let mut e3 = ExperimentSpec::new(ExperimentId::E3);
    e3.n_grid = vec![32, 64, 128];
    e3.replicas = 500;
    specs.push(e3);
    let mut e9 = ExperimentSpec::new(ExperimentId::E9);
    e9.n_grid = vec![6, 80];
    e9.replicas = 50;
    e9.samples = 50;
    specs.push(e9);

    for spec in specs {
        let one = in_pool(1, || run(&spec)).unwrap();
        let four = in_pool(4, || run(&spec)).unwrap();
        assert_eq!(one.estimates, four.estimates, "{:?}", spec.id);
        assert_eq!(one.pass, four.pass);
    }
}
