use coopcast_core::dfsim::{generate_code, list_size_diagnostic, run_df, run_trial, simulate, Decoder, SimConfig, DEFAULT_MEMORY_CAP};
use coopcast_core::{BroadcastChannel, Kernel, Pmf, Sequential};

fn cascade() -> BroadcastChannel {
    BroadcastChannel::bsbc_cascade(0.05, 0.1).unwrap().with_links(0.3, 0.0).unwrap()
}

fn small_cfg() -> SimConfig {
    SimConfig {
        blocks: 4,
        trials: 300,
        n_grid: vec![4, 8],
        ..SimConfig::default()
    }
}

#[test]
fn same_seed_same_report() {
    let ch = cascade();
    let pu = Pmf::uniform(2).unwrap();
    let k = Kernel::bsc(0.25).unwrap();
    let a = simulate(&pu, &k, &ch, 0.2, 0.08, &small_cfg(), &Sequential).unwrap();
    let b = simulate(&pu, &k, &ch, 0.2, 0.08, &small_cfg(), &Sequential).unwrap();
    assert_eq!(a, b);
    let other = SimConfig { seed: 1, ..small_cfg() };
    let c = simulate(&pu, &k, &ch, 0.2, 0.08, &other, &Sequential).unwrap();
    assert_ne!(a, c);
}

#[test]
fn counts_agree_with_single_trials() {
    let ch = cascade();
    let cfg = small_cfg();
    let code = generate_code(&Pmf::uniform(2).unwrap(), &Kernel::bsc(0.25).unwrap(), 8, 0.2, 0.4, 0.3, cfg.seed, DEFAULT_MEMORY_CAP).unwrap();
    let row = run_df(&code, &ch, &cfg, &Sequential).unwrap();
    let (mut e1, mut e2, mut e) = (0, 0, 0);
    for t in 0..cfg.trials as u64 {
        let o = run_trial(&code, &ch, &cfg, t).unwrap();
        assert_eq!(o.rx1.len(), cfg.blocks - 1);
        assert_eq!(o.rx2.len(), cfg.blocks - 1);
        e1 += o.error1() as usize;
        e2 += o.error2() as usize;
        e += (o.error1() || o.error2()) as usize;
    }
    assert_eq!((row.errors1, row.errors2, row.errors), (e1, e2, e));
    assert!(row.sandwich_holds());
    assert!(row.pe_ci.0 <= row.pe && row.pe <= row.pe_ci.1);
}

#[test]
fn noiseless_channel_never_errs() {
    let ch = BroadcastChannel::bsbc_cascade(0.0, 0.0).unwrap().with_links(0.5, 0.0).unwrap();
    let cfg = SimConfig { trials: 100, ..small_cfg() };
    // U = X on a clean channel: every codeword pair is distinct w.h.p. at these sizes
    let rep = simulate(&Pmf::uniform(2).unwrap(), &Kernel::bsc(0.0).unwrap(), &ch, 0.0, 0.25, &cfg, &Sequential).unwrap();
    for r in &rep.rows {
        assert!(r.sandwich_holds());
        assert!(r.pe <= r.pe_ci.1);
    }
    assert_eq!(rep.rows.last().unwrap().errors, 0);
}

#[test]
fn rx2_errors_grow_with_rate() {
    let ch = cascade();
    let pu = Pmf::uniform(2).unwrap();
    let k = Kernel::bsc(0.25).unwrap();
    let cfg = SimConfig { n_grid: vec![12], ..small_cfg() };
    let lo = simulate(&pu, &k, &ch, 0.2, 0.08, &cfg, &Sequential).unwrap();
    let hi = simulate(&pu, &k, &ch, 0.2, 0.4, &cfg, &Sequential).unwrap();
    assert!(hi.rows[0].pe2 > lo.rows[0].pe2);
}

#[test]
fn typicality_lists_stay_under_bound() {
    let ch = cascade();
    let cfg = SimConfig {
        decoder: Decoder::Typicality { epsilon: 0.05 },
        ..small_cfg()
    };
    for n in [4, 8, 12] {
        let code = generate_code(&Pmf::uniform(2).unwrap(), &Kernel::bsc(0.25).unwrap(), n, 0.2, 0.08, 0.3, 0, DEFAULT_MEMORY_CAP).unwrap();
        let (mean, bound) = list_size_diagnostic(&code, &ch, &cfg, &Sequential).unwrap();
        assert!(mean <= bound, "n={n}: {mean} > {bound}");
    }
    let ml = small_cfg();
    let code = generate_code(&Pmf::uniform(2).unwrap(), &Kernel::bsc(0.25).unwrap(), 4, 0.2, 0.08, 0.3, 0, DEFAULT_MEMORY_CAP).unwrap();
    assert!(list_size_diagnostic(&code, &ch, &ml, &Sequential).is_err());
}

#[test]
fn rejects_non_degraded_channel() {
    // Y2 is the better output here
    let ch = BroadcastChannel::independent(&Kernel::bsc(0.3).unwrap(), &Kernel::bsc(0.05).unwrap(), 0.3, 0.0).unwrap();
    assert!(simulate(&Pmf::uniform(2).unwrap(), &Kernel::bsc(0.25).unwrap(), &ch, 0.1, 0.1, &small_cfg(), &Sequential).is_err());
}
