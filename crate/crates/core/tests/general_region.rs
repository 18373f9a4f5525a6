use coopcast_core::general::{cutset_bound_seeded, marton_coop_region, marton_nocoop_region};
use coopcast_core::optim::{stream_rng, Layout};
use coopcast_core::{BroadcastChannel, OptBudget, Sequential};

fn random_channel(seed: u64) -> BroadcastChannel {
    let mut rng = stream_rng(seed, 99, 0, 0);
    let t = Layout::new(vec![]).repeat(2, 4).dirichlet(&mut rng);
    BroadcastChannel::new(2, 2, 2, t, 0.0, 0.0).unwrap()
}

#[test]
fn zero_links_match_baseline() {
    let b = OptBudget::default();
    for seed in 0..3 {
        let ch = random_channel(seed);
        let t = std::time::Instant::now();
        let n = marton_nocoop_region(&ch, 2, 2, &b, &Sequential).unwrap();
        eprintln!("nocoop {:?}", t.elapsed());
        let c = marton_coop_region(&ch, 2, 2, &b, &Sequential).unwrap();
        eprintln!("coop {:?}", t.elapsed());
        let px: Vec<Vec<f64>> = vec![];
        let cut = cutset_bound_seeded(&ch, &b, &Sequential, &px);
        eprintln!("cut {:?}", t.elapsed());
        for l in b.lambdas() {
            let d = c.support(l) - n.support(l);
            assert!(d.abs() < 1e-3, "seed {seed} lambda {l}: {d}");
            assert!(cut.support(l) >= c.support(l) - 1e-9);
        }
    }
}
