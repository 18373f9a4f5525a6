use coopcast_core::degraded::{degraded_region, nocoop_degraded_region};
use coopcast_core::{binary_entropy, BroadcastChannel, OptBudget, Sequential};

fn h(p: f64) -> f64 {
    binary_entropy(p).unwrap()
}

fn bsbc(c12: f64) -> BroadcastChannel {
    BroadcastChannel::bsbc_cascade(0.1, 0.1).unwrap().with_links(c12, 0.0).unwrap()
}

#[test]
fn corners_and_threshold() {
    let b = OptBudget::default();
    let t = std::time::Instant::now();
    let f0 = degraded_region(&bsbc(0.0), &b, &Sequential).unwrap();
    eprintln!("c12=0: {:?}", t.elapsed());
    assert!((f0.max_r1() - (1.0 - h(0.1))).abs() < 1e-3);
    assert!((f0.max_r2() - (1.0 - h(0.18))).abs() < 1e-3);

    let f = degraded_region(&bsbc(0.25), &b, &Sequential).unwrap();
    assert!((f.max_sum() - (1.0 - h(0.1))).abs() < 1e-3);
    for p in &f.points {
        assert!((p.r1 + p.r2 - (1.0 - h(0.1))).abs() < 1e-3, "{p:?}");
    }

    let f = degraded_region(&bsbc(0.10), &b, &Sequential).unwrap();
    let top = f.points.first().unwrap();
    let want = 1.0 - h(0.1) - (h(0.18) - h(0.1) - 0.10);
    assert!((top.r1 + top.r2 - want).abs() < 2e-3, "{top:?}");
    eprintln!("total: {:?}", t.elapsed());
}

#[test]
fn zero_link_matches_baseline() {
    let b = OptBudget::default();
    let a = degraded_region(&bsbc(0.0), &b, &Sequential).unwrap();
    let n = nocoop_degraded_region(&bsbc(0.0), &b, &Sequential).unwrap();
    for l in b.lambdas() {
        assert!((a.support(l) - n.support(l)).abs() < 1e-3);
    }
}
