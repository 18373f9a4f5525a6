use coopcast_core::common::{best_two_step_rate, common_upper_at, single_step_rate, two_step_rate, CommonWitness, Direction, Scheme};
use coopcast_core::{BroadcastChannel, Kernel, Pmf};
use proptest::prelude::*;

fn norm(v: &[f64]) -> Vec<f64> {
    let t: f64 = v.iter().sum();
    v.iter().map(|x| x / t).collect()
}

fn kernel(v: &[f64], w: usize) -> Kernel {
    Kernel::new(v.chunks(w).map(norm).collect()).unwrap()
}

prop_compose! {
    fn setup()(
        t in prop::collection::vec(0.01f64..1.0, 8),
        px in prop::collection::vec(0.01f64..1.0, 2),
        uh in prop::collection::vec(0.01f64..1.0, 6),
        vh in prop::collection::vec(0.01f64..1.0, 6),
        c12 in 0.0f64..1.0,
        c21 in 0.0f64..1.0,
    ) -> (BroadcastChannel, CommonWitness) {
        let rows: Vec<Vec<Vec<f64>>> = t.chunks(4).map(|r| norm(r).chunks(2).map(|c| c.to_vec()).collect()).collect();
        let ch = BroadcastChannel::from_nested(&rows, c12, c21).unwrap();
        let w = CommonWitness { p_x: Pmf::new(norm(&px)).unwrap(), p_uhat_given_y2: kernel(&uh, 3), p_vhat_given_y1: kernel(&vh, 3) };
        (ch, w)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rates_never_exceed_upper_bound((ch, w) in setup()) {
        let ub = common_upper_at(&w.p_x, &ch).unwrap();
        let reports = [
            single_step_rate(&w, &ch).unwrap(),
            two_step_rate(&w, &ch, Direction::D12).unwrap(),
            two_step_rate(&w, &ch, Direction::D21).unwrap(),
            best_two_step_rate(&w, &ch).unwrap(),
        ];
        for r in &reports {
            prop_assert!(r.rate <= ub + 1e-9, "{:?}", r);
            prop_assert!((r.upper - ub).abs() < 1e-12);
            prop_assert_eq!(r.feasible, r.scheme != Scheme::None);
        }
        prop_assert!(reports[3].rate >= reports[1].rate.max(reports[2].rate) - 1e-12 || !reports[3].feasible);
    }

    #[test]
    fn swapping_receivers_swaps_directions((ch, w) in setup()) {
        let sw = ch.swapped();
        let w2 = CommonWitness { p_x: w.p_x.clone(), p_uhat_given_y2: w.p_vhat_given_y1.clone(), p_vhat_given_y1: w.p_uhat_given_y2.clone() };
        let a = two_step_rate(&w, &ch, Direction::D12).unwrap();
        let b = two_step_rate(&w2, &sw, Direction::D21).unwrap();
        prop_assert!((a.rate - b.rate).abs() < 1e-9);
        prop_assert_eq!(a.feasible, b.feasible);
        let ua = common_upper_at(&w.p_x, &ch).unwrap();
        let ub = common_upper_at(&w.p_x, &sw).unwrap();
        prop_assert!((ua - ub).abs() < 1e-12);
    }
}
