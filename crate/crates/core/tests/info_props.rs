use std::collections::HashMap;

use coopcast_core::degraded::bsbc_closed_form_point;
use coopcast_core::{compose_chain, Factor, JointPmf, Kernel, Pmf, Var};
use proptest::prelude::*;

const NAMES: [&str; 3] = ["a", "b", "c"];

/// Joint over three variables with sizes and unnormalized weights.
fn joint_strategy() -> impl Strategy<Value = JointPmf> {
    (1usize..=3, 1usize..=3, 1usize..=4)
        .prop_flat_map(|(x, y, z)| {
            let cells = x * y * z;
            (Just([x, y, z]), prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], cells))
        })
        .prop_filter_map("all-zero weights", |(sizes, w)| {
            let t: f64 = w.iter().sum();
            if t <= 0.0 {
                return None;
            }
            let vars = NAMES.iter().zip(sizes).map(|(n, s)| Var::new(n, s).unwrap()).collect();
            JointPmf::new(vars, w.iter().map(|v| v / t).collect()).ok()
        })
}

fn digits(j: &JointPmf, mut i: usize) -> Vec<usize> {
    let mut d = vec![0; j.vars().len()];
    for (k, v) in j.vars().iter().enumerate().rev() {
        d[k] = i % v.size();
        i /= v.size();
    }
    d
}

fn project(j: &JointPmf, vars: &[&str]) -> HashMap<Vec<usize>, f64> {
    let idx: Vec<usize> = vars.iter().map(|v| j.var_index(v).unwrap()).collect();
    let mut m = HashMap::new();
    for (i, &p) in j.probs().iter().enumerate() {
        let d = digits(j, i);
        *m.entry(idx.iter().map(|&k| d[k]).collect()).or_insert(0.0) += p;
    }
    m
}

fn brute_entropy(j: &JointPmf, vars: &[&str]) -> f64 {
    project(j, vars).values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Direct sum of p(abc) log p(abc)p(c) / (p(ac)p(bc)).
fn brute_mi(j: &JointPmf, a: &str, b: &str, c: Option<&str>) -> f64 {
    let cv: Vec<&str> = c.into_iter().collect();
    let ac: Vec<&str> = [a].into_iter().chain(cv.iter().copied()).collect();
    let bc: Vec<&str> = [b].into_iter().chain(cv.iter().copied()).collect();
    let abc: Vec<&str> = [a, b].into_iter().chain(cv.iter().copied()).collect();
    let (pabc, pac, pbc, pc) = (project(j, &abc), project(j, &ac), project(j, &bc), project(j, &cv));
    let mut s = 0.0;
    for (k, &p) in &pabc {
        if p <= 0.0 {
            continue;
        }
        let rest = &k[2..];
        let kac: Vec<usize> = [k[0]].iter().chain(rest).copied().collect();
        let kbc: Vec<usize> = [k[1]].iter().chain(rest).copied().collect();
        s += p * (p * pc[rest] / (pac[&kac] * pbc[&kbc])).log2();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn entropy_matches_brute_force(j in joint_strategy()) {
        for vars in [&["a"][..], &["b", "c"], &["c", "a"], &["a", "b", "c"]] {
            let got = j.entropy(vars).unwrap();
            prop_assert!((got - brute_entropy(&j, vars)).abs() < 1e-12);
        }
    }

    #[test]
    fn mutual_information_matches_brute_force(j in joint_strategy()) {
        let got = j.mutual_information(&["a"], &["b"], &[]).unwrap();
        prop_assert!((got - brute_mi(&j, "a", "b", None)).abs() < 1e-12);
        let got = j.mutual_information(&["a"], &["c"], &["b"]).unwrap();
        prop_assert!((got - brute_mi(&j, "a", "c", Some("b"))).abs() < 1e-12);
    }

    #[test]
    fn chain_rule_and_nonnegativity(j in joint_strategy()) {
        let habc = j.entropy(&["a", "b", "c"]).unwrap();
        let split = j.entropy(&["a"]).unwrap()
            + j.conditional_entropy(&["b"], &["a"]).unwrap()
            + j.conditional_entropy(&["c"], &["a", "b"]).unwrap();
        prop_assert!((habc - split).abs() < 1e-12);
        let i_a_bc = j.mutual_information(&["a"], &["b", "c"], &[]).unwrap();
        let i_chain = j.mutual_information(&["a"], &["b"], &[]).unwrap()
            + j.mutual_information(&["a"], &["c"], &["b"]).unwrap();
        prop_assert!((i_a_bc - i_chain).abs() < 1e-12);
        for (a, b, g) in [("a", "b", vec![]), ("b", "c", vec!["a"]), ("a", "c", vec!["b"])] {
            prop_assert!(j.mutual_information(&[a], &[b], &g).unwrap() >= 0.0);
            prop_assert!(j.conditional_entropy(&[a], &g).unwrap() >= 0.0);
        }
    }

    #[test]
    fn variable_order_is_irrelevant(j in joint_strategy()) {
        let k = j.marginalize(&["c", "a", "b"]).unwrap();
        for vars in [&["a"][..], &["a", "c"], &["b", "c"]] {
            prop_assert!((j.entropy(vars).unwrap() - k.entropy(vars).unwrap()).abs() < 1e-12);
        }
        let x = j.mutual_information(&["a"], &["c"], &["b"]).unwrap();
        let y = k.mutual_information(&["c"], &["a"], &["b"]).unwrap();
        prop_assert!((x - y).abs() < 1e-12);
    }

    #[test]
    fn data_processing(
        px in prop::collection::vec(0.01f64..1.0, 3),
        k1 in prop::collection::vec(0.01f64..1.0, 9),
        k2 in prop::collection::vec(0.01f64..1.0, 6),
    ) {
        let norm = |v: &[f64]| { let t: f64 = v.iter().sum(); v.iter().map(|x| x / t).collect::<Vec<_>>() };
        let rows = |v: &[f64], w: usize| v.chunks(w).map(norm).collect::<Vec<_>>();
        let j = compose_chain(&[
            Factor::source("x", &Pmf::new(norm(&px)).unwrap()).unwrap(),
            Factor::conditional("y", "x", &Kernel::new(rows(&k1, 3)).unwrap()).unwrap(),
            Factor::conditional("z", "y", &Kernel::new(rows(&k2, 2)).unwrap()).unwrap(),
        ]).unwrap();
        let ixy = j.mutual_information(&["x"], &["y"], &[]).unwrap();
        let ixz = j.mutual_information(&["x"], &["z"], &[]).unwrap();
        prop_assert!(ixz <= ixy + 1e-12);
        prop_assert!(j.mutual_information(&["x"], &["z"], &["y"]).unwrap() < 1e-12);
    }

    #[test]
    fn degraded_rates_grow_with_link(p1 in 0.0f64..0.5, p2 in 0.0f64..0.5, alpha in 0.0f64..0.5, c in 0.0f64..1.0, d in 0.0f64..0.5) {
        let (r1, a) = bsbc_closed_form_point(p1, p2, c, alpha).unwrap();
        let (s1, b) = bsbc_closed_form_point(p1, p2, c + d, alpha).unwrap();
        prop_assert_eq!(r1, s1);
        prop_assert!(b >= a);
        prop_assert!(r1 >= 0.0 && a >= 0.0);
    }
}
