#![allow(dead_code)]

use proptest::prelude::*;
use wtmac::probkit::{Channel, Dist, FactoredInput, WiretapMAC};

pub fn wb62() -> Channel {
    Channel::new(vec![
        vec![0.6178, 0.3822],
        vec![0.0624, 0.9376],
        vec![0.9350, 0.0650],
        vec![0.2353, 0.7647],
    ])
    .unwrap()
}

pub fn we62() -> Channel {
    Channel::new(vec![
        vec![0.0729, 0.9271],
        vec![0.7264, 0.2736],
        vec![0.3662, 0.6338],
        vec![0.4643, 0.5357],
    ])
    .unwrap()
}

/// Product input of the binary example; `v1_is_y` puts Y in the V1 role.
pub fn input62(v1_is_y: bool) -> FactoredInput {
    let mac = WiretapMAC::from_marginals(2, 2, &wb62(), &we62()).unwrap();
    let p = FactoredInput::product(
        mac,
        &Dist::bernoulli(0.6933).unwrap(),
        &Dist::bernoulli(0.3151).unwrap(),
    )
    .unwrap();
    if v1_is_y {
        p.swap_roles()
    } else {
        p
    }
}

pub fn arb_dist(k: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.01f64..1.0, k).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    })
}

pub fn arb_channel(rows: usize, cols: usize) -> impl Strategy<Value = Channel> {
    proptest::collection::vec(arb_dist(cols), rows).prop_map(|r| Channel::from_arith(r).unwrap())
}

/// Random member of Π over a binary-input channel with binary outputs.
pub fn arb_input() -> impl Strategy<Value = FactoredInput> {
    (
        arb_dist(2),
        arb_channel(2, 2),
        arb_channel(2, 2),
        arb_channel(2, 2),
        arb_channel(2, 2),
        arb_channel(4, 2),
        arb_channel(4, 2),
    )
        .prop_map(|(pu, v1, v2, x, y, wb, we)| {
            let mac = WiretapMAC::from_marginals(2, 2, &wb, &we).unwrap();
            FactoredInput::new(Dist::from_arith(pu).unwrap(), v1, v2, x, y, mac).unwrap()
        })
}
