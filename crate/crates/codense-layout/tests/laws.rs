//! Exhaustive repetition-code laws and layout partition checks, plus the
//! dual-route density comparison: the closed-form windowed density must agree
//! bit for bit with a brute-force count over a materialized prefix.

use codense_core::{window_density, FiniteBitSet, Rational};
use codense_layout::{
    layout_rows, mod_rep, mod_rep_inv, window_density_row_local, LayoutSchedule, RowSpec, Scale,
    SymbolicSet,
};
use num::bigint::{BigInt, BigUint};
use num::One;
use proptest::prelude::*;

fn all_strings(len: usize) -> impl Iterator<Item = FiniteBitSet> {
    (0u64..(1 << len))
        .map(move |v| FiniteBitSet::from_ones(len, (0..len).filter(move |&k| v >> k & 1 == 1)))
}

#[test]
fn rep_code_laws_exhaustive() {
    for r in 0u32..=3 {
        let copies = 1usize << r;
        let half = copies / 2;
        for len in 1usize..=6 {
            let coded: Vec<(FiniteBitSet, FiniteBitSet)> = all_strings(len)
                .map(|s| {
                    let c = mod_rep(&s, r).unwrap();
                    (s, c)
                })
                .collect();

            for (sigma, code) in &coded {
                // Cardinality scaling and the round trip.
                assert_eq!(code.card(), copies * sigma.card());
                assert_eq!(&mod_rep_inv(code, r).unwrap(), sigma);

                // Symmetric-difference homomorphism.
                for (tau, tau_code) in &coded {
                    let lhs = code.symdiff(tau_code);
                    let rhs = mod_rep(&sigma.symdiff(tau), r).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }

            // Majority-count laws over arbitrary received words. Decoded
            // positions each consume a strict majority of votes, so nonempty
            // received words strictly dominate the decoded cardinality; the
            // empty word decodes to the empty string. The received space is
            // enumerated fully while it fits 2^16 and densely sampled beyond.
            let chi_bits = len * copies;
            let chis: Vec<FiniteBitSet> = if chi_bits <= 16 {
                all_strings(chi_bits).collect()
            } else {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                    (len as u64) << 8 | r as u64,
                );
                (0..4096)
                    .map(|_| {
                        FiniteBitSet::from_bools(
                            &(0..chi_bits).map(|_| rng.gen()).collect::<Vec<bool>>(),
                        )
                    })
                    .collect()
            };
            for chi in &chis {
                let dec = mod_rep_inv(chi, r).unwrap();
                if chi.card() == 0 {
                    assert_eq!(dec.card(), 0);
                } else {
                    assert!(chi.card() > half * dec.card());
                }

                for (sigma, code) in &coded {
                    let lhs = half * sigma.symdiff(&dec).card();
                    let rhs = code.symdiff(chi).card();
                    assert!(lhs <= rhs);
                }
            }
        }
    }
}

#[test]
fn intervals_partition_prefix() {
    let sched = LayoutSchedule::Custom(vec![
        RowSpec { n: 1, b: 1 },
        RowSpec { n: 0, b: 2 },
    ]);
    let rows = layout_rows(&sched, 2).unwrap();
    let top = u64::try_from(rows[1].l_hi.exact().unwrap()).unwrap();
    for x in 0..top {
        let mut homes = 0;
        for row in &rows {
            let prev = u64::try_from(row.l_prev.exact().unwrap()).unwrap();
            let lo = u64::try_from(row.l_lo.exact().unwrap()).unwrap();
            let hi = u64::try_from(row.l_hi.exact().unwrap()).unwrap();
            if (prev..lo).contains(&x) {
                homes += 1;
            }
            if (lo..hi).contains(&x) {
                homes += 1;
            }
        }
        assert_eq!(homes, 1, "position {x}");
    }
}

/// Materializes the prefix [0, l_hi) of an assembled set, small rows only.
fn materialize(x: &SymbolicSet) -> FiniteBitSet {
    let top = x.rows().last().map_or(0, |r| {
        usize::try_from(r.l_hi.exact().expect("small row")).expect("small row")
    });
    let mut out = FiniteBitSet::zeros(top);
    for (row, payload) in x.rows().iter().zip(x.payloads()) {
        let lo = usize::try_from(row.l_lo.exact().unwrap()).unwrap();
        let hi = usize::try_from(row.l_hi.exact().unwrap()).unwrap();
        for p in lo..hi {
            if payload.get((p - lo) % row.width()) {
                out.set(p, true);
            }
        }
    }
    out
}

fn payload_strategy(n: u32) -> impl Strategy<Value = FiniteBitSet> {
    prop::collection::vec(any::<bool>(), 1usize << n..=1usize << n)
        .prop_map(|v| FiniteBitSet::from_bools(&v))
}

fn sandwich_bounds(payload: &FiniteBitSet, n: u32, b: u32) -> (Rational, Rational) {
    let mid = Rational::new(BigInt::from(payload.card()), BigInt::from(1u64 << n));
    let slack = Rational::new(BigInt::one(), BigInt::from(1u64 << b));
    (mid.clone() - slack.clone(), mid + slack)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Closed form equals brute force on a materialized one-row layout, and
    // the density sandwich holds strictly.
    #[test]
    fn one_row_closed_form_matches_brute_force(
        n in 0u32..=3,
        b in 1u32..=6,
        seed in any::<u64>(),
    ) {
        let payload = {
            let w = 1usize << n;
            FiniteBitSet::from_ones(w, (0..w).filter(|&i| seed >> i & 1 == 1))
        };
        let sched = LayoutSchedule::Custom(vec![RowSpec { n, b }]);
        let x = SymbolicSet::assemble(vec![payload.clone()], &sched).unwrap();
        let closed = x.window_density_row(0).unwrap();

        let bits = materialize(&x);
        let lo = usize::try_from(x.rows()[0].l_lo.exact().unwrap()).unwrap();
        let brute = window_density(&bits, lo, bits.len() - 1).unwrap();
        prop_assert_eq!(&closed, &brute);

        let (below, above) = sandwich_bounds(&payload, n, b);
        prop_assert!(below < closed && closed < above);
    }

    // Two-row layouts: the second row's density sees the first row's content
    // only through the count below l_prev. Checked against brute force when
    // the whole prefix is materializable.
    #[test]
    fn two_row_sandwich_and_brute_force(
        n1 in 0u32..=3,
        b1 in 1u32..=5,
        payload0 in payload_strategy(0),
        seed in any::<u64>(),
    ) {
        prop_assume!(2 * n1 + 2 * b1 <= 16);
        let payload1 = {
            let w = 1usize << n1;
            FiniteBitSet::from_ones(w, (0..w).filter(|&i| seed >> i & 1 == 1))
        };
        let sched = LayoutSchedule::Custom(vec![
            RowSpec { n: 0, b: 1 },
            RowSpec { n: n1, b: b1 },
        ]);
        let x = SymbolicSet::assemble(vec![payload0.clone(), payload1.clone()], &sched).unwrap();

        for i in 0..2 {
            let closed = x.window_density_row(i).unwrap();
            let payload = &x.payloads()[i];
            let row = &x.rows()[i];
            let (below, above) = sandwich_bounds(payload, row.n, row.b);
            prop_assert!(below < closed && closed < above, "row {i}: {closed}");
        }

        let bits = materialize(&x);
        for i in 0..2 {
            let row = &x.rows()[i];
            let lo = usize::try_from(row.l_lo.exact().unwrap()).unwrap();
            let hi = usize::try_from(row.l_hi.exact().unwrap()).unwrap();
            let brute = window_density(&bits, lo, hi - 1).unwrap();
            prop_assert_eq!(x.window_density_row(i).unwrap(), brute);
        }
    }

    // Row-local density with the preceding boundary as a free parameter: the
    // sandwich is a row-local fact, whatever sits below l_prev.
    #[test]
    fn row_local_sandwich_parametric(
        n in 0u32..=3,
        b in 1u32..=6,
        l_prev in 0u64..=(1 << 20),
        base_frac in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let payload = {
            let w = 1usize << n;
            FiniteBitSet::from_ones(w, (0..w).filter(|&i| seed >> i & 1 == 1))
        };
        let row = codense_layout::layout_row_local(
            7, n, 0, b, Scale::Exact(BigUint::from(l_prev)),
        ).unwrap();
        let base = BigUint::from((l_prev as f64 * base_frac) as u64);
        let d = window_density_row_local(&row, &payload, &base).unwrap();
        let (below, above) = sandwich_bounds(&payload, n, b);
        prop_assert!(below < d && d < above, "density {d}");
    }

    // Bit queries agree with the materialized vector.
    #[test]
    fn query_matches_materialized(
        n0 in 0u32..=2,
        b0 in 1u32..=3,
        seed in any::<u64>(),
    ) {
        let w = 1usize << n0;
        let payload = FiniteBitSet::from_ones(w, (0..w).filter(|&i| seed >> i & 1 == 1));
        let sched = LayoutSchedule::Custom(vec![RowSpec { n: n0, b: b0 }]);
        let x = SymbolicSet::assemble(vec![payload], &sched).unwrap();
        let bits = materialize(&x);
        for p in 0..bits.len() {
            prop_assert_eq!(x.query_bit(&BigUint::from(p)).unwrap(), bits.get(p));
        }
    }
}

#[test]
fn row_local_handles_giant_previous_boundary() {
    // l_prev at the cap of the parametric test range, full payload.
    let row = codense_layout::layout_row_local(
        0,
        2,
        0,
        3,
        Scale::Exact(BigUint::from(1u64 << 20)),
    )
    .unwrap();
    assert!(row.l_lo.exact().unwrap().bits() > (1 << 20));
    let payload: FiniteBitSet = "1111".parse().unwrap();
    let base = BigUint::from(1u64 << 20);
    let d = window_density_row_local(&row, &payload, &base).unwrap();
    let (below, above) = sandwich_bounds(&payload, 2, 3);
    assert!(below < d && d < above);
}
