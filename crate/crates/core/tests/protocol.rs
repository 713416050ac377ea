// SPDX-License-Identifier: Apache-2.0

//! End-to-end protocol runs over a shared bulletin board, honest and
//! adversarial, driven phase by phase.

use std::collections::BTreeSet;

use dkg_core::bulletin::{Bulletin, Phase, Verdict};
use dkg_core::group_math::{G1Point, NodeIndex, Scalar};
use dkg_core::node::{DkgConfig, NodeState, ShareStatus};
use dkg_core::vss::lagrange_reconstruct;

const ZERO_HASH: [u8; 32] = [0u8; 32];

/// What each node does during the run.
#[derive(Clone, Copy, PartialEq)]
enum Role {
    Honest,
    BadShare { target: NodeIndex },
    NoDistribute,
    FalseDispute { target: NodeIndex },
}

struct Run {
    bulletin: Bulletin,
    nodes: Vec<NodeState>,
}

fn run_protocol(n: u16, t: usize, seed: u64, roles: &[(NodeIndex, Role)]) -> Run {
    let role_of = |index: NodeIndex| {
        roles
            .iter()
            .find(|(node, _)| *node == index)
            .map(|(_, role)| *role)
            .unwrap_or(Role::Honest)
    };

    let config = DkgConfig::new(n, t, seed).unwrap();
    let mut bulletin = Bulletin::new(n, t).unwrap();
    let mut nodes: Vec<NodeState> = (1..=n)
        .map(|i| NodeState::new(i, config).unwrap())
        .collect();

    for node in &mut nodes {
        node.phase_register(&mut bulletin).unwrap();
    }
    bulletin.advance_phase().unwrap();

    for node in &mut nodes {
        match role_of(node.index()) {
            Role::NoDistribute => {}
            Role::BadShare { target } => {
                node.phase_distribute_with(&mut bulletin, |receiver, value| {
                    if receiver == target {
                        value + Scalar::one()
                    } else {
                        value
                    }
                })
                .unwrap();
            }
            _ => {
                node.phase_distribute(&mut bulletin).unwrap();
            }
        }
    }
    bulletin.advance_phase().unwrap();

    for node in &mut nodes {
        node.phase_load_shares(&bulletin).unwrap();
    }
    for node in &mut nodes {
        match role_of(node.index()) {
            Role::FalseDispute { target } => {
                node.phase_submit_disputes_with(&mut bulletin, &[target])
                    .unwrap();
            }
            _ => {
                node.phase_submit_disputes(&mut bulletin).unwrap();
            }
        }
    }
    bulletin.advance_phase().unwrap();

    for node in &mut nodes {
        node.phase_load_disputes(&bulletin).unwrap();
    }
    for node in &mut nodes {
        if !bulletin.expelled().contains(&node.index()) {
            node.derive_key_share(&bulletin).unwrap();
        }
    }
    bulletin.advance_phase().unwrap();
    assert_eq!(bulletin.phase(), Phase::Finished);

    Run { bulletin, nodes }
}

/// Master key must equal the generator times the sum of qualified secrets
/// (white-box oracle), and any t+1 key shares must reconstruct it.
fn assert_key_consistency(run: &Run, t: usize) {
    let qualified = run.bulletin.qualified_set().unwrap();
    let master = run.bulletin.master_public_key().unwrap();

    let secret_sum = run
        .nodes
        .iter()
        .filter(|node| qualified.contains(&node.index()))
        .fold(Scalar::zero(), |acc, node| {
            acc + node.polynomial().expect("qualified nodes dealt").secret()
        });
    assert_eq!(master, G1Point::generator().mul_scalar(&secret_sum));

    let holders: Vec<(NodeIndex, Scalar)> = run
        .nodes
        .iter()
        .filter_map(|node| node.key_share().map(|share| (node.index(), share)))
        .collect();
    assert!(holders.len() > t, "not enough key shares to reconstruct");

    // every (t+1)-subset reconstructs the same group secret
    let mut chosen = vec![false; holders.len()];
    subsets(
        &holders,
        t + 1,
        0,
        &mut Vec::new(),
        &mut chosen,
        &mut |subset| {
            let secret = lagrange_reconstruct(subset).unwrap();
            assert_eq!(G1Point::generator().mul_scalar(&secret), master);
            assert_eq!(secret, secret_sum);
        },
    );
}

fn subsets(
    points: &[(NodeIndex, Scalar)],
    want: usize,
    start: usize,
    current: &mut Vec<(NodeIndex, Scalar)>,
    chosen: &mut [bool],
    visit: &mut impl FnMut(&[(NodeIndex, Scalar)]),
) {
    if current.len() == want {
        visit(current);
        return;
    }
    for i in start..points.len() {
        current.push(points[i]);
        chosen[i] = true;
        subsets(points, want, i + 1, current, chosen, visit);
        chosen[i] = false;
        current.pop();
    }
}

#[test]
fn honest_run_reaches_full_agreement() {
    let run = run_protocol(4, 2, 1, &[]);
    let qualified = run.bulletin.qualified_set().unwrap();
    assert_eq!(qualified, (1..=4).collect::<BTreeSet<_>>());
    assert!(run.bulletin.dispute_log().is_empty());

    for node in &run.nodes {
        for (issuer, record) in node.decrypted() {
            assert_eq!(
                record.status,
                ShareStatus::Valid,
                "issuer {issuer} at node {}",
                node.index()
            );
        }
        assert!(node.disputed_nodes().is_empty());
    }
    assert_key_consistency(&run, 2);
}

#[test]
fn corrupted_share_is_detected_disputed_and_punished() {
    let run = run_protocol(4, 2, 7, &[(3, Role::BadShare { target: 2 })]);

    // receiver 2 flagged exactly issuer 3
    let victim = &run.nodes[1];
    assert_eq!(victim.decrypted()[&3].status, ShareStatus::Invalid);
    for issuer in [1u16, 2, 4] {
        assert_eq!(victim.decrypted()[&issuer].status, ShareStatus::Valid);
    }

    // one dispute, issuer expelled, hash zeroed
    assert_eq!(run.bulletin.dispute_log().len(), 1);
    let event = &run.bulletin.dispute_log()[0];
    assert_eq!((event.disputer, event.issuer), (2, 3));
    assert_eq!(event.verdict, Verdict::IssuerExpelled);
    assert_eq!(run.bulletin.share_distribution_hash(3).unwrap(), ZERO_HASH);

    let qualified = run.bulletin.qualified_set().unwrap();
    assert_eq!(qualified, [1u16, 2, 4].into_iter().collect::<BTreeSet<_>>());

    // every node reviewed the dispute, agreed, and flagged the issuer
    for node in &run.nodes {
        assert_eq!(node.dispute_reviews().len(), 1);
        assert!(node.dispute_reviews()[0].agrees());
        assert!(node.disputed_nodes().contains(&3));
    }
    assert_key_consistency(&run, 2);
}

#[test]
fn false_dispute_expels_the_disputer_only() {
    let run = run_protocol(4, 2, 11, &[(2, Role::FalseDispute { target: 1 })]);

    assert_eq!(run.bulletin.dispute_log().len(), 1);
    let event = &run.bulletin.dispute_log()[0];
    assert_eq!((event.disputer, event.issuer), (2, 1));
    assert_eq!(event.verdict, Verdict::DisputerExpelled);

    // the falsely accused issuer keeps its distribution
    assert_ne!(run.bulletin.share_distribution_hash(1).unwrap(), ZERO_HASH);
    let qualified = run.bulletin.qualified_set().unwrap();
    assert_eq!(qualified, [1u16, 3, 4].into_iter().collect::<BTreeSet<_>>());

    for node in &run.nodes {
        assert!(node.dispute_reviews()[0].agrees());
        assert!(node.disputed_nodes().is_empty());
    }
    assert_key_consistency(&run, 2);
}

#[test]
fn silent_node_is_disqualified_without_a_dispute() {
    let run = run_protocol(4, 2, 13, &[(4, Role::NoDistribute)]);

    assert!(run.bulletin.dispute_log().is_empty());
    let qualified = run.bulletin.qualified_set().unwrap();
    assert_eq!(qualified, [1u16, 2, 3].into_iter().collect::<BTreeSet<_>>());

    for node in &run.nodes {
        if node.index() == 4 {
            continue;
        }
        let record = node.decrypted()[&4];
        assert_eq!(record.status, ShareStatus::Invalid);
        assert_eq!(record.value, None);
    }
    // the silent node still derives a share of the joint polynomial
    assert!(run.nodes[3].key_share().is_some());
    assert_key_consistency(&run, 2);
}

#[test]
fn runs_are_deterministic_per_seed() {
    let a = run_protocol(5, 2, 99, &[(3, Role::BadShare { target: 1 })]);
    let b = run_protocol(5, 2, 99, &[(3, Role::BadShare { target: 1 })]);

    assert_eq!(a.bulletin.read_events(0), b.bulletin.read_events(0));
    assert_eq!(
        a.bulletin.master_public_key().unwrap(),
        b.bulletin.master_public_key().unwrap()
    );
    for (na, nb) in a.nodes.iter().zip(&b.nodes) {
        assert_eq!(na.key_share(), nb.key_share());
        assert_eq!(na.decrypted(), nb.decrypted());
    }

    let c = run_protocol(5, 2, 100, &[(3, Role::BadShare { target: 1 })]);
    assert_ne!(
        a.bulletin.master_public_key().unwrap(),
        c.bulletin.master_public_key().unwrap()
    );
}

#[test]
fn verdict_agreement_across_mixed_disputes() {
    // two simultaneous adversaries: a corrupt dealer and a false disputer
    let run = run_protocol(
        5,
        2,
        42,
        &[
            (2, Role::BadShare { target: 5 }),
            (4, Role::FalseDispute { target: 1 }),
        ],
    );

    let verdicts: Vec<Verdict> = run
        .bulletin
        .dispute_log()
        .iter()
        .map(|e| e.verdict)
        .collect();
    assert!(verdicts.contains(&Verdict::IssuerExpelled));
    assert!(verdicts.contains(&Verdict::DisputerExpelled));

    for node in &run.nodes {
        assert_eq!(
            node.dispute_reviews().len(),
            run.bulletin.dispute_log().len()
        );
        for review in node.dispute_reviews() {
            assert!(
                review.agrees(),
                "node {} disagrees at tx {}",
                node.index(),
                review.tx_index
            );
        }
    }

    let qualified = run.bulletin.qualified_set().unwrap();
    assert_eq!(qualified, [1u16, 3, 5].into_iter().collect::<BTreeSet<_>>());
    assert_key_consistency(&run, 2);
}

#[test]
fn larger_honest_runs_stay_consistent() {
    for (n, t, seed) in [(3u16, 1usize, 5u64), (6, 3, 6), (8, 4, 8)] {
        let run = run_protocol(n, t, seed, &[]);
        assert_eq!(run.bulletin.qualified_set().unwrap().len(), usize::from(n));
        assert_key_consistency(&run, t);
    }
}

#[test]
fn single_dealer_run_keys_off_one_secret() {
    // only node 1 distributes; everyone still derives an evaluation of f_1
    let silent: Vec<(NodeIndex, Role)> = (2..=4).map(|i| (i, Role::NoDistribute)).collect();
    let run = run_protocol(4, 2, 17, &silent);

    let qualified = run.bulletin.qualified_set().unwrap();
    assert_eq!(qualified.into_iter().collect::<Vec<_>>(), vec![1]);

    let dealer_poly = run.nodes[0].polynomial().unwrap();
    assert_eq!(
        run.bulletin.master_public_key().unwrap(),
        G1Point::generator().mul_scalar(&dealer_poly.secret())
    );
    for node in &run.nodes {
        assert_eq!(
            node.key_share().unwrap(),
            dealer_poly.evaluate(u64::from(node.index()))
        );
    }
    assert_key_consistency(&run, 2);
}

#[test]
fn rejected_dispute_changes_nothing_at_the_nodes() {
    use dkg_core::dleq;
    use dkg_core::node::{DkgConfig, NodeState};
    use dkg_core::share_channel::KeyPair;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    let config = DkgConfig::new(4, 2, 23).unwrap();
    let mut bulletin = Bulletin::new(4, 2).unwrap();
    let mut nodes: Vec<NodeState> = (1..=4)
        .map(|i| NodeState::new(i, config).unwrap())
        .collect();
    for node in &mut nodes {
        node.phase_register(&mut bulletin).unwrap();
    }
    bulletin.advance_phase().unwrap();
    for node in &mut nodes {
        node.phase_distribute(&mut bulletin).unwrap();
    }
    bulletin.advance_phase().unwrap();
    for node in &mut nodes {
        node.phase_load_shares(&bulletin).unwrap();
    }

    // a dispute whose DLEQ statement is garbage: wrong shared key
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    let stray = KeyPair::generate(&mut rng);
    let disputer_pk = bulletin.registration(2).unwrap();
    let proof = dleq::prove(
        &G1Point::generator(),
        &disputer_pk,
        &bulletin.registration(1).unwrap(),
        &stray.public(),
        &stray.secret(),
        &mut rng,
    )
    .unwrap();
    let verdict = bulletin
        .submit_dispute(2, 1, stray.public(), proof)
        .unwrap();
    assert_eq!(verdict, Verdict::Rejected);
    bulletin.advance_phase().unwrap();

    for node in &mut nodes {
        node.phase_load_disputes(&bulletin).unwrap();
        assert!(node.disputed_nodes().is_empty());
        assert_eq!(node.dispute_reviews().len(), 1);
        assert!(node.dispute_reviews()[0].agrees());
    }
    // nobody was expelled, so the full group still qualifies
    assert_eq!(bulletin.qualified_set().unwrap().len(), 4);
}

#[test]
fn issuer_is_expelled_exactly_when_the_logged_share_fails() {
    // randomized soundness: corrupt or don't, the verdict must track it
    for seed in 0..8u64 {
        let corrupt = seed % 2 == 0;
        let roles: Vec<(NodeIndex, Role)> = if corrupt {
            vec![(1, Role::BadShare { target: 3 })]
        } else {
            vec![(1, Role::FalseDispute { target: 3 })]
        };
        // in the honest-share case node 1 files the false dispute itself
        let run = run_protocol(4, 2, 1000 + seed, &roles);
        let event = &run.bulletin.dispute_log()[0];
        if corrupt {
            assert_eq!(event.verdict, Verdict::IssuerExpelled);
            assert_eq!(event.issuer, 1);
        } else {
            assert_eq!(event.verdict, Verdict::DisputerExpelled);
            assert_eq!(event.disputer, 1);
        }
    }
}
