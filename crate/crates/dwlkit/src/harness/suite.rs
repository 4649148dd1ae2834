use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dwl::{
    dwl_distinguish_with, dwl_refine_joint, dwl_refine_with, dygnn_sim, pair_dygnn_sim, refines,
    same_partition, ColorId, ColorTable, InitLabeling, MessageFormat, PairSimMode, RefineOptions,
    SimOptions,
};
use crate::error::Result;
use crate::temporal::{
    brute_force_isomorphic_until, brute_force_pair_isomorphic_until, to_edge_list, DynamicGraph,
    Event,
};

use super::generate::random_dynamic_graph;

/// Configuration of the expressiveness property suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Random graph-pair trials for the containment/soundness/refinement/
    /// equality properties.
    pub trials: usize,
    pub seed: u64,
    /// Node cap for random instances (the exhaustive oracle is factorial).
    pub max_nodes: usize,
    /// Event cap for random instances.
    pub max_events: usize,
    /// Randomized constructions examined by the separation search.
    pub searches: usize,
    /// Deliberate defect injected into the order-2 refinement, used to
    /// demonstrate that the suite notices a broken test. Leave `None` for
    /// faithful runs.
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 1000,
            seed: 0,
            max_nodes: 6,
            max_events: 10,
            searches: 25,
            mutation: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mutation {
    /// Drop the interaction timelines from the order-2 aggregation.
    DropPairHistories,
}

/// A replayable pair of graphs exhibiting a property violation (or, for the
/// search property, the verified separation instance).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Counterexample {
    /// Edge-list serialization of the first graph.
    pub graph_a: String,
    /// Edge-list serialization of the second graph.
    pub graph_b: String,
    pub t: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}

/// Deterministic report of one suite run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

/// The six-node two-wedge construction with mirrored timestamps: a-b at t1
/// and b-c at t2 on one side, f-e at t1 and e-d at t2 on the other. Nodes
/// 0..6 are a, b, c, d, e, f. Node refinement cannot split c from d, while
/// pair refinement separates (a,c) from (a,d) at any query time after t2.
pub fn mirrored_wedges_at(t1: f64, t2: f64) -> DynamicGraph {
    DynamicGraph::from_events(
        6,
        vec![
            Event::new(0, 1, t1),
            Event::new(1, 2, t2),
            Event::new(5, 4, t1),
            Event::new(4, 3, t2),
        ],
    )
    .expect("valid construction")
}

/// [`mirrored_wedges_at`] with t1=1, t2=2; query it at t=4.
pub fn mirrored_wedges() -> DynamicGraph {
    mirrored_wedges_at(1.0, 2.0)
}

struct PropertyState {
    trials: usize,
    violations: usize,
    counterexample: Option<Counterexample>,
}

impl PropertyState {
    fn new() -> Self {
        PropertyState { trials: 0, violations: 0, counterexample: None }
    }

    fn record(&mut self, violated: bool, example: impl FnOnce() -> Counterexample) {
        self.trials += 1;
        if violated {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(example());
            }
        }
    }

    fn finish(self, name: &str) -> PropertyResult {
        PropertyResult {
            name: name.to_string(),
            trials: self.trials,
            violations: self.violations,
            passed: self.violations == 0,
            counterexample: self.counterexample,
        }
    }
}

fn union_colors(
    a: &crate::dwl::Coloring,
    b: &crate::dwl::Coloring,
    round: usize,
) -> Vec<ColorId> {
    a.colors_at(round).iter().chain(b.colors_at(round)).copied().collect()
}

/// Runs the executable expressiveness properties and assembles a
/// deterministic report:
///
/// 1. `hierarchy_containment` — whenever the order-1 test refutes a random
///    pair, the order-2 test refutes it too (constant init).
/// 2. `oracle_soundness` — neither test ever refutes a pair the exhaustive
///    oracle proves isomorphic until t.
/// 3. `node_sim_bounded_by_refinement` — the symbolic node simulator never
///    splits entities the order-1 refinement keeps equal, for both message
///    formats.
/// 4. `pair_sim_matches_order2` — the global symbolic pair simulator induces
///    exactly the order-2 partitions, round by round.
/// 5. `mirrored_wedge_separation` — the fixed two-wedge construction behaves
///    as proven: node refinement collides, pair refinement separates by
///    round 1, the oracle confirms non-isomorphism, and only the
///    MITE-augmented simulator separates the target pairs.
/// 6. `mite_counterexample_search` — randomized constructions where the
///    vanilla simulator provably collides on non-isomorphic target pairs
///    that the MITE-augmented simulator separates, each instance verified
///    by the exhaustive oracle.
pub fn expressiveness_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let mut hierarchy = PropertyState::new();
    let mut soundness = PropertyState::new();
    let mut sim_bound = PropertyState::new();
    let mut pair_equality = PropertyState::new();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let constant = RefineOptions::with_init(InitLabeling::Constant);
    let mut pair_opts = RefineOptions::with_init(InitLabeling::FromFeatures);
    if config.mutation == Some(Mutation::DropPairHistories) {
        pair_opts.include_histories = false;
    }

    for _ in 0..config.trials {
        let n = rng.random_range(2..=config.max_nodes);
        let ma = rng.random_range(0..=config.max_events);
        let mb = rng.random_range(0..=config.max_events);
        let seed_a = rng.random::<u64>();
        let seed_b = rng.random::<u64>();
        let ga = random_dynamic_graph(n, ma, 100.0, seed_a);
        let gb = random_dynamic_graph(n, mb, 100.0, seed_b);
        let t = rng.random_range(1..=100u64) as f64;
        let rounds = 8;
        let example = |detail: &str| {
            let detail = detail.to_string();
            let (ga, gb) = (to_edge_list(&ga), to_edge_list(&gb));
            move || Counterexample { graph_a: ga, graph_b: gb, t, detail }
        };

        // (1) Refutation containment across test orders.
        let v1 = dwl_distinguish_with(&ga, &gb, t, 1, constant, rounds)?;
        let v2 = dwl_distinguish_with(&ga, &gb, t, 2, constant, rounds)?;
        hierarchy.record(
            v1.refuted() && !v2.refuted(),
            example(&format!("order-1 refuted ({v1:?}) but order-2 did not ({v2:?})")),
        );

        // (2) No false refutation of oracle-isomorphic pairs.
        let iso = brute_force_isomorphic_until(&ga, &gb, t, config.max_nodes.max(8))?;
        soundness.record(
            iso.isomorphic && (v1.refuted() || v2.refuted()),
            example("oracle found a witness but a refinement test refuted"),
        );

        // (3) The injective-hash simulator is bounded by order-1 refinement.
        let mut sim_violated = false;
        'outer: for g in [&ga, &gb] {
            let mut table = ColorTable::new();
            let dwl = dwl_refine_with(
                g,
                t,
                1,
                RefineOptions::with_init(InitLabeling::FromFeatures),
                rounds,
                &mut table,
            )?;
            for message in [MessageFormat::PerEventInterval, MessageFormat::PairHistory] {
                let mut sim_table = ColorTable::new();
                let sim = dygnn_sim(
                    g,
                    t,
                    SimOptions { rounds, message, mite_target: None },
                    &mut sim_table,
                )?;
                for round in 0..=rounds {
                    if !refines(dwl.colors_at(round), sim.colors_at(round)) {
                        sim_violated = true;
                        break 'outer;
                    }
                }
            }
        }
        sim_bound.record(sim_violated, example("node simulator split a refinement class"));

        // (4) Global pair simulator matches order-2 refinement exactly.
        let mut ref_table = ColorTable::new();
        let two_dwl = dwl_refine_joint(&[&ga, &gb], t, 2, pair_opts, rounds, &mut ref_table)?;
        let mut sim_table = ColorTable::new();
        let sim_a = pair_dygnn_sim(&ga, t, rounds, PairSimMode::Global, &mut sim_table)?;
        let sim_b = pair_dygnn_sim(&gb, t, rounds, PairSimMode::Global, &mut sim_table)?;
        let mut equality_violated = false;
        for round in 0..=rounds {
            let ref_union = union_colors(&two_dwl[0], &two_dwl[1], round);
            let sim_union = union_colors(&sim_a, &sim_b, round);
            if !same_partition(&ref_union, &sim_union) {
                equality_violated = true;
                break;
            }
        }
        pair_equality.record(
            equality_violated,
            example("pair simulator and order-2 refinement disagree"),
        );
    }

    let separation = mirrored_wedge_property()?;
    let search = counterexample_search(config)?;

    Ok(SuiteReport {
        seed: config.seed,
        trials: config.trials,
        properties: vec![
            hierarchy.finish("hierarchy_containment"),
            soundness.finish("oracle_soundness"),
            sim_bound.finish("node_sim_bounded_by_refinement"),
            pair_equality.finish("pair_sim_matches_order2"),
            separation,
            search,
        ],
    })
}

/// Exact checks on the fixed mirrored-wedge construction at t=4.
fn mirrored_wedge_property() -> Result<PropertyResult> {
    let g = mirrored_wedges();
    let t = 4.0;
    let (a, c, d) = (0usize, 2usize, 3usize);
    let mut failures = Vec::new();

    let mut table = ColorTable::new();
    let node = dwl_refine_with(
        &g,
        t,
        1,
        RefineOptions::with_init(InitLabeling::Constant),
        12,
        &mut table,
    )?;
    for round in 0..=node.rounds_run() {
        if node.node_color(round, c) != node.node_color(round, d) {
            failures.push(format!("node refinement split c/d at round {round}"));
        }
    }

    let mut table = ColorTable::new();
    let pair = dwl_refine_with(
        &g,
        t,
        2,
        RefineOptions::with_init(InitLabeling::Constant),
        12,
        &mut table,
    )?;
    if pair.pair_color(1, a, c) == pair.pair_color(1, a, d) {
        failures.push("pair refinement failed to separate (a,c)/(a,d) at round 1".to_string());
    }

    let oracle = brute_force_pair_isomorphic_until(&g, (a, c), &g, (a, d), t, 8)?;
    if oracle.isomorphic {
        failures.push("oracle found the target pairs isomorphic".to_string());
    }

    let mut table = ColorTable::new();
    let vanilla = dygnn_sim(&g, t, SimOptions::vanilla(6), &mut table)?;
    let collide = (0..=vanilla.rounds_run()).all(|r| {
        (vanilla.node_color(r, a), vanilla.node_color(r, c))
            == (vanilla.node_color(r, a), vanilla.node_color(r, d))
    });
    if !collide {
        failures.push("vanilla simulator separated the target pairs".to_string());
    }

    let mut table = ColorTable::new();
    let run_ac = dygnn_sim(&g, t, SimOptions::with_mite(2, (a, c), 4), &mut table)?;
    let run_ad = dygnn_sim(&g, t, SimOptions::with_mite(2, (a, d), 4), &mut table)?;
    let emb_ac = (run_ac.node_color(2, a), run_ac.node_color(2, c));
    let emb_ad = (run_ad.node_color(2, a), run_ad.node_color(2, d));
    if emb_ac == emb_ad {
        failures.push("mite-augmented simulator failed to separate".to_string());
    }

    let passed = failures.is_empty();
    Ok(PropertyResult {
        name: "mirrored_wedge_separation".to_string(),
        trials: 1,
        violations: failures.len(),
        passed,
        counterexample: if passed {
            None
        } else {
            Some(Counterexample {
                graph_a: to_edge_list(&g),
                graph_b: to_edge_list(&g),
                t,
                detail: failures.join("; "),
            })
        },
    })
}

/// Randomized search for separation instances: mirrored two-wedge
/// constructions with random timestamps under random relabelings, compared
/// across two graph copies. Every candidate is verified three ways — the
/// vanilla simulator collides, the MITE-augmented simulator separates, and
/// the exhaustive oracle certifies the target pairs non-isomorphic. The
/// property passes when at least one verified instance is found, and its
/// payload carries the first one.
fn counterexample_search(config: &SuiteConfig) -> Result<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let mut found: Option<Counterexample> = None;
    let mut verified = 0usize;
    for _ in 0..config.searches {
        let t1 = rng.random_range(1..512) as f64 / 4.0;
        let t2 = t1 + rng.random_range(1..256) as f64 / 4.0;
        let t = t2 + rng.random_range(1..256) as f64 / 4.0;
        let ga = mirrored_wedges_at(t1, t2);
        let mut perm: Vec<usize> = (0..6).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let gb = ga.relabeled(&perm)?;
        // Target pairs: (a, c) in the first graph against the image of
        // (a, d) in the relabeled one.
        let s_a = (0usize, 2usize);
        let s_b = (perm[0], perm[3]);

        let mut table = ColorTable::new();
        let vanilla_a = dygnn_sim(&ga, t, SimOptions::vanilla(4), &mut table)?;
        let vanilla_b = dygnn_sim(&gb, t, SimOptions::vanilla(4), &mut table)?;
        let vanilla_collides = vanilla_a.node_color(4, s_a.0) == vanilla_b.node_color(4, s_b.0)
            && vanilla_a.node_color(4, s_a.1) == vanilla_b.node_color(4, s_b.1);

        let mut table = ColorTable::new();
        let mite_a = dygnn_sim(&ga, t, SimOptions::with_mite(2, s_a, 4), &mut table)?;
        let mite_b = dygnn_sim(&gb, t, SimOptions::with_mite(2, s_b, 4), &mut table)?;
        let mite_separates = (mite_a.node_color(2, s_a.0), mite_a.node_color(2, s_a.1))
            != (mite_b.node_color(2, s_b.0), mite_b.node_color(2, s_b.1));

        let oracle = brute_force_pair_isomorphic_until(&ga, s_a, &gb, s_b, t, 8)?;

        if vanilla_collides && mite_separates && !oracle.isomorphic {
            verified += 1;
            if found.is_none() {
                found = Some(Counterexample {
                    graph_a: to_edge_list(&ga),
                    graph_b: to_edge_list(&gb),
                    t,
                    detail: format!(
                        "target pairs ({},{}) vs ({},{}): vanilla collides, mite separates, \
                         oracle refutes isomorphism",
                        s_a.0, s_a.1, s_b.0, s_b.1
                    ),
                });
            }
        }
    }
    Ok(PropertyResult {
        name: "mite_counterexample_search".to_string(),
        trials: config.searches,
        violations: config.searches - verified,
        passed: verified >= 1,
        counterexample: found,
    })
}
