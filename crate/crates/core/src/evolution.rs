//! Neuroevolution of feed-forward policy networks.
//!
//! Genomes are directed acyclic graphs from 13 input nodes to 4 output
//! nodes. Structure grows through NEAT-style mutations (new edges, edges
//! split by new nodes, activation swaps) without crossover or speciation.
//! Fitness is the mean episode reward under greedy (argmax) control.

use std::collections::{HashSet, VecDeque};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::Action;
use crate::env::{EnvConfig, World};
use crate::error::{ErrorKind, Result};
use crate::recording::ColonyRecording;
use crate::sensing::{Observation, OBS_LEN};

pub const N_INPUTS: usize = OBS_LEN;
pub const N_OUTPUTS: usize = 4;
pub const GENOME_FORMAT_VERSION: u32 = 1;
/// Standard deviation of a weight perturbation.
pub const PERTURB_SIGMA: f64 = 0.5;

#[derive(Debug, Error)]
pub enum GenomeError {
    #[error("invalid genome: {0}")]
    Invalid(String),
    #[error("invalid evolution config: {0}")]
    Config(String),
    #[error("cannot access genome file {path}: {message}")]
    File { path: String, message: String },
}

impl GenomeError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            GenomeError::Invalid(_) | GenomeError::File { .. } => ErrorKind::Data,
            GenomeError::Config(_) => ErrorKind::Config,
        }
    }
}

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    Input,
    Hidden,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Tanh,
    Sigmoid,
    Relu,
    Sin,
    Gauss,
}

impl Activation {
    pub const ALL: [Activation; 6] = [
        Activation::Identity,
        Activation::Tanh,
        Activation::Sigmoid,
        Activation::Relu,
        Activation::Sin,
        Activation::Gauss,
    ];

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
            Activation::Relu => x.max(0.0),
            Activation::Sin => x.sin(),
            Activation::Gauss => (-x * x).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeGene {
    pub id: NodeId,
    pub role: NodeRole,
    pub activation: Activation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeGene {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: f64,
    pub enabled: bool,
}

/// On-disk genome layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenomeFile {
    pub format_version: u32,
    pub nodes: Vec<NodeGene>,
    pub edges: Vec<EdgeGene>,
}

/// A validated policy network description.
///
/// The i-th input node in `nodes` order reads observation component i; the
/// j-th output node scores action j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GenomeFile", into = "GenomeFile")]
pub struct Genome {
    nodes: Vec<NodeGene>,
    edges: Vec<EdgeGene>,
}

impl TryFrom<GenomeFile> for Genome {
    type Error = GenomeError;

    fn try_from(file: GenomeFile) -> Result<Self, GenomeError> {
        if file.format_version != GENOME_FORMAT_VERSION {
            return Err(GenomeError::Invalid(format!(
                "unsupported format_version {}",
                file.format_version
            )));
        }
        Genome::new(file.nodes, file.edges)
    }
}

impl From<Genome> for GenomeFile {
    fn from(g: Genome) -> Self {
        GenomeFile {
            format_version: GENOME_FORMAT_VERSION,
            nodes: g.nodes,
            edges: g.edges,
        }
    }
}

impl Genome {
    pub fn new(nodes: Vec<NodeGene>, edges: Vec<EdgeGene>) -> Result<Self, GenomeError> {
        let genome = Self { nodes, edges };
        genome.validate()?;
        Ok(genome)
    }

    /// 13 inputs (ids 0..13) and 4 identity outputs (ids 13..17), no edges.
    pub fn minimal() -> Self {
        let inputs = (0..N_INPUTS as NodeId).map(|id| NodeGene {
            id,
            role: NodeRole::Input,
            activation: Activation::Identity,
        });
        let outputs = (0..N_OUTPUTS as NodeId).map(|j| NodeGene {
            id: N_INPUTS as NodeId + j,
            role: NodeRole::Output,
            activation: Activation::Identity,
        });
        Self {
            nodes: inputs.chain(outputs).collect(),
            edges: Vec::new(),
        }
    }

    /// Every input wired to every output with standard-normal weights.
    pub fn dense<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut g = Self::minimal();
        for i in 0..N_INPUTS as NodeId {
            for j in 0..N_OUTPUTS as NodeId {
                g.edges.push(EdgeGene {
                    src: i,
                    dst: N_INPUTS as NodeId + j,
                    weight: rng.sample(StandardNormal),
                    enabled: true,
                });
            }
        }
        g
    }

    pub fn nodes(&self) -> &[NodeGene] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeGene] {
        &self.edges
    }

    pub fn hidden_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.role == NodeRole::Hidden)
            .count()
    }

    fn position(&self, id: NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn validate(&self) -> Result<(), GenomeError> {
        let bad = |m: String| Err(GenomeError::Invalid(m));
        let count = |role| self.nodes.iter().filter(|n| n.role == role).count();
        if count(NodeRole::Input) != N_INPUTS {
            return bad(format!(
                "expected {N_INPUTS} input nodes, found {}",
                count(NodeRole::Input)
            ));
        }
        if count(NodeRole::Output) != N_OUTPUTS {
            return bad(format!(
                "expected {N_OUTPUTS} output nodes, found {}",
                count(NodeRole::Output)
            ));
        }
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id) {
                return bad(format!("duplicate node id {}", n.id));
            }
        }
        let mut pairs = HashSet::new();
        for e in &self.edges {
            let (Some(s), Some(d)) = (self.position(e.src), self.position(e.dst)) else {
                return bad(format!(
                    "edge {}->{} references a missing node",
                    e.src, e.dst
                ));
            };
            if self.nodes[d].role == NodeRole::Input {
                return bad(format!("edge {}->{} ends at an input node", e.src, e.dst));
            }
            if self.nodes[s].role == NodeRole::Output {
                return bad(format!(
                    "edge {}->{} starts at an output node",
                    e.src, e.dst
                ));
            }
            if !e.weight.is_finite() {
                return bad(format!("edge {}->{} has a non-finite weight", e.src, e.dst));
            }
            if !pairs.insert((e.src, e.dst)) {
                return bad(format!("duplicate edge {}->{}", e.src, e.dst));
            }
        }
        if self.topological_order().is_none() {
            return bad("enabled edges form a cycle".into());
        }
        Ok(())
    }

    /// Node positions in a topological order of the enabled edges, or
    /// `None` on a cycle. Ties resolve by position in `nodes`.
    fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in self.edges.iter().filter(|e| e.enabled) {
            let (s, d) = (self.position(e.src)?, self.position(e.dst)?);
            out[s].push(d);
            indegree[d] += 1;
        }
        let mut ready: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_front() {
            order.push(i);
            for &d in &out[i] {
                indegree[d] -= 1;
                if indegree[d] == 0 {
                    ready.push_back(d);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// True if `to` is reachable from `from` over enabled edges.
    fn reaches(&self, from: NodeId, to: NodeId) -> bool {
        let mut stack = vec![from];
        let mut seen = HashSet::new();
        while let Some(id) = stack.pop() {
            if id == to {
                return true;
            }
            if seen.insert(id) {
                stack.extend(
                    self.edges
                        .iter()
                        .filter(|e| e.enabled && e.src == id)
                        .map(|e| e.dst),
                );
            }
        }
        false
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GenomeError> {
        let path = path.as_ref();
        let file_err = |message: String| GenomeError::File {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| GenomeError::Invalid(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GenomeError> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self).expect("genome serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| GenomeError::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

/// `(node position, activation, incoming (source position, weight))`.
type Step = (usize, Activation, Vec<(usize, f64)>);

/// A genome compiled into an evaluation schedule.
#[derive(Debug, Clone)]
pub struct Network {
    /// Topological order, inputs excluded.
    schedule: Vec<Step>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    n_nodes: usize,
}

impl Network {
    pub fn compile(genome: &Genome) -> Self {
        let order = genome
            .topological_order()
            .expect("validated genome is acyclic");
        let pos = |id| genome.position(id).expect("validated edge endpoint");
        let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); genome.nodes.len()];
        for e in genome.edges.iter().filter(|e| e.enabled) {
            incoming[pos(e.dst)].push((pos(e.src), e.weight));
        }
        let by_role = |role| {
            genome
                .nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| n.role == role)
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        };
        let schedule = order
            .into_iter()
            .filter(|&i| genome.nodes[i].role != NodeRole::Input)
            .map(|i| {
                (
                    i,
                    genome.nodes[i].activation,
                    std::mem::take(&mut incoming[i]),
                )
            })
            .collect();
        Self {
            schedule,
            inputs: by_role(NodeRole::Input),
            outputs: by_role(NodeRole::Output),
            n_nodes: genome.nodes.len(),
        }
    }

    pub fn forward(&self, observation: &[f64]) -> [f64; N_OUTPUTS] {
        assert_eq!(observation.len(), N_INPUTS, "observation length");
        let mut values = vec![0.0; self.n_nodes];
        for (&node, &x) in self.inputs.iter().zip(observation) {
            values[node] = x;
        }
        for (node, activation, incoming) in &self.schedule {
            let sum: f64 = incoming.iter().map(|&(src, w)| values[src] * w).sum();
            values[*node] = activation.apply(sum);
        }
        let mut out = [0.0; N_OUTPUTS];
        for (o, &node) in out.iter_mut().zip(&self.outputs) {
            *o = values[node];
        }
        out
    }

    pub fn act(&self, observation: &Observation) -> Action {
        Action::from_index(argmax(&self.forward(observation.as_slice()))).expect("4 outputs")
    }
}

/// Evaluates `genome` on one observation, returning the 4 action scores.
pub fn forward_pass(genome: &Genome, observation: &[f64]) -> [f64; N_OUTPUTS] {
    Network::compile(genome).forward(observation)
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MutationRates {
    /// Per-edge probability of a Gaussian weight kick.
    pub perturb_weight: f64,
    pub add_edge: f64,
    pub add_node: f64,
    pub change_activation: f64,
}

impl Default for MutationRates {
    fn default() -> Self {
        Self {
            perturb_weight: 0.8,
            add_edge: 0.1,
            add_node: 0.05,
            change_activation: 0.05,
        }
    }
}

impl MutationRates {
    pub const ZERO: MutationRates = MutationRates {
        perturb_weight: 0.0,
        add_edge: 0.0,
        add_node: 0.0,
        change_activation: 0.0,
    };

    fn validate(&self) -> Result<(), GenomeError> {
        for (name, r) in [
            ("perturb_weight", self.perturb_weight),
            ("add_edge", self.add_edge),
            ("add_node", self.add_node),
            ("change_activation", self.change_activation),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(GenomeError::Config(format!(
                    "rate {name} must lie in [0, 1], got {r}"
                )));
            }
        }
        Ok(())
    }
}

/// Applies one round of mutations. Inapplicable moves are skipped, so the
/// result always satisfies every genome invariant.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, rates: &MutationRates, rng: &mut R) -> Genome {
    let mut g = genome.clone();
    let kick = Normal::new(0.0, PERTURB_SIGMA).expect("positive sigma");
    for e in &mut g.edges {
        if rng.gen_bool(rates.perturb_weight) {
            e.weight += kick.sample(rng);
        }
    }
    if rng.gen_bool(rates.add_edge) {
        add_edge(&mut g, rng);
    }
    if rng.gen_bool(rates.add_node) {
        add_node(&mut g, rng);
    }
    if rng.gen_bool(rates.change_activation) {
        change_activation(&mut g, rng);
    }
    debug_assert!(g.validate().is_ok());
    g
}

/// Connects a random unconnected pair whose new edge keeps the graph acyclic.
pub fn add_edge<R: Rng + ?Sized>(g: &mut Genome, rng: &mut R) -> bool {
    let existing: HashSet<(NodeId, NodeId)> = g.edges.iter().map(|e| (e.src, e.dst)).collect();
    let mut candidates = Vec::new();
    for src in g.nodes.iter().filter(|n| n.role != NodeRole::Output) {
        for dst in g.nodes.iter().filter(|n| n.role != NodeRole::Input) {
            if src.id != dst.id
                && !existing.contains(&(src.id, dst.id))
                && !g.reaches(dst.id, src.id)
            {
                candidates.push((src.id, dst.id));
            }
        }
    }
    let Some(&(src, dst)) = candidates.choose(rng) else {
        return false;
    };
    g.edges.push(EdgeGene {
        src,
        dst,
        weight: rng.sample(StandardNormal),
        enabled: true,
    });
    true
}

/// Splits a random enabled edge `a -> b` (weight w) into `a -> new` (1) and
/// `new -> b` (w), disabling the original.
pub fn add_node<R: Rng + ?Sized>(g: &mut Genome, rng: &mut R) -> bool {
    let enabled: Vec<usize> = (0..g.edges.len()).filter(|&i| g.edges[i].enabled).collect();
    let Some(&i) = enabled.choose(rng) else {
        return false;
    };
    let old = g.edges[i];
    g.edges[i].enabled = false;
    let id = g.nodes.iter().map(|n| n.id).max().unwrap_or(0) + 1;
    g.nodes.push(NodeGene {
        id,
        role: NodeRole::Hidden,
        activation: Activation::Identity,
    });
    g.edges.push(EdgeGene {
        src: old.src,
        dst: id,
        weight: 1.0,
        enabled: true,
    });
    g.edges.push(EdgeGene {
        src: id,
        dst: old.dst,
        weight: old.weight,
        enabled: true,
    });
    true
}

/// Gives a random hidden node a different activation.
pub fn change_activation<R: Rng + ?Sized>(g: &mut Genome, rng: &mut R) -> bool {
    let hidden: Vec<usize> = (0..g.nodes.len())
        .filter(|&i| g.nodes[i].role == NodeRole::Hidden)
        .collect();
    let Some(&i) = hidden.choose(rng) else {
        return false;
    };
    let current = g.nodes[i].activation;
    let others: Vec<Activation> = Activation::ALL
        .into_iter()
        .filter(|&a| a != current)
        .collect();
    g.nodes[i].activation = *others.choose(rng).expect("five alternatives");
    true
}

/// Mean episode reward of greedy control over `episode_seeds`.
pub fn evaluate_fitness(genome: &Genome, world: &World, episode_seeds: &[u64]) -> Result<f64> {
    let network = Network::compile(genome);
    let mut total = 0.0;
    for &seed in episode_seeds {
        total += world
            .rollout(seed, |obs| network.act(obs))?
            .cumulative_reward;
    }
    Ok(total / episode_seeds.len() as f64)
}

/// How evaluation seeds are drawn across generations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSchedule {
    /// A fresh common list every generation.
    #[default]
    PerGeneration,
    /// One list for the whole run; with elitism the per-generation best can
    /// then never drop.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    pub elitism_count: usize,
    pub tournament_size: usize,
    pub rates: MutationRates,
    pub episodes_per_eval: usize,
    pub seed: u64,
    pub seed_schedule: SeedSchedule,
    /// Evaluate genomes on the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 32,
            generations: 50,
            elitism_count: 2,
            tournament_size: 3,
            rates: MutationRates::default(),
            episodes_per_eval: 3,
            seed: 0,
            seed_schedule: SeedSchedule::PerGeneration,
            parallel: true,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), GenomeError> {
        let bad = |m: &str| Err(GenomeError::Config(m.into()));
        if self.elitism_count < 1 {
            return bad("elitism_count must be at least 1");
        }
        if self.population_size < self.elitism_count {
            return bad("population_size must be at least elitism_count");
        }
        if self.tournament_size < 1 {
            return bad("tournament_size must be at least 1");
        }
        if self.episodes_per_eval < 1 {
            return bad("episodes_per_eval must be at least 1");
        }
        if self.generations < 1 {
            return bad("generations must be at least 1");
        }
        self.rates.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionOutcome {
    /// Best genome seen in any generation.
    pub best: Genome,
    pub best_fitness: f64,
    pub history: Vec<GenerationStats>,
    pub final_population: Vec<Genome>,
}

impl EvolutionOutcome {
    /// Running maximum of the per-generation best.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.history
            .iter()
            .scan(f64::NEG_INFINITY, |m, s| {
                *m = m.max(s.best);
                Some(*m)
            })
            .collect()
    }
}

/// Fitness history as CSV: `generation,best,mean,worst`.
pub fn history_csv(history: &[GenerationStats]) -> String {
    let mut out = String::from("generation,best,mean,worst\n");
    for s in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.generation, s.best, s.mean, s.worst
        ));
    }
    out
}

/// Builds a world from `recording` and evolves a dense random population.
pub fn evolve(
    config: &EvolutionConfig,
    env_config: &EnvConfig,
    recording: &ColonyRecording,
) -> Result<EvolutionOutcome> {
    config.validate()?;
    let world = World::new(*env_config, recording)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let population = (0..config.population_size)
        .map(|_| Genome::dense(&mut rng))
        .collect();
    evolve_population(config, &world, population, &mut rng)
}

/// Generational loop over an explicit starting population.
///
/// Each generation is scored on one common seed list, the top
/// `elitism_count` survive unchanged and the rest are mutated tournament
/// winners. Evaluation order never affects the result.
pub fn evolve_population(
    config: &EvolutionConfig,
    world: &World,
    mut population: Vec<Genome>,
    rng: &mut ChaCha8Rng,
) -> Result<EvolutionOutcome> {
    config.validate()?;
    if population.len() != config.population_size {
        return Err(GenomeError::Config(format!(
            "population has {} genomes, config expects {}",
            population.len(),
            config.population_size
        ))
        .into());
    }
    let draw_seeds = |rng: &mut ChaCha8Rng| -> Vec<u64> {
        (0..config.episodes_per_eval).map(|_| rng.gen()).collect()
    };
    let fixed_seeds = draw_seeds(rng);

    let mut history = Vec::with_capacity(config.generations);
    let mut best: Option<(Genome, f64)> = None;
    for generation in 0..config.generations {
        let seeds = match config.seed_schedule {
            SeedSchedule::Fixed => fixed_seeds.clone(),
            SeedSchedule::PerGeneration => draw_seeds(rng),
        };
        let fitness: Vec<f64> = if config.parallel {
            population
                .par_iter()
                .map(|g| evaluate_fitness(g, world, &seeds))
                .collect::<Result<_>>()?
        } else {
            population
                .iter()
                .map(|g| evaluate_fitness(g, world, &seeds))
                .collect::<Result<_>>()?
        };

        let mut ranked: Vec<usize> = (0..population.len()).collect();
        ranked.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
        let top = ranked[0];
        history.push(GenerationStats {
            generation,
            best: fitness[top],
            mean: fitness.iter().sum::<f64>() / fitness.len() as f64,
            worst: fitness[ranked[ranked.len() - 1]],
        });
        if best.as_ref().is_none_or(|(_, f)| fitness[top] > *f) {
            best = Some((population[top].clone(), fitness[top]));
        }
        if generation + 1 == config.generations {
            break;
        }

        let mut next: Vec<Genome> = ranked[..config.elitism_count]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        while next.len() < config.population_size {
            let winner = tournament(&fitness, config.tournament_size, rng);
            next.push(mutate(&population[winner], &config.rates, rng));
        }
        population = next;
    }

    let (best, best_fitness) = best.expect("at least one generation");
    Ok(EvolutionOutcome {
        best,
        best_fitness,
        history,
        final_population: population,
    })
}

fn tournament<R: Rng + ?Sized>(fitness: &[f64], size: usize, rng: &mut R) -> usize {
    let mut winner = rng.gen_range(0..fitness.len());
    for _ in 1..size {
        let c = rng.gen_range(0..fitness.len());
        if fitness[c] > fitness[winner] || (fitness[c] == fitness[winner] && c < winner) {
            winner = c;
        }
    }
    winner
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(src: NodeId, dst: NodeId, weight: f64) -> EdgeGene {
        EdgeGene {
            src,
            dst,
            weight,
            enabled: true,
        }
    }

    fn single_edge() -> Genome {
        let mut g = Genome::minimal();
        g.edges.push(edge(0, 13, 1.0));
        g.validate().unwrap();
        g
    }

    #[test]
    fn zero_network_outputs_activation_of_zero() {
        let mut g = Genome::minimal();
        for n in &mut g.nodes {
            if n.role == NodeRole::Output {
                n.activation = Activation::Sigmoid;
            }
        }
        assert_eq!(forward_pass(&g, &[0.3; 13]), [0.5; 4]);
        assert_eq!(forward_pass(&Genome::minimal(), &[0.3; 13]), [0.0; 4]);
    }

    #[test]
    fn identity_path() {
        let mut obs = [0.0; 13];
        obs[0] = 0.7;
        assert_eq!(forward_pass(&single_edge(), &obs), [0.7, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn add_node_rewrite() {
        let mut g = single_edge();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(add_node(&mut g, &mut rng));
        assert_eq!(g.hidden_count(), 1);
        assert!(!g.edges[0].enabled);
        assert_eq!(g.edges.len(), 3);
        assert!(g.edges[1..].iter().all(|e| e.enabled));
        assert_eq!((g.edges[1].src, g.edges[2].dst), (0, 13));
        let mut obs = [0.0; 13];
        obs[0] = 0.7;
        assert_eq!(forward_pass(&g, &obs)[0], 0.7);
    }

    #[test]
    fn zero_rates_leave_genome_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Genome::dense(&mut rng);
        assert_eq!(mutate(&g, &MutationRates::ZERO, &mut rng), g);
    }

    #[test]
    fn validation_rejects_bad_graphs() {
        let mut cyc = Genome::minimal();
        cyc.nodes.push(NodeGene {
            id: 20,
            role: NodeRole::Hidden,
            activation: Activation::Tanh,
        });
        cyc.nodes.push(NodeGene {
            id: 21,
            role: NodeRole::Hidden,
            activation: Activation::Tanh,
        });
        cyc.edges = vec![edge(20, 21, 1.0), edge(21, 20, 1.0)];
        assert!(cyc.validate().is_err());
        // disabling one edge of the loop makes it acceptable
        cyc.edges[1].enabled = false;
        assert!(cyc.validate().is_ok());

        let mut into_input = Genome::minimal();
        into_input.edges.push(edge(0, 1, 1.0));
        assert!(into_input.validate().is_err());

        let mut from_output = Genome::minimal();
        from_output.edges.push(edge(13, 14, 1.0));
        assert!(from_output.validate().is_err());

        let mut dup = single_edge();
        dup.edges.push(edge(0, 13, 2.0));
        assert!(dup.validate().is_err());

        let mut arity = Genome::minimal();
        arity.nodes.pop();
        assert!(arity.validate().is_err());

        let mut ids = Genome::minimal();
        ids.nodes[1].id = 0;
        assert!(ids.validate().is_err());
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[1.0, 1.0, 0.0, 1.0]), 0);
        assert_eq!(argmax(&[0.0, 2.0, 2.0, 1.0]), 1);
        assert_eq!(argmax(&[0.0, 0.0, 0.0, 3.0]), 3);
    }

    #[test]
    fn genome_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut g = Genome::dense(&mut rng);
        add_node(&mut g, &mut rng);
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.contains("\"format_version\":1"));
        let back: Genome = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        let bad = text.replace("\"format_version\":1", "\"format_version\":7");
        assert!(serde_json::from_str::<Genome>(&bad).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(EvolutionConfig::default().validate().is_ok());
        let c = EvolutionConfig {
            elitism_count: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = EvolutionConfig {
            population_size: 1,
            elitism_count: 2,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let mut c = EvolutionConfig::default();
        c.rates.add_edge = 1.2;
        assert!(c.validate().is_err());
    }

    #[test]
    fn history_csv_layout() {
        let h = [GenerationStats {
            generation: 0,
            best: -1.5,
            mean: -2.0,
            worst: -3.0,
        }];
        assert_eq!(
            history_csv(&h),
            "generation,best,mean,worst\n0,-1.5,-2,-3\n"
        );
    }
}
