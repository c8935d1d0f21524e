//! Finite S5 Kripke models.
//!
//! Accessibility relations are stored as partitions, so every agent's
//! relation is an equivalence relation by construction. State names are
//! mapped to dense indices when the model is built; all set operations work
//! on [`StateSet`] bitsets over those indices.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::StateSet;

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                $name(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

name_type!(
    /// Agent identifier.
    AgentId
);
name_type!(
    /// Atomic proposition identifier.
    PropId
);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model has no states")]
    EmptyModel,
    #[error("state `{0}` is listed twice")]
    DuplicateState(String),
    #[error("agent name must be nonempty")]
    EmptyName,
    #[error("blocks of agent `{agent}` overlap at state `{state}`")]
    OverlappingBlocks { agent: String, state: String },
    #[error("state `{state}` is not covered by any block of agent `{agent}`")]
    UncoveredState { agent: String, state: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown proposition `{0}`")]
    UnknownProp(String),
    #[error("restriction to the empty set")]
    EmptyRestriction,
    #[error("malformed model file: {0}")]
    Json(String),
    #[error("malformed program: {0}")]
    BadProgram(String),
}

/// A finite S5 model `(S, ~, V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    states: Vec<String>,
    index: HashMap<String, usize>,
    agents: Vec<AgentId>,
    atoms: Vec<PropId>,
    /// Per atom (parallel to `atoms`), the set of states where it holds.
    valuation: Vec<StateSet>,
    /// Per agent, the blocks of its partition ordered by least member.
    blocks: Vec<Vec<StateSet>>,
    /// Per agent, per state: index into `blocks[agent]`.
    block_of: Vec<Vec<usize>>,
}

impl Model {
    /// Builds and validates a model.
    ///
    /// `valuation` maps states to the atoms true there; `partitions` gives
    /// each agent's equivalence classes. Block order and the order of states
    /// inside a block carry no meaning.
    pub fn new<S, A>(
        states: impl IntoIterator<Item = S>,
        agents: impl IntoIterator<Item = A>,
        valuation: &BTreeMap<String, BTreeSet<String>>,
        partitions: &BTreeMap<String, Vec<Vec<String>>>,
    ) -> Result<Model, ModelError>
    where
        S: Into<String>,
        A: Into<String>,
    {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if states.is_empty() {
            return Err(ModelError::EmptyModel);
        }
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let n = states.len();

        let agent_names: BTreeSet<String> = agents.into_iter().map(Into::into).collect();
        if agent_names.iter().any(|a| a.is_empty()) {
            return Err(ModelError::EmptyName);
        }
        if let Some(extra) = partitions.keys().find(|a| !agent_names.contains(*a)) {
            return Err(ModelError::UnknownAgent(extra.clone()));
        }

        let mut atom_names = BTreeSet::new();
        for (state, props) in valuation {
            if !index.contains_key(state) {
                return Err(ModelError::UnknownState(state.clone()));
            }
            for p in props {
                if p.is_empty() {
                    return Err(ModelError::EmptyName);
                }
                atom_names.insert(p.clone());
            }
        }
        let atoms: Vec<PropId> = atom_names.into_iter().map(PropId).collect();
        let mut val = vec![StateSet::with_capacity(n); atoms.len()];
        for (state, props) in valuation {
            let s = index[state];
            for p in props {
                let a = atoms.binary_search_by(|x| x.0.as_str().cmp(p)).expect("collected above");
                val[a].insert(s);
            }
        }

        let mut agents = Vec::with_capacity(agent_names.len());
        let mut blocks = Vec::with_capacity(agent_names.len());
        let mut block_of = Vec::with_capacity(agent_names.len());
        for agent in agent_names {
            let raw = partitions.get(&agent).map(Vec::as_slice).unwrap_or(&[]);
            let mut owner: Vec<Option<usize>> = vec![None; n];
            let mut sets = Vec::new();
            for block in raw {
                if block.is_empty() {
                    continue;
                }
                let mut set = StateSet::with_capacity(n);
                for name in block {
                    let &s = index
                        .get(name)
                        .ok_or_else(|| ModelError::UnknownState(name.clone()))?;
                    if owner[s].is_some() && !set.contains(s) {
                        return Err(ModelError::OverlappingBlocks {
                            agent: agent.clone(),
                            state: name.clone(),
                        });
                    }
                    owner[s] = Some(sets.len());
                    set.insert(s);
                }
                sets.push(set);
            }
            if let Some(s) = owner.iter().position(Option::is_none) {
                return Err(ModelError::UncoveredState {
                    agent,
                    state: states[s].clone(),
                });
            }
            let (b, of) = canonical_blocks(sets, n);
            agents.push(AgentId(agent));
            blocks.push(b);
            block_of.push(of);
        }

        Ok(Model {
            states,
            index,
            agents,
            atoms,
            valuation: val,
            blocks,
            block_of,
        })
    }

    /// Adds atoms to the signature without making them true anywhere.
    pub fn declare_atoms<I, P>(mut self, atoms: I) -> Self
    where
        I: IntoIterator<Item = P>,
        P: Into<PropId>,
    {
        let n = self.len();
        for p in atoms {
            let p = p.into();
            if let Err(pos) = self.atoms.binary_search(&p) {
                self.atoms.insert(pos, p);
                self.valuation.insert(pos, StateSet::with_capacity(n));
            }
        }
        self
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Result<usize, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn agent_index(&self, name: &str) -> Result<usize, ModelError> {
        self.agents
            .binary_search_by(|a| a.0.as_str().cmp(name))
            .map_err(|_| ModelError::UnknownAgent(name.to_string()))
    }

    pub fn atoms(&self) -> &[PropId] {
        &self.atoms
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.binary_search_by(|a| a.0.as_str().cmp(name)).ok()
    }

    /// States where the atom at `atom` (an index into [`Model::atoms`]) holds.
    pub fn truth_set(&self, atom: usize) -> &StateSet {
        &self.valuation[atom]
    }

    /// Truth set of a named atom; atoms outside the signature are false everywhere.
    pub fn atom_extension(&self, name: &str) -> StateSet {
        match self.atom_index(name) {
            Some(a) => self.valuation[a].clone(),
            None => self.empty_set(),
        }
    }

    pub fn holds(&self, atom: usize, s: usize) -> bool {
        self.valuation[atom].contains(s)
    }

    pub fn blocks(&self, agent: usize) -> &[StateSet] {
        &self.blocks[agent]
    }

    pub fn block_index(&self, agent: usize, s: usize) -> usize {
        self.block_of[agent][s]
    }

    /// `[s]_a` by indices.
    pub fn class(&self, agent: usize, s: usize) -> &StateSet {
        &self.blocks[agent][self.block_of[agent][s]]
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> StateSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn set_of<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<StateSet, ModelError> {
        let mut set = self.empty_set();
        for name in names {
            set.insert(self.state_index(name)?);
        }
        Ok(set)
    }

    pub fn names_of(&self, set: &StateSet) -> Vec<&str> {
        set.ones().map(|s| self.states[s].as_str()).collect()
    }

    /// The block of `agent`'s partition containing `state`.
    pub fn equiv_class(&self, agent: &str, state: &str) -> Result<StateSet, ModelError> {
        let a = self.agent_index(agent)?;
        let s = self.state_index(state)?;
        Ok(self.class(a, s).clone())
    }

    /// States reachable from `state` along the union of the given agents' relations.
    pub fn reach(&self, agents: &[&str], state: &str) -> Result<StateSet, ModelError> {
        let ids = agents
            .iter()
            .map(|a| self.agent_index(a))
            .collect::<Result<Vec<_>, _>>()?;
        let s = self.state_index(state)?;
        Ok(self.reach_idx(&ids, s))
    }

    pub(crate) fn reach_idx(&self, agents: &[usize], s: usize) -> StateSet {
        let mut seen = self.empty_set();
        seen.insert(s);
        let mut stack = vec![s];
        while let Some(t) = stack.pop() {
            for &a in agents {
                for u in self.class(a, t).ones() {
                    if !seen.put(u) {
                        stack.push(u);
                    }
                }
            }
        }
        seen
    }

    /// Runs a composite program from `state` and returns `{ t | (state, t) ∈ R(pi) }`.
    pub fn run_program(&self, pi: &Program, state: &str) -> Result<StateSet, ModelError> {
        let s = self.state_index(state)?;
        let mut current = self.empty_set();
        current.insert(s);
        self.run_program_from(pi, &current)
    }

    /// Image of a set of states under `R(pi)`.
    pub fn run_program_from(&self, pi: &Program, from: &StateSet) -> Result<StateSet, ModelError> {
        let mut current = from.clone();
        for step in pi.steps() {
            current = match step {
                Step::Agent(a) => {
                    let a = self.agent_index(a.as_str())?;
                    let mut next = self.empty_set();
                    let mut done = vec![false; self.blocks[a].len()];
                    for t in current.ones() {
                        let b = self.block_of[a][t];
                        if !done[b] {
                            done[b] = true;
                            next.union_with(&self.blocks[a][b]);
                        }
                    }
                    next
                }
                Step::Test(p) => {
                    let p = self
                        .atom_index(p.as_str())
                        .ok_or_else(|| ModelError::UnknownProp(p.to_string()))?;
                    let mut next = current;
                    next.intersect_with(&self.valuation[p]);
                    next
                }
            };
        }
        Ok(current)
    }

    /// The submodel on `keep`: blocks and valuation are intersected with it.
    pub fn restrict(&self, keep: &StateSet) -> Result<Model, ModelError> {
        if keep.is_clear() {
            return Err(ModelError::EmptyRestriction);
        }
        let kept: Vec<usize> = keep.ones().filter(|&s| s < self.len()).collect();
        if kept.len() != keep.count_ones(..) {
            return Err(ModelError::UnknownState(format!("#{}", keep.ones().next_back().unwrap_or(0))));
        }
        let n = kept.len();
        let mut remap = vec![usize::MAX; self.len()];
        for (new, &old) in kept.iter().enumerate() {
            remap[old] = new;
        }
        let project = |set: &StateSet| {
            let mut out = StateSet::with_capacity(n);
            for s in set.ones() {
                if remap[s] != usize::MAX {
                    out.insert(remap[s]);
                }
            }
            out
        };
        let states: Vec<String> = kept.iter().map(|&s| self.states[s].clone()).collect();
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let valuation = self.valuation.iter().map(project).collect();
        let mut blocks = Vec::with_capacity(self.agents.len());
        let mut block_of = Vec::with_capacity(self.agents.len());
        for a in 0..self.agents.len() {
            let sets = self.blocks[a]
                .iter()
                .map(project)
                .filter(|b| !b.is_clear())
                .collect();
            let (b, of) = canonical_blocks(sets, n);
            blocks.push(b);
            block_of.push(of);
        }
        Ok(Model {
            states,
            index,
            agents: self.agents.clone(),
            atoms: self.atoms.clone(),
            valuation,
            blocks,
            block_of,
        })
    }

    pub fn from_json(text: &str) -> Result<(Model, Option<String>), ModelError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        file.into_model()
    }

    pub fn to_file(&self, point: Option<&str>) -> ModelFile {
        let agents = self
            .agents
            .iter()
            .enumerate()
            .map(|(a, name)| {
                let blocks = self.blocks[a]
                    .iter()
                    .map(|b| self.names_of(b).into_iter().map(String::from).collect())
                    .collect();
                (name.0.clone(), blocks)
            })
            .collect();
        let mut valuation = BTreeMap::new();
        for (s, name) in self.states.iter().enumerate() {
            let props: Vec<String> = (0..self.atoms.len())
                .filter(|&p| self.valuation[p].contains(s))
                .map(|p| self.atoms[p].0.clone())
                .collect();
            if !props.is_empty() {
                valuation.insert(name.clone(), props);
            }
        }
        ModelFile {
            states: self.states.clone(),
            agents,
            valuation,
            point: point.map(String::from),
        }
    }
}

fn canonical_blocks(mut sets: Vec<StateSet>, n: usize) -> (Vec<StateSet>, Vec<usize>) {
    sets.sort_by_key(|b| b.minimum().unwrap_or(usize::MAX));
    let mut of = vec![0; n];
    for (i, b) in sets.iter().enumerate() {
        for s in b.ones() {
            of[s] = i;
        }
    }
    (sets, of)
}

/// A pointed model `M_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub model: Model,
    pub point: usize,
}

impl PointedModel {
    pub fn new(model: Model, point: &str) -> Result<Self, ModelError> {
        let point = model.state_index(point)?;
        Ok(PointedModel { model, point })
    }

    pub fn point_name(&self) -> &str {
        self.model.state_name(self.point)
    }
}

/// On-disk JSON form of a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub states: Vec<String>,
    pub agents: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

impl ModelFile {
    pub fn into_model(self) -> Result<(Model, Option<String>), ModelError> {
        let valuation: BTreeMap<String, BTreeSet<String>> = self
            .valuation
            .into_iter()
            .map(|(s, ps)| (s, ps.into_iter().collect()))
            .collect();
        let agents: Vec<String> = self.agents.keys().cloned().collect();
        let model = Model::new(self.states, agents, &valuation, &self.agents)?;
        if let Some(p) = &self.point {
            model.state_index(p)?;
        }
        Ok((model, self.point))
    }
}

/// One step of a composite program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Agent(AgentId),
    Test(PropId),
}

/// A composite program `π ::= a | A? | π;π`, kept as its flat step sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program(Vec<Step>);

impl Program {
    pub fn new(steps: Vec<Step>) -> Result<Self, ModelError> {
        if steps.is_empty() {
            return Err(ModelError::BadProgram("empty program".into()));
        }
        Ok(Program(steps))
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    /// Sequential composition `self; other`.
    pub fn then(&self, other: &Program) -> Program {
        let mut steps = self.0.clone();
        steps.extend(other.0.iter().cloned());
        Program(steps)
    }
}

/// Parses `s;r?;e;l?`: bare names are agents, names ending in `?` are tests.
impl FromStr for Program {
    type Err = ModelError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut steps = Vec::new();
        for raw in text.split(';') {
            let item = raw.trim();
            if let Some(p) = item.strip_suffix('?') {
                let p = p.trim();
                if p.is_empty() {
                    return Err(ModelError::BadProgram(text.to_string()));
                }
                steps.push(Step::Test(PropId::new(p)));
            } else if item.is_empty() {
                return Err(ModelError::BadProgram(text.to_string()));
            } else {
                steps.push(Step::Agent(AgentId::new(item)));
            }
        }
        Program::new(steps)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            match step {
                Step::Agent(a) => write!(f, "{a}")?,
                Step::Test(p) => write!(f, "{p}?")?,
            }
        }
        Ok(())
    }
}
