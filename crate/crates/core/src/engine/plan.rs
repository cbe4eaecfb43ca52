use std::collections::BTreeSet;

use crate::model::{
    expand_hierarchy, Assignment, DecisionModel, DecisionTable, DerivedInput, InputClause,
    OutputClause, Value,
};

use super::bits::RuleSet;
use super::domain::{representatives, RepresentativeDomain};
use super::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Axis(usize),
    Child(usize),
}

#[derive(Debug, Clone)]
struct TablePlan {
    table: DecisionTable,
    sources: Vec<Source>,
    /// Per rule, index into the output's allowed values.
    outputs: Vec<usize>,
}

/// Result of evaluating the hierarchy at one grid point.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Outcome {
    Value(usize),
    NoMatch(usize),
    Multiple(usize, Vec<usize>),
}

/// A hierarchy flattened for one root decision and one choice of which
/// derivable inputs are asked instead of derived.
#[derive(Debug, Clone)]
pub struct DecisionPlan {
    root: String,
    inputs: Vec<InputClause>,
    domains: Vec<Vec<Value>>,
    derived: Vec<DerivedInput>,
    tables: Vec<TablePlan>,
    warnings: Vec<String>,
}

/// Per-query view: a domain for every axis (bound axes have one value) and
/// precomputed rule masks for every column.
struct Grid<'p> {
    plan: &'p DecisionPlan,
    domains: Vec<Vec<Value>>,
    sources: Vec<Vec<Source>>,
    /// masks[t][c][k]: rules of table t whose column c accepts value k.
    masks: Vec<Vec<Vec<RuleSet>>>,
    active: Vec<bool>,
}

impl DecisionPlan {
    /// Every derivable input is derived.
    pub fn new(model: &DecisionModel, root: &str) -> Result<Self, EngineError> {
        Self::with_ask(model, root, &BTreeSet::new())
    }

    /// Inputs named in `ask` are asked even when a child decision feeds them.
    pub fn with_ask(model: &DecisionModel, root: &str, ask: &BTreeSet<String>) -> Result<Self, EngineError> {
        let root = crate::model::slug(root);
        if model.table(&root).is_none() {
            return Err(EngineError::UnknownTable(root));
        }
        let expansion = expand_hierarchy(model, &root, ask)?;
        let index_of = |name: &str| expansion.tables.iter().position(|t| t == name);
        let mut tables = Vec::new();
        for name in &expansion.tables {
            let table = model.table(name).expect("expanded tables exist").clone();
            let mut sources = Vec::new();
            for clause in table.inputs() {
                let derived = expansion
                    .derived
                    .iter()
                    .find(|d| d.parent == *name && d.input == clause.name);
                let source = match derived {
                    Some(d) => Source::Child(index_of(&d.child).expect("child is expanded")),
                    None => Source::Axis(
                        expansion
                            .raw
                            .iter()
                            .position(|c| c.name == clause.name)
                            .expect("raw input is listed"),
                    ),
                };
                sources.push(source);
            }
            let outputs = table
                .rules()
                .iter()
                .map(|r| {
                    table
                        .output()
                        .allowed_values
                        .iter()
                        .position(|v| *v == r.output_entry)
                        .expect("validated output")
                })
                .collect();
            tables.push(TablePlan {
                table,
                sources,
                outputs,
            });
        }
        let domains = expansion
            .raw
            .iter()
            .enumerate()
            .map(|(a, clause)| {
                let mut tests = Vec::new();
                for tp in &tables {
                    for (c, s) in tp.sources.iter().enumerate() {
                        if *s == Source::Axis(a) {
                            tests.extend(tp.table.rules().iter().map(|r| &r.input_entries[c]));
                        }
                    }
                }
                representatives(&clause.data_type, tests)
            })
            .collect();
        Ok(DecisionPlan {
            root,
            inputs: expansion.raw,
            domains,
            derived: expansion.derived,
            tables,
            warnings: expansion.warnings,
        })
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn root_table(&self) -> &DecisionTable {
        &self.tables[0].table
    }

    pub fn output(&self) -> &OutputClause {
        self.tables[0].table.output()
    }

    /// Askable inputs in question order.
    pub fn inputs(&self) -> &[InputClause] {
        &self.inputs
    }

    pub fn input(&self, name: &str) -> Option<&InputClause> {
        self.inputs.iter().find(|c| c.name == name)
    }

    pub fn derived(&self) -> &[DerivedInput] {
        &self.derived
    }

    /// Tables taking part in the evaluation, root first.
    pub fn tables(&self) -> impl Iterator<Item = &DecisionTable> {
        self.tables.iter().map(|t| &t.table)
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn domains(&self) -> Vec<RepresentativeDomain> {
        self.inputs
            .iter()
            .zip(&self.domains)
            .map(|(c, d)| RepresentativeDomain {
                input: c.name.clone(),
                representatives: d.clone(),
            })
            .collect()
    }

    pub fn representatives(&self, input: &str) -> Option<&[Value]> {
        self.axis(input).map(|a| self.domains[a].as_slice())
    }

    fn axis(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|c| c.name == name)
    }

    fn derived_input(&self, name: &str) -> Option<&DerivedInput> {
        self.derived.iter().find(|d| d.input == name)
    }

    /// Rejects bindings of unknown or derived inputs and non-conforming values.
    pub fn check_assignment(&self, assignment: &Assignment) -> Result<(), EngineError> {
        for (name, value) in assignment.iter() {
            match self.input(name) {
                Some(clause) if clause.data_type.conforms(value) => {}
                Some(_) => {
                    return Err(EngineError::InvalidValue {
                        input: name.to_owned(),
                        value: value.to_literal(),
                    })
                }
                None if self.derived_input(name).is_some() => {
                    return Err(EngineError::DerivedInputBound(name.to_owned()))
                }
                None => return Err(EngineError::UnknownInput(name.to_owned())),
            }
        }
        Ok(())
    }

    fn grid(&self, assignment: &Assignment, derived_axis: Option<&DerivedInput>) -> Grid<'_> {
        let mut domains: Vec<Vec<Value>> = self
            .inputs
            .iter()
            .zip(&self.domains)
            .map(|(c, reps)| match assignment.get(&c.name) {
                Some(v) => vec![v.clone()],
                None => reps.clone(),
            })
            .collect();
        let mut sources: Vec<Vec<Source>> = self.tables.iter().map(|t| t.sources.clone()).collect();
        if let Some(d) = derived_axis {
            let parent = self.table_index(&d.parent);
            let col = self.tables[parent].table.input_position(&d.input).expect("derived column");
            let Source::Child(child) = sources[parent][col] else {
                unreachable!("derived column has a child source")
            };
            domains.push(self.tables[child].table.output().allowed_values.clone());
            sources[parent][col] = Source::Axis(domains.len() - 1);
        }
        let mut active = vec![false; self.tables.len()];
        let mut stack = vec![0];
        while let Some(t) = stack.pop() {
            if std::mem::replace(&mut active[t], true) {
                continue;
            }
            for s in &sources[t] {
                if let Source::Child(c) = s {
                    stack.push(*c);
                }
            }
        }
        let masks = self
            .tables
            .iter()
            .enumerate()
            .map(|(t, tp)| {
                let rules = tp.table.rules();
                sources[t]
                    .iter()
                    .enumerate()
                    .map(|(c, s)| {
                        let values: &[Value] = match s {
                            Source::Axis(a) => &domains[*a],
                            Source::Child(ch) => &self.tables[*ch].table.output().allowed_values,
                        };
                        values
                            .iter()
                            .map(|v| {
                                let mut set = RuleSet::empty(rules.len());
                                for (ri, r) in rules.iter().enumerate() {
                                    if r.input_entries[c].matches(v) {
                                        set.insert(ri);
                                    }
                                }
                                set
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Grid {
            plan: self,
            domains,
            sources,
            masks,
            active,
        }
    }

    fn table_index(&self, name: &str) -> usize {
        self.tables
            .iter()
            .position(|t| t.table.name() == name)
            .expect("table is part of the plan")
    }

    /// Evaluates a complete assignment of the askable inputs.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Value, EngineError> {
        self.check_assignment(assignment)?;
        if let Some(missing) = self.inputs.iter().find(|c| !assignment.contains(&c.name)) {
            return Err(EngineError::IncompleteAssignment(missing.name.clone()));
        }
        let grid = self.grid(assignment, None);
        let point = vec![0; grid.domains.len()];
        grid.result(grid.eval(0, &point))
    }

    /// The decision implied by a possibly partial assignment. It is returned
    /// as soon as no completion of the missing inputs could change it.
    pub fn decision(&self, assignment: &Assignment) -> Result<Value, EngineError> {
        self.check_assignment(assignment)?;
        let grid = self.grid(assignment, None);
        let free = grid.relevant_free_axes();
        let mut first: Option<Outcome> = None;
        let mut constant = true;
        grid.odometer(&free, |point| {
            let o = grid.eval(0, point);
            match &first {
                None => first = Some(o),
                Some(f) if *f != o => {
                    constant = false;
                    return false;
                }
                _ => {}
            }
            true
        });
        let first = first.expect("the grid has at least one point");
        if constant {
            return grid.result(first);
        }
        for clause in &self.inputs {
            if !assignment.contains(&clause.name) && self.necessary_unchecked(&clause.name, assignment)? {
                return Err(EngineError::MissingInput(clause.name.clone()));
            }
        }
        unreachable!("a non-constant outcome has a necessary input")
    }

    /// Whether some value of `input` can still change the decision, given
    /// the values already bound.
    pub fn is_necessary(&self, input: &str, assignment: &Assignment) -> Result<bool, EngineError> {
        self.check_assignment(assignment)?;
        self.necessary_unchecked(input, assignment)
    }

    fn necessary_unchecked(&self, input: &str, assignment: &Assignment) -> Result<bool, EngineError> {
        if assignment.contains(input) {
            return Err(EngineError::AlreadyBound(input.to_owned()));
        }
        let (grid, target) = match self.axis(input) {
            Some(a) => (self.grid(assignment, None), a),
            None => {
                let d = self
                    .derived_input(input)
                    .ok_or_else(|| EngineError::UnknownInput(input.to_owned()))?;
                let grid = self.grid(assignment, Some(d));
                let target = grid.domains.len() - 1;
                (grid, target)
            }
        };
        let free = grid.relevant_free_axes();
        if !free.contains(&target) {
            return Ok(false);
        }
        let others: Vec<usize> = free.into_iter().filter(|a| *a != target).collect();
        let mut necessary = false;
        let mut point = vec![0; grid.domains.len()];
        grid.odometer(&others, |p| {
            point.copy_from_slice(p);
            point[target] = 0;
            let base = grid.eval(0, &point);
            for k in 1..grid.domains[target].len() {
                point[target] = k;
                if grid.eval(0, &point) != base {
                    necessary = true;
                    return false;
                }
            }
            true
        });
        Ok(necessary)
    }

    /// First unbound input, in question order, that is still necessary.
    pub fn next_question(&self, assignment: &Assignment) -> Result<Option<&InputClause>, EngineError> {
        self.check_assignment(assignment)?;
        for clause in &self.inputs {
            if !assignment.contains(&clause.name) && self.necessary_unchecked(&clause.name, assignment)? {
                return Ok(Some(clause));
            }
        }
        Ok(None)
    }
}

impl Grid<'_> {
    fn eval(&self, t: usize, point: &[usize]) -> Outcome {
        let tp = &self.plan.tables[t];
        let mut candidates = RuleSet::full(tp.table.rules().len());
        for (c, s) in self.sources[t].iter().enumerate() {
            let k = match s {
                Source::Axis(a) => point[*a],
                Source::Child(ch) => match self.eval(*ch, point) {
                    Outcome::Value(k) => k,
                    failure => return failure,
                },
            };
            candidates.intersect(&self.masks[t][c][k]);
        }
        match candidates.count() {
            0 => Outcome::NoMatch(t),
            1 => Outcome::Value(tp.outputs[candidates.iter().next().expect("one rule")]),
            _ => Outcome::Multiple(t, candidates.iter().map(|r| r + 1).collect()),
        }
    }

    fn result(&self, outcome: Outcome) -> Result<Value, EngineError> {
        match outcome {
            Outcome::Value(k) => Ok(self.plan.output().allowed_values[k].clone()),
            Outcome::NoMatch(t) => Err(EngineError::NoMatchingRule(self.plan.tables[t].table.name().to_owned())),
            Outcome::Multiple(t, rules) => Err(EngineError::MultipleMatchingRules {
                table: self.plan.tables[t].table.name().to_owned(),
                rules,
            }),
        }
    }

    /// Unfixed axes that can influence the candidate rules of some active
    /// table, given the rules still compatible with the fixed axes.
    fn relevant_free_axes(&self) -> Vec<usize> {
        let fixed: Vec<RuleSet> = self
            .plan
            .tables
            .iter()
            .enumerate()
            .map(|(t, tp)| {
                let mut set = RuleSet::full(tp.table.rules().len());
                for (c, s) in self.sources[t].iter().enumerate() {
                    if let Source::Axis(a) = s {
                        if self.domains[*a].len() == 1 {
                            set.intersect(&self.masks[t][c][0]);
                        }
                    }
                }
                set
            })
            .collect();
        let mut relevant = BTreeSet::new();
        for (t, sources) in self.sources.iter().enumerate() {
            if !self.active[t] {
                continue;
            }
            for (c, s) in sources.iter().enumerate() {
                let Source::Axis(a) = s else { continue };
                if self.domains[*a].len() < 2 || relevant.contains(a) {
                    continue;
                }
                let masks = &self.masks[t][c];
                let first = masks[0].intersection(&fixed[t]);
                if masks[1..].iter().any(|m| m.intersection(&fixed[t]) != first) {
                    relevant.insert(*a);
                }
            }
        }
        relevant.into_iter().collect()
    }

    /// Visits every setting of `axes` (others at index 0) until `visit`
    /// returns false.
    fn odometer(&self, axes: &[usize], mut visit: impl FnMut(&[usize]) -> bool) {
        let mut point = vec![0; self.domains.len()];
        loop {
            if !visit(&point) {
                return;
            }
            let mut i = 0;
            loop {
                let Some(&a) = axes.get(i) else { return };
                point[a] += 1;
                if point[a] < self.domains[a].len() {
                    break;
                }
                point[a] = 0;
                i += 1;
            }
        }
    }
}
