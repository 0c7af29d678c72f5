//! Boolean causal models and two-level minimisation.
//!
//! Minterm indices put the first declared variable in the most significant
//! bit, so with variables `A B C D` the assignment `A=0 B=1 C=1 D=1` is 7.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::FormalismError;

/// Largest variable count accepted by [`qm_minimize`].
pub const MAX_VARIABLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formula {
    Const(bool),
    Var(String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Self {
        Formula::Var(name.to_string())
    }

    fn eval(&self, assignment: &BTreeMap<String, bool>) -> Result<bool, FormalismError> {
        Ok(match self {
            Formula::Const(b) => *b,
            Formula::Var(v) => *assignment
                .get(v)
                .ok_or_else(|| FormalismError::MissingVariable(v.clone()))?,
            Formula::Not(f) => !f.eval(assignment)?,
            Formula::And(fs) => {
                let mut acc = true;
                for f in fs {
                    acc &= f.eval(assignment)?;
                }
                acc
            }
            Formula::Or(fs) => {
                let mut acc = false;
                for f in fs {
                    acc |= f.eval(assignment)?;
                }
                acc
            }
        })
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(v) => out.push(v),
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: String,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: &str) -> Self {
        Literal {
            var: var.to_string(),
            negated: false,
        }
    }

    pub fn neg(var: &str) -> Self {
        Literal {
            var: var.to_string(),
            negated: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definition {
    Formula(Formula),
    /// Disjunction of conjunctive clusters, each sufficient on its own.
    Clusters(Vec<Vec<Literal>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanCausalModel {
    pub variables: Vec<String>,
    pub definition: Definition,
}

impl BooleanCausalModel {
    pub fn new(variables: &[&str], definition: Definition) -> Result<Self, FormalismError> {
        let model = BooleanCausalModel {
            variables: variables.iter().map(|v| v.to_string()).collect(),
            definition,
        };
        model.check()?;
        Ok(model)
    }

    fn check(&self) -> Result<(), FormalismError> {
        let declared: BTreeSet<&str> = self.variables.iter().map(String::as_str).collect();
        let mut used = Vec::new();
        match &self.definition {
            Definition::Formula(f) => f.collect_vars(&mut used),
            Definition::Clusters(cs) => {
                if cs.is_empty() || cs.iter().any(Vec::is_empty) {
                    return Err(FormalismError::EmptyCluster);
                }
                used.extend(cs.iter().flatten().map(|l| l.var.as_str()));
            }
        }
        match used.into_iter().find(|v| !declared.contains(v)) {
            Some(v) => Err(FormalismError::UnknownVariable(v.to_string())),
            None => Ok(()),
        }
    }

    /// Minterms (indices over `variables`) on which the model is true.
    pub fn on_set(&self) -> Result<Vec<u32>, FormalismError> {
        let n = self.variables.len();
        if n > MAX_VARIABLES {
            return Err(FormalismError::TooManyVariables(n));
        }
        let mut out = Vec::new();
        for m in 0..(1u32 << n) {
            if bool_evaluate(self, &assignment_of(&self.variables, m))? {
                out.push(m);
            }
        }
        Ok(out)
    }
}

/// Assignment corresponding to minterm `m` (first variable = MSB).
pub fn assignment_of(variables: &[String], m: u32) -> BTreeMap<String, bool> {
    let n = variables.len();
    variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), (m >> (n - 1 - i)) & 1 == 1))
        .collect()
}

pub fn bool_evaluate(model: &BooleanCausalModel, assignment: &BTreeMap<String, bool>) -> Result<bool, FormalismError> {
    if let Some(v) = model.variables.iter().find(|v| !assignment.contains_key(*v)) {
        return Err(FormalismError::MissingVariable(v.clone()));
    }
    match &model.definition {
        Definition::Formula(f) => f.eval(assignment),
        Definition::Clusters(clusters) => Ok(clusters
            .iter()
            .any(|c| c.iter().all(|l| assignment[&l.var] != l.negated))),
    }
}

/// A product term: bits set in `care` are fixed to the matching bit of `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Implicant {
    pub value: u32,
    pub care: u32,
}

impl Implicant {
    pub fn covers(&self, m: u32) -> bool {
        m & self.care == self.value
    }

    pub fn literal_count(&self) -> u32 {
        self.care.count_ones()
    }

    /// `(variable index, negated)` pairs in variable order.
    pub fn literals(&self, n: usize) -> Vec<(usize, bool)> {
        (0..n)
            .filter_map(|i| {
                let bit = 1 << (n - 1 - i);
                (self.care & bit != 0).then_some((i, self.value & bit == 0))
            })
            .collect()
    }
}

/// Minimal sum-of-products. No implicants means constant false; a single
/// implicant with no literals means constant true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dnf {
    pub variables: Vec<String>,
    pub implicants: Vec<Implicant>,
}

impl Dnf {
    pub fn evaluate(&self, m: u32) -> bool {
        self.implicants.iter().any(|i| i.covers(m))
    }

    /// Clusters of literals, one per implicant.
    pub fn clusters(&self) -> Vec<Vec<Literal>> {
        let n = self.variables.len();
        self.implicants
            .iter()
            .map(|imp| {
                imp.literals(n)
                    .into_iter()
                    .map(|(i, neg)| Literal {
                        var: self.variables[i].clone(),
                        negated: neg,
                    })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.implicants.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .clusters()
            .into_iter()
            .map(|c| {
                if c.is_empty() {
                    "1".to_string()
                } else {
                    c.iter()
                        .map(|l| format!("{}{}", if l.negated { "!" } else { "" }, l.var))
                        .collect::<Vec<_>>()
                        .join("&")
                }
            })
            .collect();
        f.write_str(&terms.join(" | "))
    }
}

/// All prime implicants of the on-set, by iterated merging of terms that
/// differ in exactly one fixed bit.
pub fn prime_implicants(n: usize, on_set: &BTreeSet<u32>) -> Vec<Implicant> {
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut current: BTreeSet<Implicant> = on_set.iter().map(|&m| Implicant { value: m, care: full }).collect();
    let mut primes = BTreeSet::new();
    while !current.is_empty() {
        let terms: Vec<Implicant> = current.iter().copied().collect();
        let mut merged_flags = vec![false; terms.len()];
        let mut next = BTreeSet::new();
        for i in 0..terms.len() {
            for j in (i + 1)..terms.len() {
                let (a, b) = (terms[i], terms[j]);
                if a.care != b.care {
                    continue;
                }
                let diff = a.value ^ b.value;
                if diff.count_ones() == 1 {
                    next.insert(Implicant {
                        value: a.value & !diff,
                        care: a.care & !diff,
                    });
                    merged_flags[i] = true;
                    merged_flags[j] = true;
                }
            }
        }
        primes.extend(terms.iter().zip(&merged_flags).filter(|(_, &m)| !m).map(|(t, _)| *t));
        current = next;
    }
    primes.into_iter().collect()
}

/// Fixed-width bit set over residue minterm indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn full(len: usize) -> Self {
        let mut b = Bits::empty(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    fn intersects(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    fn minus(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(w, &bits)| (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b))
    }
}

fn count(b: &Bits) -> usize {
    b.0.iter().map(|w| w.count_ones() as usize).sum()
}

fn and(a: &Bits, b: &Bits) -> Bits {
    Bits(a.0.iter().zip(&b.0).map(|(x, y)| x & y).collect())
}

fn subset(a: &Bits, b: &Bits) -> bool {
    a.0.iter().zip(&b.0).all(|(x, y)| x & !y == 0)
}

/// Cover cost: number of terms, then number of literals.
type Cost = (i64, i64);

fn sub(a: Cost, b: Cost) -> Cost {
    (a.0 - b.0, a.1 - b.1)
}

/// A partial cover. `terms` holds prime indices sorted by literal order, so
/// comparing two solutions of equal cost compares their sorted literal lists.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Solution {
    cost: Cost,
    terms: Vec<usize>,
}

impl Solution {
    fn join(mut self, other: Solution) -> Solution {
        self.cost = (self.cost.0 + other.cost.0, self.cost.1 + other.cost.1);
        self.terms.extend(other.terms);
        self.terms.sort_unstable();
        self
    }
}

/// Exact minimum cover over a bit-set covering table. Every node applies
/// the classic reductions (essential primes, dominated rows, dominated
/// columns), solves independent blocks separately, and otherwise branches
/// on the row with the fewest options. A branch that skips an option
/// excludes it from later siblings.
struct CoverSearch {
    /// Literal count of each prime; primes are indexed in literal order.
    costs: Vec<i64>,
    /// Rows covered by each prime.
    masks: Vec<Bits>,
    /// Primes covering each row.
    covering: Vec<Bits>,
}

impl CoverSearch {
    fn single(&self, p: usize) -> Solution {
        Solution {
            cost: (1, self.costs[p]),
            terms: vec![p],
        }
    }

    /// Applies reductions in place. Returns the forced primes, or `None`
    /// when some row can no longer be covered.
    fn reduce(&self, rows: &mut Bits, cols: &mut Bits) -> Option<Solution> {
        let mut forced = Solution {
            cost: (0, 0),
            terms: Vec::new(),
        };
        loop {
            let mut changed = false;
            for r in rows.ones().collect::<Vec<_>>() {
                if !rows.get(r) {
                    continue;
                }
                let opts = and(&self.covering[r], cols);
                match count(&opts) {
                    0 => return None,
                    1 => {
                        let p = opts.ones().next().expect("one option");
                        forced = forced.join(self.single(p));
                        *rows = rows.minus(&self.masks[p]);
                        cols.clear(p);
                        changed = true;
                    }
                    _ => {}
                }
            }
            // a row whose options include all those of another is covered
            // for free
            let live: Vec<(usize, Bits)> = rows.ones().map(|r| (r, and(&self.covering[r], cols))).collect();
            for (i, (r1, a)) in live.iter().enumerate() {
                for (j, (r2, b)) in live.iter().enumerate() {
                    if i != j && rows.get(*r1) && rows.get(*r2) && subset(a, b) && (a != b || i < j) {
                        rows.clear(*r2);
                        changed = true;
                    }
                }
            }
            // swapping a prime for one that covers at least as much and ranks
            // lower never makes a cover worse; primes are indexed by rank
            // within equal literal counts
            let cs: Vec<(usize, Bits)> = cols.ones().map(|c| (c, and(&self.masks[c], rows))).collect();
            for (c1, a) in &cs {
                if a.is_empty() {
                    cols.clear(*c1);
                    changed = true;
                    continue;
                }
                for (c2, b) in &cs {
                    let better = (self.costs[*c2], *c2) < (self.costs[*c1], *c1);
                    if c1 != c2 && better && cols.get(*c1) && cols.get(*c2) && subset(a, b) {
                        cols.clear(*c1);
                        changed = true;
                    }
                }
            }
            if !changed || rows.is_empty() {
                return Some(forced);
            }
        }
    }

    /// Sum of the cheapest option over rows with pairwise disjoint options.
    fn lower_bound(&self, rows: &Bits, cols: &Bits) -> Cost {
        let mut opts: Vec<(usize, usize, Bits)> = rows
            .ones()
            .map(|r| {
                let o = and(&self.covering[r], cols);
                (count(&o), r, o)
            })
            .collect();
        opts.sort_by_key(|(k, r, _)| (*k, *r));
        let mut used = Bits::empty(self.costs.len());
        let mut bound = (0, 0);
        for (_, _, o) in &opts {
            if !o.intersects(&used) {
                bound.0 += 1;
                bound.1 += o.ones().map(|p| self.costs[p]).min().unwrap_or(0);
                for p in o.ones() {
                    used.set(p);
                }
            }
        }
        let widest = cols
            .ones()
            .map(|p| count(&and(&self.masks[p], rows)))
            .max()
            .unwrap_or(1)
            .max(1);
        bound.0 = bound.0.max(opts.len().div_ceil(widest) as i64);
        bound
    }

    /// Rows linked through shared primes.
    fn blocks(&self, rows: &Bits, cols: &Bits) -> Vec<Bits> {
        let mut blocks: Vec<Bits> = Vec::new();
        let mut left = rows.clone();
        loop {
            let Some(seed) = left.ones().next() else { break };
            let mut block = Bits(vec![0; rows.0.len()]);
            block.set(seed);
            let mut frontier = vec![seed];
            while let Some(r) = frontier.pop() {
                for p in and(&self.covering[r], cols).ones() {
                    for r2 in and(&self.masks[p], &left).ones() {
                        if !block.get(r2) {
                            block.set(r2);
                            frontier.push(r2);
                        }
                    }
                }
            }
            left = left.minus(&block);
            blocks.push(block);
        }
        blocks
    }

    /// Best cover of `rows` from `cols` whose cost does not exceed `limit`.
    fn solve(&self, mut rows: Bits, mut cols: Bits, limit: Cost) -> Option<Solution> {
        let forced = self.reduce(&mut rows, &mut cols)?;
        let limit = sub(limit, forced.cost);
        if limit.0 < 0 {
            return None;
        }
        if rows.is_empty() {
            return (limit >= (0, 0)).then_some(forced);
        }
        let blocks = self.blocks(&rows, &cols);
        if blocks.len() > 1 {
            let bounds: Vec<Cost> = blocks.iter().map(|b| self.lower_bound(b, &cols)).collect();
            let mut spent = (0, 0);
            let mut rest = bounds.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            let mut total = forced;
            for (block, bound) in blocks.into_iter().zip(bounds) {
                rest = sub(rest, bound);
                let part = self.solve(block, cols.clone(), sub(sub(limit, spent), rest))?;
                spent = (spent.0 + part.cost.0, spent.1 + part.cost.1);
                total = total.join(part);
            }
            return Some(total);
        }
        let mut limit = limit;
        if self.lower_bound(&rows, &cols) > limit {
            return None;
        }
        let pivot = rows
            .ones()
            .min_by_key(|&r| (count(&and(&self.covering[r], &cols)), r))
            .expect("rows is non-empty");
        let mut options: Vec<usize> = and(&self.covering[pivot], &cols).ones().collect();
        options.sort_by_key(|&p| (std::cmp::Reverse(count(&and(&self.masks[p], &rows))), self.costs[p], p));
        let mut best: Option<Solution> = None;
        for p in options {
            cols.clear(p);
            let inner = sub(limit, (1, self.costs[p]));
            if let Some(rest) = self.solve(rows.minus(&self.masks[p]), cols.clone(), inner) {
                let candidate = self.single(p).join(rest);
                if best.as_ref().is_none_or(|b| candidate < *b) {
                    limit = candidate.cost;
                    best = Some(candidate);
                }
            }
        }
        best.map(|b| forced.join(b))
    }
}

/// Exact cover of `rows` using `primes`.
fn cover_residue(n: usize, rows: &[u32], primes: &[Implicant]) -> Vec<Implicant> {
    if rows.is_empty() {
        return Vec::new();
    }
    // index primes in literal order so sorted indices compare like sorted
    // literal lists
    let mut primes = primes.to_vec();
    primes.sort_by_key(|p| p.literals(n));
    let masks: Vec<Bits> = primes
        .iter()
        .map(|p| {
            let mut b = Bits::empty(rows.len());
            for (i, &m) in rows.iter().enumerate() {
                if p.covers(m) {
                    b.set(i);
                }
            }
            b
        })
        .collect();
    let covering: Vec<Bits> = (0..rows.len())
        .map(|i| {
            let mut b = Bits::empty(primes.len());
            for (p, mask) in masks.iter().enumerate() {
                if mask.get(i) {
                    b.set(p);
                }
            }
            b
        })
        .collect();
    let search = CoverSearch {
        costs: primes.iter().map(|p| p.literal_count() as i64).collect(),
        masks,
        covering,
    };
    let best = search
        .solve(Bits::full(rows.len()), Bits::full(primes.len()), (i64::MAX, i64::MAX))
        .expect("every minterm has a covering prime");
    best.terms.iter().map(|&i| primes[i]).collect()
}

/// Minimum sum-of-products cover of `on_set`.
///
/// Exact: fewest terms, then fewest literals, then the lexicographically
/// smallest sorted list of term literals.
pub fn qm_minimize(variables: &[String], on_set: &[u32]) -> Result<Dnf, FormalismError> {
    let n = variables.len();
    if n == 0 {
        return Err(FormalismError::NoVariables);
    }
    if n > MAX_VARIABLES {
        return Err(FormalismError::TooManyVariables(n));
    }
    if let Some(&m) = on_set.iter().find(|&&m| m >= (1u32 << n)) {
        return Err(FormalismError::InvalidMinterm {
            minterm: m,
            variables: n,
        });
    }
    let on: BTreeSet<u32> = on_set.iter().copied().collect();
    let primes = prime_implicants(n, &on);
    let rows: Vec<u32> = on.iter().copied().collect();
    let mut cover = cover_residue(n, &rows, &primes);
    cover.sort_by_key(|i| i.literals(n));
    Ok(Dnf {
        variables: variables.to_vec(),
        implicants: cover,
    })
}

/// Truth table in the plain text format: a header line naming the variables,
/// then one line of 0/1 digits per true minterm. `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub variables: Vec<String>,
    pub minterms: Vec<u32>,
}

pub fn parse_truth_table(text: &str) -> Result<TruthTable, FormalismError> {
    let mut variables: Option<Vec<String>> = None;
    let mut minterms = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| FormalismError::TruthTable { line: i + 1, message };
        match &variables {
            None => {
                let vars: Vec<String> = line.split_whitespace().map(str::to_string).collect();
                if vars.len() > MAX_VARIABLES {
                    return Err(err(format!(
                        "{} variables exceed the limit of {MAX_VARIABLES}",
                        vars.len()
                    )));
                }
                if let Some(v) = vars
                    .iter()
                    .find(|v| !v.chars().all(|c| c.is_alphanumeric() || c == '_'))
                {
                    return Err(err(format!("invalid variable name `{v}`")));
                }
                let unique: BTreeSet<&String> = vars.iter().collect();
                if unique.len() != vars.len() {
                    return Err(err("duplicate variable in header".into()));
                }
                variables = Some(vars);
            }
            Some(vars) => {
                let bits: String = line.chars().filter(|c| !c.is_whitespace()).collect();
                if bits.len() != vars.len() {
                    return Err(err(format!("expected {} digits, found {}", vars.len(), bits.len())));
                }
                let mut m = 0u32;
                for c in bits.chars() {
                    m = (m << 1)
                        | match c {
                            '0' => 0,
                            '1' => 1,
                            other => return Err(err(format!("unexpected character `{other}`"))),
                        };
                }
                minterms.insert(m);
            }
        }
    }
    let variables = variables.ok_or(FormalismError::TruthTable {
        line: 0,
        message: "missing header line".into(),
    })?;
    Ok(TruthTable {
        variables,
        minterms: minterms.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    /// Simple majority of five votes, the chief (A) voting twice.
    fn surgery_on_set() -> Vec<u32> {
        (0..16u32)
            .filter(|m| {
                let (a, b, c, d) = ((m >> 3) & 1, (m >> 2) & 1, (m >> 1) & 1, m & 1);
                2 * a + b + c + d >= 3
            })
            .collect()
    }

    #[test]
    fn surgery_minimises_to_four_clusters() {
        assert_eq!(surgery_on_set(), vec![7, 9, 10, 11, 12, 13, 14, 15]);
        let dnf = qm_minimize(&vars(&["A", "B", "C", "D"]), &surgery_on_set()).unwrap();
        assert_eq!(dnf.to_string(), "A&B | A&C | A&D | B&C&D");
    }

    #[test]
    fn surgery_model_evaluation() {
        let model = BooleanCausalModel::new(
            &["A", "B", "C", "D"],
            Definition::Clusters(vec![
                vec![Literal::pos("A"), Literal::pos("B")],
                vec![Literal::pos("A"), Literal::pos("C")],
                vec![Literal::pos("A"), Literal::pos("D")],
                vec![Literal::pos("B"), Literal::pos("C"), Literal::pos("D")],
            ]),
        )
        .unwrap();
        let v = vars(&["A", "B", "C", "D"]);
        assert!(bool_evaluate(&model, &assignment_of(&v, 0b0111)).unwrap());
        assert!(!bool_evaluate(&model, &assignment_of(&v, 0b1000)).unwrap());
        assert!(!bool_evaluate(&model, &assignment_of(&v, 0)).unwrap());
        assert_eq!(model.on_set().unwrap(), surgery_on_set());
        let mut partial = assignment_of(&v, 3);
        partial.remove("C");
        assert!(matches!(
            bool_evaluate(&model, &partial),
            Err(FormalismError::MissingVariable(_))
        ));
    }

    #[test]
    fn formula_definition() {
        // (A and (B or C or D)) or (B and C and D)
        let f = Formula::Or(vec![
            Formula::And(vec![
                Formula::var("A"),
                Formula::Or(vec![Formula::var("B"), Formula::var("C"), Formula::var("D")]),
            ]),
            Formula::And(vec![Formula::var("B"), Formula::var("C"), Formula::var("D")]),
        ]);
        let model = BooleanCausalModel::new(&["A", "B", "C", "D"], Definition::Formula(f)).unwrap();
        assert_eq!(model.on_set().unwrap(), surgery_on_set());
        let bad = BooleanCausalModel::new(&["A"], Definition::Formula(Formula::var("Z")));
        assert!(matches!(bad, Err(FormalismError::UnknownVariable(_))));
        let empty = BooleanCausalModel::new(&["A"], Definition::Clusters(vec![vec![]]));
        assert!(matches!(empty, Err(FormalismError::EmptyCluster)));
    }

    #[test]
    fn constants() {
        let v = vars(&["A", "B", "C"]);
        let all: Vec<u32> = (0..8).collect();
        let taut = qm_minimize(&v, &all).unwrap();
        assert_eq!(taut.implicants, vec![Implicant { value: 0, care: 0 }]);
        assert_eq!(taut.to_string(), "1");
        let none = qm_minimize(&v, &[]).unwrap();
        assert!(none.implicants.is_empty());
        assert_eq!(none.to_string(), "0");
        assert!(matches!(qm_minimize(&[], &[]), Err(FormalismError::NoVariables)));
        assert!(matches!(
            qm_minimize(&v, &[8]),
            Err(FormalismError::InvalidMinterm { .. })
        ));
    }

    #[test]
    fn cyclic_core_needs_search() {
        // classic cyclic function with no essential primes
        let v = vars(&["A", "B", "C"]);
        let on = [0, 1, 2, 5, 6, 7];
        let dnf = qm_minimize(&v, &on).unwrap();
        assert_eq!(dnf.implicants.len(), 3);
        for m in 0..8 {
            assert_eq!(dnf.evaluate(m), on.contains(&m));
        }
    }

    #[test]
    fn negated_literals_print() {
        let v = vars(&["A", "B"]);
        assert_eq!(qm_minimize(&v, &[1]).unwrap().to_string(), "!A&B");
    }

    #[test]
    fn truth_table_text() {
        let tt = parse_truth_table("# surgery\nA B C D\n0111\n1 0 0 1\n1001\n").unwrap();
        assert_eq!(tt.variables, vars(&["A", "B", "C", "D"]));
        assert_eq!(tt.minterms, vec![7, 9]);
        assert!(parse_truth_table("A B\n011\n").is_err());
        assert!(parse_truth_table("A B\n0x\n").is_err());
        assert!(parse_truth_table("").is_err());
        assert!(parse_truth_table("A A\n").is_err());
    }
}
