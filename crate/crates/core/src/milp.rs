//! Solver-agnostic mixed-integer linear model (minimization) and a
//! feasibility / integrality auditor for candidate assignments.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default tolerance for row violations and integrality.
pub const AUDIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// A linear row. Terms are sorted by column, merged and free of zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `activity` misses the row, `0` if satisfied.
    pub fn violation(&self, activity: f64) -> f64 {
        match self.relation {
            Relation::Le => (activity - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - activity).max(0.0),
            Relation::Eq => (activity - self.rhs).abs(),
        }
    }
}

/// `minimize c·x + c0` subject to linear rows, bounds and integrality.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MilpModel {
    variables: Vec<Variable>,
    names: BTreeMap<String, VarId>,
    objective: Vec<f64>,
    objective_constant: f64,
    constraints: Vec<Constraint>,
    row_names: BTreeMap<String, usize>,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<VarId> {
        self.add_variable(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<VarId> {
        self.add_variable(name, VarKind::Continuous, lower, upper)
    }

    pub fn add_variable(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> Result<VarId> {
        let name = name.into();
        if self.names.contains_key(&name) {
            return Err(Error::InvalidModel(format!("duplicate variable name {name}")));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::InvalidModel(format!("inconsistent bounds [{lower}, {upper}] for {name}")));
        }
        if kind == VarKind::Binary && (lower != 0.0 || upper != 1.0) {
            return Err(Error::InvalidModel(format!("binary {name} must have bounds [0, 1]")));
        }
        let id = VarId(self.variables.len());
        self.names.insert(name.clone(), id);
        self.variables.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        self.objective.push(0.0);
        Ok(id)
    }

    pub fn set_objective(&mut self, var: VarId, coefficient: f64) {
        self.objective[var.0] = coefficient;
    }

    pub fn add_objective(&mut self, var: VarId, coefficient: f64) {
        self.objective[var.0] += coefficient;
    }

    pub fn set_objective_constant(&mut self, c: f64) {
        self.objective_constant = c;
    }

    /// Adds a row; duplicate columns are merged and zero coefficients dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize> {
        let name = name.into();
        if self.row_names.contains_key(&name) {
            return Err(Error::InvalidModel(format!("duplicate constraint name {name}")));
        }
        if !rhs.is_finite() {
            return Err(Error::InvalidModel(format!("row {name} has non-finite right-hand side")));
        }
        let mut merged: BTreeMap<VarId, f64> = BTreeMap::new();
        for (v, c) in terms {
            if v.0 >= self.variables.len() {
                return Err(Error::InvalidModel(format!("row {name} references unknown column {}", v.0)));
            }
            if !c.is_finite() {
                return Err(Error::InvalidModel(format!("row {name} has a non-finite coefficient")));
            }
            *merged.entry(v).or_insert(0.0) += c;
        }
        let terms = merged.into_iter().filter(|&(_, c)| c != 0.0).collect();
        let idx = self.constraints.len();
        self.row_names.insert(name.clone(), idx);
        self.constraints.push(Constraint {
            name,
            terms,
            relation,
            rhs,
        });
        Ok(idx)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn objective_constant(&self) -> f64 {
        self.objective_constant
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint_by_name(&self, name: &str) -> Option<&Constraint> {
        self.row_names.get(name).map(|&i| &self.constraints[i])
    }

    pub fn objective_value(&self, values: &[f64]) -> Result<f64> {
        self.check_len(values)?;
        Ok(self.objective_constant + self.objective.iter().zip(values).map(|(c, x)| c * x).sum::<f64>())
    }

    /// Re-checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        for v in &self.variables {
            if v.lower > v.upper {
                return Err(Error::InvalidModel(format!("variable {} has lower > upper", v.name)));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) || !self.objective_constant.is_finite() {
            return Err(Error::InvalidModel("non-finite objective coefficient".into()));
        }
        Ok(())
    }

    /// Dense assignment from `(name, value)` pairs; absent columns are 0.
    pub fn assignment_from_pairs<'a>(&self, pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Vec<f64>> {
        let mut out = alloc::vec![0.0; self.variables.len()];
        for (name, value) in pairs {
            let id = self
                .var_by_name(name)
                .ok_or_else(|| Error::Audit(format!("unknown variable {name}")))?;
            out[id.0] = value;
        }
        Ok(out)
    }

    /// Lists every row violated beyond `tol`, every bound violation and
    /// every binary further than `tol` from `{0, 1}`.
    pub fn audit_feasibility(&self, values: &[f64], tol: f64) -> Result<AuditReport> {
        self.check_len(values)?;
        let mut report = AuditReport::default();
        for (j, (var, &x)) in self.variables.iter().zip(values).enumerate() {
            if !x.is_finite() {
                report.bound_violations.push(BoundViolation {
                    var: VarId(j),
                    name: var.name.clone(),
                    value: x,
                });
                continue;
            }
            if x < var.lower - tol || x > var.upper + tol {
                report.bound_violations.push(BoundViolation {
                    var: VarId(j),
                    name: var.name.clone(),
                    value: x,
                });
            }
            if var.kind == VarKind::Binary && x.abs().min((1.0 - x).abs()) > tol {
                report.non_integral.push(BoundViolation {
                    var: VarId(j),
                    name: var.name.clone(),
                    value: x,
                });
            }
        }
        for (r, row) in self.constraints.iter().enumerate() {
            let activity = row.activity(values);
            let amount = row.violation(activity);
            if amount > tol {
                report.violated_rows.push(RowViolation {
                    row: r,
                    name: row.name.clone(),
                    activity,
                    relation: row.relation,
                    rhs: row.rhs,
                    amount,
                });
            }
        }
        Ok(report)
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.variables.len() {
            return Err(Error::Audit(format!(
                "assignment covers {} columns, model has {}",
                values.len(),
                self.variables.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowViolation {
    pub row: usize,
    pub name: String,
    pub activity: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub var: VarId,
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    pub violated_rows: Vec<RowViolation>,
    pub bound_violations: Vec<BoundViolation>,
    pub non_integral: Vec<BoundViolation>,
}

impl AuditReport {
    pub fn is_feasible(&self) -> bool {
        self.violated_rows.is_empty() && self.bound_violations.is_empty() && self.non_integral.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.violated_rows.len() + self.bound_violations.len() + self.non_integral.len()
    }
}
