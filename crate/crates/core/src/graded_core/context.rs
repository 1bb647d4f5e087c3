use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A coordinate of the chart together with its total degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub degree: i32,
}

impl Variable {
    pub fn new(name: impl Into<String>, degree: i32) -> Self {
        Variable { name: name.into(), degree }
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }

    pub fn is_base(&self) -> bool {
        self.degree == 0
    }

    /// Contribution of one factor of this variable to the negative degree.
    pub fn negative_degree(&self) -> u32 {
        if self.degree < 0 {
            (-self.degree) as u32
        } else {
            0
        }
    }

    pub fn positive_degree(&self) -> u32 {
        if self.degree > 0 {
            self.degree as u32
        } else {
            0
        }
    }
}

/// The chart: ordered graded coordinates plus the truncation window.
///
/// Terms whose degree-0 content exceeds `jet_order`, or whose negative
/// degree reaches `filtration_order`, are outside the window and get
/// discarded by truncating operations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedContext {
    variables: Vec<Variable>,
    jet_order: u32,
    filtration_order: u32,
}

pub type Ctx = Arc<GradedContext>;

impl GradedContext {
    pub fn new(variables: Vec<Variable>, jet_order: u32, filtration_order: u32) -> Result<Ctx> {
        if filtration_order == 0 {
            return Err(Error::InvalidContext("filtration order must be at least 1".into()));
        }
        for (i, v) in variables.iter().enumerate() {
            if v.name.is_empty() {
                return Err(Error::InvalidContext("empty variable name".into()));
            }
            if variables[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidContext(format!("duplicate variable `{}`", v.name)));
            }
        }
        Ok(Arc::new(GradedContext { variables, jet_order, filtration_order }))
    }

    /// Convenience constructor from `(name, degree)` pairs.
    pub fn from_pairs(pairs: &[(&str, i32)], jet_order: u32, filtration_order: u32) -> Result<Ctx> {
        Self::new(
            pairs.iter().map(|(n, d)| Variable::new(*n, *d)).collect(),
            jet_order,
            filtration_order,
        )
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variable(&self, index: usize) -> &Variable {
        &self.variables[index]
    }

    pub fn degree(&self, index: usize) -> i32 {
        self.variables[index].degree
    }

    pub fn jet_order(&self) -> u32 {
        self.jet_order
    }

    pub fn filtration_order(&self) -> u32 {
        self.filtration_order
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn try_index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn base_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.variables[i].is_base()).collect()
    }

    pub fn indices_of_degree(&self, degree: i32) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.variables[i].degree == degree).collect()
    }

    /// Same coordinates, different truncation window.
    pub fn with_orders(&self, jet_order: u32, filtration_order: u32) -> Ctx {
        Arc::new(GradedContext {
            variables: self.variables.clone(),
            jet_order,
            filtration_order: filtration_order.max(1),
        })
    }

    /// Appends variables; fails on a name collision.
    pub fn extended(&self, extra: &[Variable]) -> Result<Ctx> {
        let mut vars = self.variables.clone();
        vars.extend_from_slice(extra);
        Self::new(vars, self.jet_order, self.filtration_order)
    }

    /// Keeps only the listed variables, in their current order.
    pub fn restricted(&self, keep: &[usize]) -> Ctx {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        Arc::new(GradedContext {
            variables: keep.iter().map(|&i| self.variables[i].clone()).collect(),
            jet_order: self.jet_order,
            filtration_order: self.filtration_order,
        })
    }

    pub fn same_variables(&self, other: &GradedContext) -> bool {
        self.variables == other.variables
    }
}

impl fmt::Display for GradedContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self
            .variables
            .iter()
            .map(|v| format!("{}:{}", v.name, v.degree))
            .collect();
        write!(f, "[{}] jet={} filt={}", vars.join(", "), self.jet_order, self.filtration_order)
    }
}

pub(crate) fn ensure_same(a: &Ctx, b: &Ctx) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::ContextMismatch)
    }
}
