use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// `n` variables named `a_{i}`.
    Vector(usize),
    /// `n²` variables named `a_{i,j}` with flat index `n·i + j`.
    Matrix(usize),
}

/// Bijection between variable names and flat indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarTable {
    symbol: char,
    layout: Layout,
}

impl VarTable {
    pub fn vector(symbol: char, n: usize) -> Self {
        VarTable {
            symbol,
            layout: Layout::Vector(n),
        }
    }

    pub fn matrix(symbol: char, n: usize) -> Self {
        VarTable {
            symbol,
            layout: Layout::Matrix(n),
        }
    }

    pub fn symbol(&self) -> char {
        self.symbol
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn len(&self) -> usize {
        match self.layout {
            Layout::Vector(n) => n,
            Layout::Matrix(n) => n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        match self.layout {
            Layout::Vector(_) => panic!("vector layout has a single index"),
            Layout::Matrix(n) => n * i + j,
        }
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        match self.layout {
            Layout::Vector(_) => (v, 0),
            Layout::Matrix(n) => (v / n, v % n),
        }
    }

    pub fn name(&self, v: usize) -> String {
        match self.layout {
            Layout::Vector(_) => format!("{}_{{{}}}", self.symbol, v),
            Layout::Matrix(n) => format!("{}_{{{},{}}}", self.symbol, v / n, v % n),
        }
    }

    /// Inverse of [`VarTable::name`].
    pub fn lookup(&self, name: &str) -> Result<usize> {
        let bad = || Error::Domain(format!("unknown variable name `{name}`"));
        let (sym, idx) = split_name(name).ok_or_else(bad)?;
        if sym != self.symbol {
            return Err(bad());
        }
        let v = match (self.layout, idx.as_slice()) {
            (Layout::Vector(n), &[i]) if i < n => i,
            (Layout::Matrix(n), &[i, j]) if i < n && j < n => n * i + j,
            _ => return Err(bad()),
        };
        Ok(v)
    }
}

/// Split `s_{i}` / `s_{i,j}` into its symbol and indices.
pub(crate) fn split_name(name: &str) -> Option<(char, Vec<usize>)> {
    let mut chars = name.chars();
    let sym = chars.next()?;
    let rest = chars.as_str().strip_prefix("_{")?.strip_suffix('}')?;
    let idx = rest
        .split(',')
        .map(|t| t.trim().parse::<usize>().ok())
        .collect::<Option<Vec<_>>>()?;
    if idx.is_empty() || idx.len() > 2 || !sym.is_ascii_alphabetic() {
        return None;
    }
    Some((sym, idx))
}
