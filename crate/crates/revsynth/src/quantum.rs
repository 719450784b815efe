//! Exact unitary arithmetic over the primitive set {NOT, CNOT, Controlled-V,
//! Controlled-V†}.
//!
//! Every entry is a Gaussian dyadic rational `(a + b·i) / 2^e`, so unitary
//! equality is decided with zero tolerance. This is the independent oracle
//! behind every quantum-cost claim in the toolkit: a stored decomposition is
//! accepted only if its exact matrix product equals the gate's permutation
//! matrix entry for entry.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::gate::GateSpec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuantumError {
    #[error("line index {index} out of range for width {width}")]
    LineOutOfRange { index: usize, width: usize },
    #[error("control and target must differ (both {0})")]
    ControlIsTarget(usize),
    #[error("search supports widths up to 3, got {0}")]
    WidthUnsupported(usize),
    #[error("search supports max_len up to 6, got {0}")]
    DepthUnsupported(usize),
}

/// A Gaussian dyadic rational `(re + im·i) / 2^exp` in canonical form:
/// `exp` is minimal (re and im are not both even unless exp is 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    re: i64,
    im: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { re: 0, im: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { re: 1, im: 0, exp: 0 };

    pub fn new(re: i64, im: i64, exp: u32) -> Dyadic {
        Dyadic { re, im, exp }.canonical()
    }

    fn canonical(mut self) -> Dyadic {
        if self.re == 0 && self.im == 0 {
            self.exp = 0;
            return self;
        }
        while self.exp > 0 && self.re % 2 == 0 && self.im % 2 == 0 {
            self.re /= 2;
            self.im /= 2;
            self.exp -= 1;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let e = self.exp.max(other.exp);
        let sa = 1i64 << (e - self.exp);
        let sb = 1i64 << (e - other.exp);
        Dyadic::new(self.re * sa + other.re * sb, self.im * sa + other.im * sb, e)
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
            self.exp + other.exp,
        )
    }

    pub fn conj(&self) -> Dyadic {
        Dyadic { re: self.re, im: -self.im, exp: self.exp }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}{:+}i", self.re, self.im)
        } else {
            write!(f, "({}{:+}i)/{}", self.re, self.im, 1u64 << self.exp)
        }
    }
}

/// Dense `2^k × 2^k` matrix of [`Dyadic`] entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactUnitary {
    dim: usize,
    entries: Vec<Dyadic>,
}

impl ExactUnitary {
    pub fn identity(dim: usize) -> ExactUnitary {
        let mut u = ExactUnitary { dim, entries: vec![Dyadic::ZERO; dim * dim] };
        for i in 0..dim {
            u.set(i, i, Dyadic::ONE);
        }
        u
    }

    /// 0/1 permutation matrix: column `c` maps to row `perm[c]`.
    pub fn from_permutation(perm: &[u32]) -> ExactUnitary {
        let dim = perm.len();
        let mut u = ExactUnitary { dim, entries: vec![Dyadic::ZERO; dim * dim] };
        for (c, &r) in perm.iter().enumerate() {
            u.set(r as usize, c, Dyadic::ONE);
        }
        u
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Dyadic {
        self.entries[row * self.dim + col]
    }

    fn set(&mut self, row: usize, col: usize, v: Dyadic) {
        self.entries[row * self.dim + col] = v;
    }

    /// `self * other` (matrix product).
    pub fn mul(&self, other: &ExactUnitary) -> ExactUnitary {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut out = ExactUnitary { dim, entries: vec![Dyadic::ZERO; dim * dim] };
        for r in 0..dim {
            for k in 0..dim {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..dim {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    out.set(r, c, out.get(r, c).add(&a.mul(&b)));
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ExactUnitary {
        let dim = self.dim;
        let mut out = ExactUnitary { dim, entries: vec![Dyadic::ZERO; dim * dim] };
        for r in 0..dim {
            for c in 0..dim {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        *self == ExactUnitary::identity(self.dim)
    }

    /// Exact check of `U · U† = I`.
    pub fn is_unitary(&self) -> bool {
        self.mul(&self.dagger()).is_identity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimitiveKind {
    Not,
    Cnot,
    Cv,
    Cvdag,
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PrimitiveKind::Not => "not",
            PrimitiveKind::Cnot => "cnot",
            PrimitiveKind::Cv => "cv",
            PrimitiveKind::Cvdag => "cv+",
        };
        f.write_str(s)
    }
}

/// One 1×1 or 2×2 quantum primitive bound to circuit lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimitiveOp {
    pub kind: PrimitiveKind,
    pub control: Option<usize>,
    pub target: usize,
}

impl PrimitiveOp {
    pub fn not(target: usize) -> PrimitiveOp {
        PrimitiveOp { kind: PrimitiveKind::Not, control: None, target }
    }

    pub fn cnot(control: usize, target: usize) -> PrimitiveOp {
        PrimitiveOp { kind: PrimitiveKind::Cnot, control: Some(control), target }
    }

    pub fn cv(control: usize, target: usize) -> PrimitiveOp {
        PrimitiveOp { kind: PrimitiveKind::Cv, control: Some(control), target }
    }

    pub fn cvdag(control: usize, target: usize) -> PrimitiveOp {
        PrimitiveOp { kind: PrimitiveKind::Cvdag, control: Some(control), target }
    }

    pub fn lines(&self) -> impl Iterator<Item = usize> {
        self.control.into_iter().chain(std::iter::once(self.target))
    }
}

impl fmt::Display for PrimitiveOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.control {
            Some(c) => write!(f, "{}({},{})", self.kind, c, self.target),
            None => write!(f, "{}({})", self.kind, self.target),
        }
    }
}

/// V = ½ [[1+i, 1−i], [1−i, 1+i]]; V² = NOT.
fn v_matrix() -> [[Dyadic; 2]; 2] {
    let p = Dyadic::new(1, 1, 1);
    let m = Dyadic::new(1, -1, 1);
    [[p, m], [m, p]]
}

/// V† (hermitian of V); V·V† = I.
fn vdag_matrix() -> [[Dyadic; 2]; 2] {
    let p = Dyadic::new(1, 1, 1);
    let m = Dyadic::new(1, -1, 1);
    [[m, p], [p, m]]
}

fn check_op(op: &PrimitiveOp, width: usize) -> Result<(), QuantumError> {
    if op.target >= width {
        return Err(QuantumError::LineOutOfRange { index: op.target, width });
    }
    if let Some(c) = op.control {
        if c >= width {
            return Err(QuantumError::LineOutOfRange { index: c, width });
        }
        if c == op.target {
            return Err(QuantumError::ControlIsTarget(c));
        }
    }
    Ok(())
}

/// Embedding of `op` into a `2^width`-dimensional unitary. Line 0 is the
/// most significant bit of basis-state indices, matching the gate tables.
pub fn primitive_unitary(op: &PrimitiveOp, width: usize) -> Result<ExactUnitary, QuantumError> {
    check_op(op, width)?;
    let dim = 1usize << width;
    let tmask = 1usize << (width - 1 - op.target);
    let cmask = op.control.map(|c| 1usize << (width - 1 - c));
    let mut u = ExactUnitary { dim, entries: vec![Dyadic::ZERO; dim * dim] };
    for col in 0..dim {
        let active = cmask.map_or(true, |m| col & m != 0);
        if !active {
            u.set(col, col, Dyadic::ONE);
            continue;
        }
        match op.kind {
            PrimitiveKind::Not | PrimitiveKind::Cnot => {
                u.set(col ^ tmask, col, Dyadic::ONE);
            }
            PrimitiveKind::Cv | PrimitiveKind::Cvdag => {
                let v = if op.kind == PrimitiveKind::Cv { v_matrix() } else { vdag_matrix() };
                let t_in = usize::from(col & tmask != 0);
                u.set(col & !tmask, col, v[0][t_in]);
                u.set(col | tmask, col, v[1][t_in]);
            }
        }
    }
    Ok(u)
}

/// Exact product of the sequence, first op acting first.
pub fn sequence_unitary(ops: &[PrimitiveOp], width: usize) -> Result<ExactUnitary, QuantumError> {
    let mut acc = ExactUnitary::identity(1 << width);
    for op in ops {
        acc = primitive_unitary(op, width)?.mul(&acc);
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Mismatch,
    Absent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Verified => "verified",
            Verdict::Mismatch => "mismatch",
            Verdict::Absent => "absent",
        };
        f.write_str(s)
    }
}

/// Checks the gate's stored decomposition against its permutation matrix,
/// entry-exact, and that its length equals the declared quantum cost.
pub fn verify_decomposition(spec: &GateSpec) -> Verdict {
    let ops = match &spec.decomposition {
        Some(ops) => ops,
        None => return Verdict::Absent,
    };
    let product = match sequence_unitary(ops, spec.width) {
        Ok(u) => u,
        Err(_) => return Verdict::Mismatch,
    };
    if product == ExactUnitary::from_permutation(&spec.permutation)
        && ops.len() as u64 == spec.quantum_cost
    {
        Verdict::Verified
    } else {
        Verdict::Mismatch
    }
}

/// All primitives on `width` lines in lexicographic (kind, control, target)
/// order; this fixes the search tie-break.
pub fn all_ops(width: usize) -> Vec<PrimitiveOp> {
    let mut ops = Vec::new();
    for t in 0..width {
        ops.push(PrimitiveOp::not(t));
    }
    for kind in [PrimitiveKind::Cnot, PrimitiveKind::Cv, PrimitiveKind::Cvdag] {
        for c in 0..width {
            for t in 0..width {
                if c != t {
                    ops.push(PrimitiveOp { kind, control: Some(c), target: t });
                }
            }
        }
    }
    ops.sort();
    ops
}

/// Enumerates all op sequences of length exactly `len` in lexicographic
/// order, calling `visit` with (op indices, product unitary).
fn enumerate(
    len: usize,
    op_mats: &[ExactUnitary],
    width: usize,
    visit: &mut dyn FnMut(&[usize], &ExactUnitary),
) {
    fn rec(
        depth: usize,
        len: usize,
        op_mats: &[ExactUnitary],
        stack: &mut Vec<usize>,
        product: &ExactUnitary,
        visit: &mut dyn FnMut(&[usize], &ExactUnitary),
    ) {
        if depth == len {
            visit(stack, product);
            return;
        }
        for (i, m) in op_mats.iter().enumerate() {
            stack.push(i);
            let next = m.mul(product);
            rec(depth + 1, len, op_mats, stack, &next, visit);
            stack.pop();
        }
    }
    let id = ExactUnitary::identity(1 << width);
    rec(0, len, op_mats, &mut Vec::new(), &id, visit);
}

/// Meet-in-the-middle search for a shortest primitive sequence realizing the
/// target permutation, up to `max_len`. Complete: `None` means no sequence of
/// length ≤ `max_len` exists in the primitive set. Deterministic: the
/// lexicographically smallest shortest sequence is returned.
pub fn search_min_decomposition(
    target: &GateSpec,
    max_len: usize,
) -> Result<Option<Vec<PrimitiveOp>>, QuantumError> {
    if target.width > 3 {
        return Err(QuantumError::WidthUnsupported(target.width));
    }
    if max_len > 6 {
        return Err(QuantumError::DepthUnsupported(max_len));
    }
    let width = target.width;
    let goal = ExactUnitary::from_permutation(&target.permutation);
    let ops = all_ops(width);
    let op_mats: Vec<ExactUnitary> =
        ops.iter().map(|o| primitive_unitary(o, width).unwrap()).collect();

    // suffix_tables[b]: product-of-suffix → lex-smallest suffix of length b
    let mut suffix_tables: Vec<HashMap<ExactUnitary, Vec<usize>>> = Vec::new();
    for total in 0..=max_len {
        let b = total / 2;
        let a = total - b;
        while suffix_tables.len() <= b {
            let len = suffix_tables.len();
            let mut table = HashMap::new();
            enumerate(len, &op_mats, width, &mut |seq, product| {
                table.entry(product.clone()).or_insert_with(|| seq.to_vec());
            });
            suffix_tables.push(table);
        }
        let table = &suffix_tables[b];
        let mut found: Option<Vec<usize>> = None;
        enumerate(a, &op_mats, width, &mut |prefix, product| {
            if found.is_some() {
                return;
            }
            let needed = goal.mul(&product.dagger());
            if let Some(suffix) = table.get(&needed) {
                let mut seq = prefix.to_vec();
                seq.extend_from_slice(suffix);
                found = Some(seq);
            }
        });
        if let Some(seq) = found {
            return Ok(Some(seq.into_iter().map(|i| ops[i]).collect()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::builtin_gate;

    #[test]
    fn not_unitary_is_pauli_x() {
        let u = primitive_unitary(&PrimitiveOp::not(0), 1).unwrap();
        assert_eq!(u, ExactUnitary::from_permutation(&[1, 0]));
    }

    #[test]
    fn cv_squared_is_cnot() {
        for (c, t) in [(0, 1), (1, 0), (0, 2), (2, 1)] {
            let cv = [PrimitiveOp::cv(c, t), PrimitiveOp::cv(c, t)];
            let cvd = [PrimitiveOp::cvdag(c, t), PrimitiveOp::cvdag(c, t)];
            let cnot = sequence_unitary(&[PrimitiveOp::cnot(c, t)], 3).unwrap();
            assert_eq!(sequence_unitary(&cv, 3).unwrap(), cnot);
            assert_eq!(sequence_unitary(&cvd, 3).unwrap(), cnot);
        }
    }

    #[test]
    fn cv_then_cvdag_is_identity() {
        let seq = [PrimitiveOp::cv(0, 1), PrimitiveOp::cvdag(0, 1)];
        assert!(sequence_unitary(&seq, 2).unwrap().is_identity());
    }

    #[test]
    fn empty_sequence_is_identity() {
        assert!(sequence_unitary(&[], 3).unwrap().is_identity());
    }

    #[test]
    fn invalid_indices_rejected() {
        assert_eq!(
            primitive_unitary(&PrimitiveOp::cnot(0, 3), 3),
            Err(QuantumError::LineOutOfRange { index: 3, width: 3 })
        );
        assert_eq!(
            primitive_unitary(&PrimitiveOp::cv(1, 1), 3),
            Err(QuantumError::ControlIsTarget(1))
        );
    }

    #[test]
    fn stored_decompositions_verify() {
        for name in ["not", "fg", "dfg", "tg", "pg"] {
            let spec = builtin_gate(name).unwrap();
            assert_eq!(verify_decomposition(&spec), Verdict::Verified, "{name}");
        }
    }

    #[test]
    fn truncated_toffoli_mismatches() {
        let mut spec = builtin_gate("tg").unwrap();
        let ops = spec.decomposition.take().unwrap();
        spec.decomposition = Some(ops[..4].to_vec());
        assert_eq!(verify_decomposition(&spec), Verdict::Mismatch);
    }

    #[test]
    fn absent_decomposition() {
        let spec = builtin_gate("frg").unwrap();
        assert_eq!(verify_decomposition(&spec), Verdict::Absent);
    }

    #[test]
    fn search_recovers_feynman() {
        let spec = builtin_gate("fg").unwrap();
        let seq = search_min_decomposition(&spec, 2).unwrap().unwrap();
        assert_eq!(seq, vec![PrimitiveOp::cnot(0, 1)]);
    }

    #[test]
    fn search_identity_is_empty() {
        let mut spec = builtin_gate("tg").unwrap();
        spec.permutation = (0..8).collect();
        let seq = search_min_decomposition(&spec, 3).unwrap().unwrap();
        assert!(seq.is_empty());
    }
}
