//! Named and de Bruijn syntax for the embedded HF first-order language.
//!
//! Terms are built from `0`, variables and the eats operator; formulas from
//! membership, equality, disjunction, negation and the existential quantifier.
//! Bound variables carry names in the front-end syntax ([`Formula`]) and are
//! positional in the coding syntax ([`DbFormula`]). Equality on these types is
//! structural; public contracts compare formulas with [`alpha_eq`].
//!
//! Subtrees are reference-counted and shared aggressively: substitution
//! returns the original node whenever a subtree is unaffected, and the
//! quotation machinery in the coding layer relies on this to keep
//! exponentially self-similar terms linear in memory.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

/// A variable name; in bijection with the naturals.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(pub u32);

impl Name {
    pub fn nat_of_name(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Smallest name whose id is not in the avoid set.
pub fn fresh_name(avoid: &[Name]) -> Name {
    let used: HashSet<u32> = avoid.iter().map(|n| n.0).collect();
    let mut id = 0u32;
    while used.contains(&id) {
        id += 1;
    }
    Name(id)
}

/// Fresh names, distinct from each other and the avoid set.
pub fn fresh_names(avoid: &[Name], count: usize) -> Vec<Name> {
    let mut used: HashSet<u32> = avoid.iter().map(|n| n.0).collect();
    let mut out = Vec::with_capacity(count);
    let mut id = 0u32;
    while out.len() < count {
        if !used.contains(&id) {
            used.insert(id);
            out.push(Name(id));
        }
        id += 1;
    }
    out
}

fn union_names(parts: &[&[Name]]) -> Box<[Name]> {
    let mut v: Vec<Name> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    v.sort();
    v.dedup();
    v.into_boxed_slice()
}

fn remove_name(names: &[Name], n: Name) -> Box<[Name]> {
    names.iter().copied().filter(|m| *m != n).collect()
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn mix(h: u64, x: u64) -> u64 {
    let mut h = h;
    for b in x.to_le_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub enum TermKind {
    Zero,
    Var(Name),
    Eats(Term, Term),
}

#[derive(Debug)]
pub struct TermNode {
    kind: TermKind,
    fvs: Box<[Name]>,
    hash: u64,
}

#[derive(Clone, Debug)]
pub struct Term(Arc<TermNode>);

impl Term {
    pub fn zero() -> Term {
        Term(Arc::new(TermNode {
            kind: TermKind::Zero,
            fvs: Box::new([]),
            hash: mix(FNV_OFFSET, 1),
        }))
    }

    pub fn var(n: Name) -> Term {
        Term(Arc::new(TermNode {
            kind: TermKind::Var(n),
            fvs: Box::new([n]),
            hash: mix(mix(FNV_OFFSET, 2), n.0 as u64),
        }))
    }

    pub fn eats(t: Term, u: Term) -> Term {
        let fvs = union_names(&[&t.0.fvs, &u.0.fvs]);
        let hash = mix(mix(mix(FNV_OFFSET, 3), t.0.hash), u.0.hash);
        Term(Arc::new(TermNode {
            kind: TermKind::Eats(t, u),
            fvs,
            hash,
        }))
    }

    /// SUCC t = t ◁ t; on ordinal terms this is the successor.
    pub fn succ(t: Term) -> Term {
        Term::eats(t.clone(), t)
    }

    /// ORD_OF n as a term, with children shared so the tree stays a DAG.
    pub fn ord_of(n: usize) -> Term {
        let mut t = Term::zero();
        for _ in 0..n {
            t = Term::succ(t);
        }
        t
    }

    /// HPair t u = {{t},{t,u}} spelled with eats.
    pub fn hpair(t: Term, u: Term) -> Term {
        let zero = Term::zero();
        let st = Term::eats(zero.clone(), t);
        // {t,u} = (0 ◁ t) ◁ u
        let stu = Term::eats(st.clone(), u);
        Term::eats(Term::eats(zero, st), stu)
    }

    pub fn htuple(n: usize) -> Term {
        let zero = Term::zero();
        let mut t = Term::hpair(zero.clone(), zero.clone());
        for _ in 0..n {
            t = Term::hpair(zero.clone(), t);
        }
        t
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn free_vars(&self) -> &[Name] {
        &self.0.fvs
    }

    pub fn is_ground(&self) -> bool {
        self.0.fvs.is_empty()
    }

    pub fn has_free(&self, n: Name) -> bool {
        self.0.fvs.binary_search(&n).is_ok()
    }

    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn struct_hash(&self) -> u64 {
        self.0.hash
    }

    /// Node count of the tree, saturating at `u64::MAX`.
    pub fn tree_size(&self) -> u64 {
        let mut memo = std::collections::HashMap::new();
        fn go(t: &Term, memo: &mut std::collections::HashMap<usize, u64>) -> u64 {
            if let Some(&s) = memo.get(&t.ptr_id()) {
                return s;
            }
            let s = match t.kind() {
                TermKind::Zero | TermKind::Var(_) => 1,
                TermKind::Eats(a, b) => 1u64.saturating_add(go(a, memo)).saturating_add(go(b, memo)),
            };
            memo.insert(t.ptr_id(), s);
            s
        }
        go(self, &mut memo)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (&self.0.kind, &other.0.kind) {
            (TermKind::Zero, TermKind::Zero) => true,
            (TermKind::Var(a), TermKind::Var(b)) => a == b,
            (TermKind::Eats(a1, a2), TermKind::Eats(b1, b2)) => a1 == b1 && a2 == b2,
            _ => false,
        }
    }
}
impl Eq for Term {}

impl std::hash::Hash for Term {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

/// Replaces every occurrence of `Var i` in `t` by `x`.
pub fn subst_tm(i: Name, x: &Term, t: &Term) -> Term {
    if !t.has_free(i) {
        return t.clone();
    }
    match t.kind() {
        TermKind::Zero => t.clone(),
        TermKind::Var(k) => {
            if *k == i {
                x.clone()
            } else {
                t.clone()
            }
        }
        TermKind::Eats(a, b) => Term::eats(subst_tm(i, x, a), subst_tm(i, x, b)),
    }
}

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub enum FormulaKind {
    Mem(Term, Term),
    Eq(Term, Term),
    Disj(Formula, Formula),
    Neg(Formula),
    Ex(Name, Formula),
}

#[derive(Debug)]
pub struct FormulaNode {
    kind: FormulaKind,
    fvs: Box<[Name]>,
    hash: u64,
}

#[derive(Clone, Debug)]
pub struct Formula(Arc<FormulaNode>);

impl Formula {
    pub fn mem(t: Term, u: Term) -> Formula {
        let fvs = union_names(&[t.free_vars(), u.free_vars()]);
        let hash = mix(mix(mix(FNV_OFFSET, 10), t.0.hash), u.0.hash);
        Formula(Arc::new(FormulaNode {
            kind: FormulaKind::Mem(t, u),
            fvs,
            hash,
        }))
    }

    pub fn eq(t: Term, u: Term) -> Formula {
        let fvs = union_names(&[t.free_vars(), u.free_vars()]);
        let hash = mix(mix(mix(FNV_OFFSET, 11), t.0.hash), u.0.hash);
        Formula(Arc::new(FormulaNode {
            kind: FormulaKind::Eq(t, u),
            fvs,
            hash,
        }))
    }

    pub fn disj(a: Formula, b: Formula) -> Formula {
        let fvs = union_names(&[&a.0.fvs, &b.0.fvs]);
        let hash = mix(mix(mix(FNV_OFFSET, 12), a.0.hash), b.0.hash);
        Formula(Arc::new(FormulaNode {
            kind: FormulaKind::Disj(a, b),
            fvs,
            hash,
        }))
    }

    pub fn neg(a: Formula) -> Formula {
        let fvs = a.0.fvs.clone();
        let hash = mix(mix(FNV_OFFSET, 13), a.0.hash);
        Formula(Arc::new(FormulaNode {
            kind: FormulaKind::Neg(a),
            fvs,
            hash,
        }))
    }

    pub fn ex(i: Name, a: Formula) -> Formula {
        let fvs = remove_name(&a.0.fvs, i);
        // The binder name participates in the structural hash; α comparisons
        // go through translation, never through this hash.
        let hash = mix(mix(mix(FNV_OFFSET, 14), i.0 as u64), a.0.hash);
        Formula(Arc::new(FormulaNode {
            kind: FormulaKind::Ex(i, a),
            fvs,
            hash,
        }))
    }

    pub fn kind(&self) -> &FormulaKind {
        &self.0.kind
    }

    pub fn free_vars(&self) -> &[Name] {
        &self.0.fvs
    }

    pub fn is_ground(&self) -> bool {
        self.0.fvs.is_empty()
    }

    pub fn has_free(&self, n: Name) -> bool {
        self.0.fvs.binary_search(&n).is_ok()
    }

    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn struct_hash(&self) -> u64 {
        self.0.hash
    }

    pub fn tree_size(&self) -> u64 {
        let mut memo = std::collections::HashMap::new();
        fn go(a: &Formula, memo: &mut std::collections::HashMap<usize, u64>) -> u64 {
            if let Some(&s) = memo.get(&a.ptr_id()) {
                return s;
            }
            let s = match a.kind() {
                FormulaKind::Mem(t, u) | FormulaKind::Eq(t, u) => {
                    1u64.saturating_add(t.tree_size()).saturating_add(u.tree_size())
                }
                FormulaKind::Disj(x, y) => 1u64.saturating_add(go(x, memo)).saturating_add(go(y, memo)),
                FormulaKind::Neg(x) => 1u64.saturating_add(go(x, memo)),
                FormulaKind::Ex(_, x) => 1u64.saturating_add(go(x, memo)),
            };
            memo.insert(a.ptr_id(), s);
            s
        }
        go(self, &mut memo)
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (&self.0.kind, &other.0.kind) {
            (FormulaKind::Mem(a1, a2), FormulaKind::Mem(b1, b2)) => a1 == b1 && a2 == b2,
            (FormulaKind::Eq(a1, a2), FormulaKind::Eq(b1, b2)) => a1 == b1 && a2 == b2,
            (FormulaKind::Disj(a1, a2), FormulaKind::Disj(b1, b2)) => a1 == b1 && a2 == b2,
            (FormulaKind::Neg(a), FormulaKind::Neg(b)) => a == b,
            (FormulaKind::Ex(i, a), FormulaKind::Ex(j, b)) => i == j && a == b,
            _ => false,
        }
    }
}
impl Eq for Formula {}

impl std::hash::Hash for Formula {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

// ---------------------------------------------------------------------------
// Derived connectives
// ---------------------------------------------------------------------------

/// IMP(A,B) = (NEG A) OR B.
pub fn imp(a: Formula, b: Formula) -> Formula {
    Formula::disj(Formula::neg(a), b)
}

/// AND(A,B) = NEG((NEG A) OR (NEG B)).
pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::neg(Formula::disj(Formula::neg(a), Formula::neg(b)))
}

/// IFF(A,B) = AND(IMP(A,B), IMP(B,A)).
pub fn iff(a: Formula, b: Formula) -> Formula {
    and(imp(a.clone(), b.clone()), imp(b, a))
}

/// All(i,A) = NEG (EX i (NEG A)).
pub fn all(i: Name, a: Formula) -> Formula {
    Formula::neg(Formula::ex(i, Formula::neg(a)))
}

/// Fls = 0 IN 0.
pub fn fls() -> Formula {
    Formula::mem(Term::zero(), Term::zero())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureError {
    pub binder: Name,
}

impl fmt::Display for CaptureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bound variable {} occurs free in the bound term", self.binder)
    }
}

impl std::error::Error for CaptureError {}

/// All2(i,t,A) = All i ((Var i IN t) IMP A); requires i not free in t.
pub fn all2(i: Name, t: &Term, a: Formula) -> Result<Formula, CaptureError> {
    if t.has_free(i) {
        return Err(CaptureError { binder: i });
    }
    Ok(all(i, imp(Formula::mem(Term::var(i), t.clone()), a)))
}

/// t SUBS u = All2 z t ((Var z) IN u) with z fresh for t and u.
pub fn subset(t: &Term, u: &Term) -> Formula {
    let z = fresh_name(&union_names(&[t.free_vars(), u.free_vars()]));
    all2(z, t, Formula::mem(Term::var(z), u.clone())).expect("z chosen fresh")
}

/// Matches IMP(A,B) = Disj(Neg A, B).
pub fn as_imp(f: &Formula) -> Option<(Formula, Formula)> {
    if let FormulaKind::Disj(l, r) = f.kind() {
        if let FormulaKind::Neg(a) = l.kind() {
            return Some((a.clone(), r.clone()));
        }
    }
    None
}

/// Matches AND(A,B) = Neg(Disj(Neg A, Neg B)).
pub fn as_and(f: &Formula) -> Option<(Formula, Formula)> {
    if let FormulaKind::Neg(inner) = f.kind() {
        if let FormulaKind::Disj(l, r) = inner.kind() {
            if let (FormulaKind::Neg(a), FormulaKind::Neg(b)) = (l.kind(), r.kind()) {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

/// Matches IFF(A,B).
pub fn as_iff(f: &Formula) -> Option<(Formula, Formula)> {
    let (l, r) = as_and(f)?;
    let (a, b) = as_imp(&l)?;
    let (b2, a2) = as_imp(&r)?;
    if a == a2 && b == b2 {
        Some((a, b))
    } else {
        None
    }
}

/// Matches All(i,A) = Neg(Ex i (Neg A)).
pub fn as_all(f: &Formula) -> Option<(Name, Formula)> {
    if let FormulaKind::Neg(inner) = f.kind() {
        if let FormulaKind::Ex(i, body) = inner.kind() {
            if let FormulaKind::Neg(a) = body.kind() {
                return Some((*i, a.clone()));
            }
        }
    }
    None
}

/// Matches All2(i,t,A) with the definitional shape and i not free in t.
pub fn as_all2(f: &Formula) -> Option<(Name, Term, Formula)> {
    let (i, body) = as_all(f)?;
    let (guard, a) = as_imp(&body)?;
    if let FormulaKind::Mem(v, t) = guard.kind() {
        if let TermKind::Var(k) = v.kind() {
            if *k == i && !t.has_free(i) {
                return Some((i, t.clone(), a));
            }
        }
    }
    None
}

pub fn is_fls(f: &Formula) -> bool {
    *f == fls()
}

/// Matches t SUBS u (an All2 whose body is membership of the bound variable).
pub fn as_subset(f: &Formula) -> Option<(Term, Term)> {
    let (i, t, body) = as_all2(f)?;
    if let FormulaKind::Mem(v, u) = body.kind() {
        if let TermKind::Var(k) = v.kind() {
            if *k == i && !u.has_free(i) {
                return Some((t, u.clone()));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Capture-avoiding substitution
// ---------------------------------------------------------------------------

/// Capture-avoiding substitution of `x` for free occurrences of `i` in `a`.
/// Binders that would capture are renamed to a deterministic fresh name.
pub fn subst_fm(a: &Formula, i: Name, x: &Term) -> Formula {
    if !a.has_free(i) {
        return a.clone();
    }
    match a.kind() {
        FormulaKind::Mem(t, u) => Formula::mem(subst_tm(i, x, t), subst_tm(i, x, u)),
        FormulaKind::Eq(t, u) => Formula::eq(subst_tm(i, x, t), subst_tm(i, x, u)),
        FormulaKind::Disj(l, r) => Formula::disj(subst_fm(l, i, x), subst_fm(r, i, x)),
        FormulaKind::Neg(b) => Formula::neg(subst_fm(b, i, x)),
        FormulaKind::Ex(j, b) => {
            // a.has_free(i) implies j != i here
            if x.has_free(*j) {
                let avoid = union_names(&[b.free_vars(), x.free_vars(), &[i, *j]]);
                let j2 = fresh_name(&avoid);
                let renamed = subst_fm(b, *j, &Term::var(j2));
                Formula::ex(j2, subst_fm(&renamed, i, x))
            } else {
                Formula::ex(*j, subst_fm(b, i, x))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// De Bruijn syntax
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub enum DbTermKind {
    DbZero,
    DbVar(Name),
    DbInd(u32),
    DbEats(DbTerm, DbTerm),
}

#[derive(Debug)]
pub struct DbTermNode {
    kind: DbTermKind,
    fvs: Box<[Name]>,
    /// Number of enclosing binders required for all indices to be bound.
    needed_depth: u32,
    hash: u64,
}

#[derive(Clone, Debug)]
pub struct DbTerm(Arc<DbTermNode>);

impl DbTerm {
    pub fn zero() -> DbTerm {
        DbTerm(Arc::new(DbTermNode {
            kind: DbTermKind::DbZero,
            fvs: Box::new([]),
            needed_depth: 0,
            hash: mix(FNV_OFFSET, 20),
        }))
    }

    pub fn var(n: Name) -> DbTerm {
        DbTerm(Arc::new(DbTermNode {
            kind: DbTermKind::DbVar(n),
            fvs: Box::new([n]),
            needed_depth: 0,
            hash: mix(mix(FNV_OFFSET, 21), n.0 as u64),
        }))
    }

    pub fn ind(k: u32) -> DbTerm {
        DbTerm(Arc::new(DbTermNode {
            kind: DbTermKind::DbInd(k),
            fvs: Box::new([]),
            needed_depth: k + 1,
            hash: mix(mix(FNV_OFFSET, 22), k as u64),
        }))
    }

    pub fn eats(t: DbTerm, u: DbTerm) -> DbTerm {
        let fvs = union_names(&[&t.0.fvs, &u.0.fvs]);
        let needed_depth = t.0.needed_depth.max(u.0.needed_depth);
        let hash = mix(mix(mix(FNV_OFFSET, 23), t.0.hash), u.0.hash);
        DbTerm(Arc::new(DbTermNode {
            kind: DbTermKind::DbEats(t, u),
            fvs,
            needed_depth,
            hash,
        }))
    }

    pub fn kind(&self) -> &DbTermKind {
        &self.0.kind
    }

    pub fn free_vars(&self) -> &[Name] {
        &self.0.fvs
    }

    pub fn has_free(&self, n: Name) -> bool {
        self.0.fvs.binary_search(&n).is_ok()
    }

    /// True iff the term contains no de Bruijn index.
    pub fn index_free(&self) -> bool {
        // any index forces needed_depth ≥ 1
        self.0.needed_depth == 0
    }

    pub fn needed_depth(&self) -> u32 {
        self.0.needed_depth
    }

    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn struct_hash(&self) -> u64 {
        self.0.hash
    }
}

impl PartialEq for DbTerm {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (&self.0.kind, &other.0.kind) {
            (DbTermKind::DbZero, DbTermKind::DbZero) => true,
            (DbTermKind::DbVar(a), DbTermKind::DbVar(b)) => a == b,
            (DbTermKind::DbInd(a), DbTermKind::DbInd(b)) => a == b,
            (DbTermKind::DbEats(a1, a2), DbTermKind::DbEats(b1, b2)) => a1 == b1 && a2 == b2,
            _ => false,
        }
    }
}
impl Eq for DbTerm {}

impl std::hash::Hash for DbTerm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

#[derive(Debug)]
pub enum DbFormulaKind {
    DbMem(DbTerm, DbTerm),
    DbEq(DbTerm, DbTerm),
    DbDisj(DbFormula, DbFormula),
    DbNeg(DbFormula),
    DbEx(DbFormula),
}

#[derive(Debug)]
pub struct DbFormulaNode {
    kind: DbFormulaKind,
    fvs: Box<[Name]>,
    needed_depth: u32,
    hash: u64,
}

#[derive(Clone, Debug)]
pub struct DbFormula(Arc<DbFormulaNode>);

impl DbFormula {
    pub fn mem(t: DbTerm, u: DbTerm) -> DbFormula {
        let fvs = union_names(&[t.free_vars(), u.free_vars()]);
        let needed_depth = t.needed_depth().max(u.needed_depth());
        let hash = mix(mix(mix(FNV_OFFSET, 30), t.struct_hash()), u.struct_hash());
        DbFormula(Arc::new(DbFormulaNode {
            kind: DbFormulaKind::DbMem(t, u),
            fvs,
            needed_depth,
            hash,
        }))
    }

    pub fn eq(t: DbTerm, u: DbTerm) -> DbFormula {
        let fvs = union_names(&[t.free_vars(), u.free_vars()]);
        let needed_depth = t.needed_depth().max(u.needed_depth());
        let hash = mix(mix(mix(FNV_OFFSET, 31), t.struct_hash()), u.struct_hash());
        DbFormula(Arc::new(DbFormulaNode {
            kind: DbFormulaKind::DbEq(t, u),
            fvs,
            needed_depth,
            hash,
        }))
    }

    pub fn disj(a: DbFormula, b: DbFormula) -> DbFormula {
        let fvs = union_names(&[&a.0.fvs, &b.0.fvs]);
        let needed_depth = a.0.needed_depth.max(b.0.needed_depth);
        let hash = mix(mix(mix(FNV_OFFSET, 32), a.0.hash), b.0.hash);
        DbFormula(Arc::new(DbFormulaNode {
            kind: DbFormulaKind::DbDisj(a, b),
            fvs,
            needed_depth,
            hash,
        }))
    }

    pub fn neg(a: DbFormula) -> DbFormula {
        let fvs = a.0.fvs.clone();
        let needed_depth = a.0.needed_depth;
        let hash = mix(mix(FNV_OFFSET, 33), a.0.hash);
        DbFormula(Arc::new(DbFormulaNode {
            kind: DbFormulaKind::DbNeg(a),
            fvs,
            needed_depth,
            hash,
        }))
    }

    pub fn ex(a: DbFormula) -> DbFormula {
        let fvs = a.0.fvs.clone();
        let needed_depth = a.0.needed_depth.saturating_sub(1);
        let hash = mix(mix(FNV_OFFSET, 34), a.0.hash);
        DbFormula(Arc::new(DbFormulaNode {
            kind: DbFormulaKind::DbEx(a),
            fvs,
            needed_depth,
            hash,
        }))
    }

    pub fn kind(&self) -> &DbFormulaKind {
        &self.0.kind
    }

    pub fn free_vars(&self) -> &[Name] {
        &self.0.fvs
    }

    pub fn has_free(&self, n: Name) -> bool {
        self.0.fvs.binary_search(&n).is_ok()
    }

    pub fn needed_depth(&self) -> u32 {
        self.0.needed_depth
    }

    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn struct_hash(&self) -> u64 {
        self.0.hash
    }
}

impl PartialEq for DbFormula {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (&self.0.kind, &other.0.kind) {
            (DbFormulaKind::DbMem(a1, a2), DbFormulaKind::DbMem(b1, b2)) => a1 == b1 && a2 == b2,
            (DbFormulaKind::DbEq(a1, a2), DbFormulaKind::DbEq(b1, b2)) => a1 == b1 && a2 == b2,
            (DbFormulaKind::DbDisj(a1, a2), DbFormulaKind::DbDisj(b1, b2)) => a1 == b1 && a2 == b2,
            (DbFormulaKind::DbNeg(a), DbFormulaKind::DbNeg(b)) => a == b,
            (DbFormulaKind::DbEx(a), DbFormulaKind::DbEx(b)) => a == b,
            _ => false,
        }
    }
}
impl Eq for DbFormula {}

impl std::hash::Hash for DbFormula {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

/// A well-formed de Bruijn term contains no index at all.
pub fn wf_dbtm(t: &DbTerm) -> bool {
    t.index_free()
}

/// A well-formed de Bruijn formula has every index bound by an enclosing
/// binder: implemented as the depth-counting condition `needed_depth == 0`,
/// which is equivalent to the inductive construction through abstraction.
pub fn wf_dbfm(a: &DbFormula) -> bool {
    a.needed_depth() == 0
}

// ---------------------------------------------------------------------------
// Translation named → de Bruijn
// ---------------------------------------------------------------------------

/// Shared translation state. Closed subtrees translate independently of the
/// binder environment and are memoized by node identity; this keeps
/// translation of the enormous ground quotation terms linear.
pub struct Translator {
    // each entry owns its key's node, so the address stays valid and unique
    tm_memo: std::collections::HashMap<usize, (Term, DbTerm)>,
    fm_memo: std::collections::HashMap<usize, (Formula, DbFormula)>,
}

impl Default for Translator {
    fn default() -> Self {
        Translator::new()
    }
}

impl Translator {
    pub fn new() -> Translator {
        Translator {
            tm_memo: std::collections::HashMap::new(),
            fm_memo: std::collections::HashMap::new(),
        }
    }

    fn lookup(env: &[Name], x: Name) -> DbTerm {
        // innermost binder is last; shadowing resolves to the nearest one
        for (dist, y) in env.iter().rev().enumerate() {
            if *y == x {
                return DbTerm::ind(dist as u32);
            }
        }
        DbTerm::var(x)
    }

    pub fn trans_tm(&mut self, env: &mut Vec<Name>, t: &Term) -> DbTerm {
        let closed = t.is_ground();
        if closed {
            if let Some((_, d)) = self.tm_memo.get(&t.ptr_id()) {
                return d.clone();
            }
        }
        let out = match t.kind() {
            TermKind::Zero => DbTerm::zero(),
            TermKind::Var(k) => Self::lookup(env, *k),
            TermKind::Eats(a, b) => DbTerm::eats(self.trans_tm(env, a), self.trans_tm(env, b)),
        };
        if closed {
            self.tm_memo.insert(t.ptr_id(), (t.clone(), out.clone()));
        }
        out
    }

    pub fn trans_fm(&mut self, env: &mut Vec<Name>, a: &Formula) -> DbFormula {
        let closed = a.is_ground();
        if closed {
            if let Some((_, d)) = self.fm_memo.get(&a.ptr_id()) {
                return d.clone();
            }
        }
        let out = match a.kind() {
            FormulaKind::Mem(t, u) => DbFormula::mem(self.trans_tm(env, t), self.trans_tm(env, u)),
            FormulaKind::Eq(t, u) => DbFormula::eq(self.trans_tm(env, t), self.trans_tm(env, u)),
            FormulaKind::Disj(l, r) => DbFormula::disj(self.trans_fm(env, l), self.trans_fm(env, r)),
            FormulaKind::Neg(b) => DbFormula::neg(self.trans_fm(env, b)),
            FormulaKind::Ex(k, b) => {
                env.push(*k);
                let body = self.trans_fm(env, b);
                env.pop();
                DbFormula::ex(body)
            }
        };
        if closed {
            self.fm_memo.insert(a.ptr_id(), (a.clone(), out.clone()));
        }
        out
    }
}

pub fn trans_tm(env: &[Name], t: &Term) -> DbTerm {
    Translator::new().trans_tm(&mut env.to_vec(), t)
}

pub fn trans_fm(env: &[Name], a: &Formula) -> DbFormula {
    Translator::new().trans_fm(&mut env.to_vec(), a)
}

/// α-equivalence via translation to de Bruijn form.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    if a == b {
        return true;
    }
    let mut tr = Translator::new();
    tr.trans_fm(&mut Vec::new(), a) == tr.trans_fm(&mut Vec::new(), b)
}

// ---------------------------------------------------------------------------
// De Bruijn abstraction, substitution, untranslation
// ---------------------------------------------------------------------------

/// Replaces `DBVar i` by `DBInd k`, incrementing `k` under each binder.
pub fn abst_dbtm(i: Name, k: u32, t: &DbTerm) -> DbTerm {
    if !t.has_free(i) {
        return t.clone();
    }
    match t.kind() {
        DbTermKind::DbVar(x) if *x == i => DbTerm::ind(k),
        DbTermKind::DbEats(a, b) => DbTerm::eats(abst_dbtm(i, k, a), abst_dbtm(i, k, b)),
        _ => t.clone(),
    }
}

pub fn abst_dbfm(i: Name, k: u32, a: &DbFormula) -> DbFormula {
    if !a.has_free(i) {
        return a.clone();
    }
    match a.kind() {
        DbFormulaKind::DbMem(t, u) => DbFormula::mem(abst_dbtm(i, k, t), abst_dbtm(i, k, u)),
        DbFormulaKind::DbEq(t, u) => DbFormula::eq(abst_dbtm(i, k, t), abst_dbtm(i, k, u)),
        DbFormulaKind::DbDisj(l, r) => DbFormula::disj(abst_dbfm(i, k, l), abst_dbfm(i, k, r)),
        DbFormulaKind::DbNeg(b) => DbFormula::neg(abst_dbfm(i, k, b)),
        DbFormulaKind::DbEx(b) => DbFormula::ex(abst_dbfm(i, k + 1, b)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DbError {
    /// The replacement term carries a de Bruijn index.
    IndexBearingReplacement,
    /// The formula is not well formed.
    IllFormed,
}

impl fmt::Display for DbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DbError::IndexBearingReplacement => {
                f.write_str("replacement term contains a de Bruijn index")
            }
            DbError::IllFormed => f.write_str("ill-formed de Bruijn formula"),
        }
    }
}

impl std::error::Error for DbError {}

/// Replaces `DBVar i` by the index-free term `u` at every depth.
pub fn subst_dbtm(i: Name, u: &DbTerm, t: &DbTerm) -> Result<DbTerm, DbError> {
    if !u.index_free() {
        return Err(DbError::IndexBearingReplacement);
    }
    fn go(i: Name, u: &DbTerm, t: &DbTerm) -> DbTerm {
        if !t.has_free(i) {
            return t.clone();
        }
        match t.kind() {
            DbTermKind::DbVar(x) if *x == i => u.clone(),
            DbTermKind::DbEats(a, b) => DbTerm::eats(go(i, u, a), go(i, u, b)),
            _ => t.clone(),
        }
    }
    Ok(go(i, u, t))
}

pub fn subst_dbfm(i: Name, u: &DbTerm, a: &DbFormula) -> Result<DbFormula, DbError> {
    if !u.index_free() {
        return Err(DbError::IndexBearingReplacement);
    }
    fn go(i: Name, u: &DbTerm, a: &DbFormula) -> DbFormula {
        if !a.has_free(i) {
            return a.clone();
        }
        match a.kind() {
            DbFormulaKind::DbMem(t, s) => {
                DbFormula::mem(subst_dbtm(i, u, t).unwrap(), subst_dbtm(i, u, s).unwrap())
            }
            DbFormulaKind::DbEq(t, s) => {
                DbFormula::eq(subst_dbtm(i, u, t).unwrap(), subst_dbtm(i, u, s).unwrap())
            }
            DbFormulaKind::DbDisj(l, r) => DbFormula::disj(go(i, u, l), go(i, u, r)),
            DbFormulaKind::DbNeg(b) => DbFormula::neg(go(i, u, b)),
            DbFormulaKind::DbEx(b) => DbFormula::ex(go(i, u, b)),
        }
    }
    Ok(go(i, u, a))
}

/// Inverts translation on well-formed formulas. Binder names are chosen fresh
/// deterministically, so the result is reproducible.
pub fn untrans(a: &DbFormula) -> Result<Formula, DbError> {
    if !wf_dbfm(a) {
        return Err(DbError::IllFormed);
    }
    fn term(env: &[Name], t: &DbTerm) -> Result<Term, DbError> {
        Ok(match t.kind() {
            DbTermKind::DbZero => Term::zero(),
            DbTermKind::DbVar(x) => Term::var(*x),
            DbTermKind::DbInd(k) => {
                let k = *k as usize;
                if k >= env.len() {
                    return Err(DbError::IllFormed);
                }
                Term::var(env[env.len() - 1 - k])
            }
            DbTermKind::DbEats(x, y) => Term::eats(term(env, x)?, term(env, y)?),
        })
    }
    fn fm(avoid: &[Name], env: &mut Vec<Name>, a: &DbFormula) -> Result<Formula, DbError> {
        Ok(match a.kind() {
            DbFormulaKind::DbMem(t, u) => Formula::mem(term(env, t)?, term(env, u)?),
            DbFormulaKind::DbEq(t, u) => Formula::eq(term(env, t)?, term(env, u)?),
            DbFormulaKind::DbDisj(l, r) => Formula::disj(fm(avoid, env, l)?, fm(avoid, env, r)?),
            DbFormulaKind::DbNeg(b) => Formula::neg(fm(avoid, env, b)?),
            DbFormulaKind::DbEx(b) => {
                let mut all_avoid: Vec<Name> = avoid.to_vec();
                all_avoid.extend(env.iter().copied());
                let fresh = fresh_name(&all_avoid);
                env.push(fresh);
                let body = fm(avoid, env, b)?;
                env.pop();
                Formula::ex(fresh, body)
            }
        })
    }
    fm(a.free_vars(), &mut Vec::new(), a)
}

// ---------------------------------------------------------------------------
// Text grammar
// ---------------------------------------------------------------------------

pub mod text {
    //! Parser and printer for the formula text grammar.
    //!
    //! ```text
    //! term    := `0` | ident | `(` term `<|` term `)`
    //! formula := term `IN` term | term `EQ` term | term `SUBS` term
    //!          | `(` formula `OR` formula `)`  | `NEG` formula
    //!          | `EX` ident `.` formula | `FLS`
    //!          | `(` formula (`IMP`|`AND`|`IFF`) formula `)`
    //!          | `ALL` ident `.` formula | `ALL2` ident term `.` formula
    //! ident   := `x` digits
    //! ```
    //!
    //! The printer emits sugar-free core syntax unless asked for sugar.

    use super::*;

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct ParseError {
        pub at: usize,
        pub message: String,
    }

    impl fmt::Display for ParseError {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "parse error at byte {}: {}", self.at, self.message)
        }
    }

    impl std::error::Error for ParseError {}

    #[derive(Debug, Clone, PartialEq, Eq)]
    enum Tok {
        Zero,
        Ident(Name),
        LParen,
        RParen,
        Eats,
        Dot,
        Kw(&'static str),
    }

    const KEYWORDS: [&str; 12] = [
        "IN", "EQ", "OR", "NEG", "EX", "IMP", "AND", "IFF", "ALL2", "ALL", "FLS", "SUBS",
    ];

    fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let b = src.as_bytes();
        let mut out = Vec::new();
        let mut i = 0usize;
        while i < b.len() {
            let c = b[i] as char;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            match c {
                '0' => {
                    out.push((i, Tok::Zero));
                    i += 1;
                }
                '(' => {
                    out.push((i, Tok::LParen));
                    i += 1;
                }
                ')' => {
                    out.push((i, Tok::RParen));
                    i += 1;
                }
                '.' => {
                    out.push((i, Tok::Dot));
                    i += 1;
                }
                '<' => {
                    if b.get(i + 1) == Some(&b'|') {
                        out.push((i, Tok::Eats));
                        i += 2;
                    } else {
                        return Err(ParseError {
                            at: i,
                            message: "expected `<|`".into(),
                        });
                    }
                }
                'A'..='Z' => {
                    let start = i;
                    while i < b.len() && (b[i] as char).is_ascii_alphanumeric() {
                        i += 1;
                    }
                    let word = &src[start..i];
                    match KEYWORDS.iter().find(|k| **k == word) {
                        Some(k) => out.push((start, Tok::Kw(k))),
                        None => {
                            return Err(ParseError {
                                at: start,
                                message: format!("unknown keyword `{word}`"),
                            })
                        }
                    }
                }
                'x' => {
                    let start = i;
                    i += 1;
                    let digits_start = i;
                    while i < b.len() && (b[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                    if i == digits_start {
                        return Err(ParseError {
                            at: start,
                            message: "identifier must be `x` followed by digits".into(),
                        });
                    }
                    let id: u32 = src[digits_start..i].parse().map_err(|_| ParseError {
                        at: start,
                        message: "identifier index out of range".into(),
                    })?;
                    out.push((start, Tok::Ident(Name(id))));
                }
                _ => {
                    return Err(ParseError {
                        at: i,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
        Ok(out)
    }

    struct Parser {
        toks: Vec<(usize, Tok)>,
        pos: usize,
    }

    impl Parser {
        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos).map(|(_, t)| t)
        }

        fn at(&self) -> usize {
            self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(usize::MAX)
        }

        fn next(&mut self) -> Option<Tok> {
            let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
            self.pos += 1;
            t
        }

        fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
            let at = self.at();
            match self.next() {
                Some(t) if t == *want => Ok(()),
                _ => Err(ParseError {
                    at,
                    message: format!("expected {what}"),
                }),
            }
        }

        fn ident(&mut self) -> Result<Name, ParseError> {
            let at = self.at();
            match self.next() {
                Some(Tok::Ident(n)) => Ok(n),
                _ => Err(ParseError {
                    at,
                    message: "expected identifier".into(),
                }),
            }
        }

        fn term(&mut self) -> Result<Term, ParseError> {
            let at = self.at();
            match self.next() {
                Some(Tok::Zero) => Ok(Term::zero()),
                Some(Tok::Ident(n)) => Ok(Term::var(n)),
                Some(Tok::LParen) => {
                    let t = self.term()?;
                    self.expect(&Tok::Eats, "`<|`")?;
                    let u = self.term()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(Term::eats(t, u))
                }
                _ => Err(ParseError {
                    at,
                    message: "expected term".into(),
                }),
            }
        }

        fn formula(&mut self) -> Result<Formula, ParseError> {
            let at = self.at();
            match self.peek() {
                Some(Tok::Kw("FLS")) => {
                    self.next();
                    Ok(fls())
                }
                Some(Tok::Kw("NEG")) => {
                    self.next();
                    Ok(Formula::neg(self.formula()?))
                }
                Some(Tok::Kw("EX")) => {
                    self.next();
                    let n = self.ident()?;
                    self.expect(&Tok::Dot, "`.`")?;
                    Ok(Formula::ex(n, self.formula()?))
                }
                Some(Tok::Kw("ALL")) => {
                    self.next();
                    let n = self.ident()?;
                    self.expect(&Tok::Dot, "`.`")?;
                    Ok(all(n, self.formula()?))
                }
                Some(Tok::Kw("ALL2")) => {
                    self.next();
                    let n = self.ident()?;
                    let t = self.term()?;
                    self.expect(&Tok::Dot, "`.`")?;
                    let body = self.formula()?;
                    all2(n, &t, body).map_err(|e| ParseError {
                        at,
                        message: e.to_string(),
                    })
                }
                Some(Tok::LParen) => {
                    // ( formula OP formula ) or a compound term heading an atom
                    let save = self.pos;
                    self.next();
                    if let Ok(f1) = self.formula() {
                        match self.next() {
                            Some(Tok::Kw("OR")) => {
                                let f2 = self.formula()?;
                                self.expect(&Tok::RParen, "`)`")?;
                                return Ok(Formula::disj(f1, f2));
                            }
                            Some(Tok::Kw("IMP")) => {
                                let f2 = self.formula()?;
                                self.expect(&Tok::RParen, "`)`")?;
                                return Ok(imp(f1, f2));
                            }
                            Some(Tok::Kw("AND")) => {
                                let f2 = self.formula()?;
                                self.expect(&Tok::RParen, "`)`")?;
                                return Ok(and(f1, f2));
                            }
                            Some(Tok::Kw("IFF")) => {
                                let f2 = self.formula()?;
                                self.expect(&Tok::RParen, "`)`")?;
                                return Ok(iff(f1, f2));
                            }
                            _ => {}
                        }
                    }
                    self.pos = save;
                    self.atom()
                }
                _ => self.atom(),
            }
        }

        fn atom(&mut self) -> Result<Formula, ParseError> {
            let t = self.term()?;
            let at = self.at();
            match self.next() {
                Some(Tok::Kw("IN")) => Ok(Formula::mem(t, self.term()?)),
                Some(Tok::Kw("EQ")) => Ok(Formula::eq(t, self.term()?)),
                Some(Tok::Kw("SUBS")) => {
                    let u = self.term()?;
                    Ok(subset(&t, &u))
                }
                _ => Err(ParseError {
                    at,
                    message: "expected IN, EQ or SUBS".into(),
                }),
            }
        }
    }

    pub fn parse_term(src: &str) -> Result<Term, ParseError> {
        let mut p = Parser {
            toks: lex(src)?,
            pos: 0,
        };
        let t = p.term()?;
        if p.pos != p.toks.len() {
            return Err(ParseError {
                at: p.at(),
                message: "trailing input".into(),
            });
        }
        Ok(t)
    }

    pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
        let mut p = Parser {
            toks: lex(src)?,
            pos: 0,
        };
        let f = p.formula()?;
        if p.pos != p.toks.len() {
            return Err(ParseError {
                at: p.at(),
                message: "trailing input".into(),
            });
        }
        Ok(f)
    }

    pub fn print_term(t: &Term) -> String {
        let mut s = String::new();
        term_into(t, &mut s);
        s
    }

    fn term_into(t: &Term, out: &mut String) {
        match t.kind() {
            TermKind::Zero => out.push('0'),
            TermKind::Var(n) => out.push_str(&n.to_string()),
            TermKind::Eats(a, b) => {
                out.push('(');
                term_into(a, out);
                out.push_str(" <| ");
                term_into(b, out);
                out.push(')');
            }
        }
    }

    pub fn print_formula(f: &Formula, sugar: bool) -> String {
        let mut s = String::new();
        formula_into(f, sugar, &mut s);
        s
    }

    fn formula_into(f: &Formula, sugar: bool, out: &mut String) {
        if sugar {
            if is_fls(f) {
                out.push_str("FLS");
                return;
            }
            if let Some((t, u)) = as_subset(f) {
                term_into(&t, out);
                out.push_str(" SUBS ");
                term_into(&u, out);
                return;
            }
            if let Some((a, b)) = as_iff(f) {
                out.push('(');
                formula_into(&a, sugar, out);
                out.push_str(" IFF ");
                formula_into(&b, sugar, out);
                out.push(')');
                return;
            }
            if let Some((a, b)) = as_and(f) {
                out.push('(');
                formula_into(&a, sugar, out);
                out.push_str(" AND ");
                formula_into(&b, sugar, out);
                out.push(')');
                return;
            }
            if let Some((i, t, a)) = as_all2(f) {
                out.push_str("ALL2 ");
                out.push_str(&i.to_string());
                out.push(' ');
                term_into(&t, out);
                out.push_str(" . ");
                formula_into(&a, sugar, out);
                return;
            }
            if let Some((i, a)) = as_all(f) {
                out.push_str("ALL ");
                out.push_str(&i.to_string());
                out.push_str(" . ");
                formula_into(&a, sugar, out);
                return;
            }
            if let Some((a, b)) = as_imp(f) {
                out.push('(');
                formula_into(&a, sugar, out);
                out.push_str(" IMP ");
                formula_into(&b, sugar, out);
                out.push(')');
                return;
            }
        }
        match f.kind() {
            FormulaKind::Mem(t, u) => {
                term_into(t, out);
                out.push_str(" IN ");
                term_into(u, out);
            }
            FormulaKind::Eq(t, u) => {
                term_into(t, out);
                out.push_str(" EQ ");
                term_into(u, out);
            }
            FormulaKind::Disj(a, b) => {
                out.push('(');
                formula_into(a, sugar, out);
                out.push_str(" OR ");
                formula_into(b, sugar, out);
                out.push(')');
            }
            FormulaKind::Neg(a) => {
                out.push_str("NEG ");
                formula_into(a, sugar, out);
            }
            FormulaKind::Ex(i, a) => {
                out.push_str("EX ");
                out.push_str(&i.to_string());
                out.push_str(" . ");
                formula_into(a, sugar, out);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::print_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::print_formula(self, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> Term {
        Term::var(Name(n))
    }

    #[test]
    fn derived_shapes() {
        assert_eq!(fls(), Formula::mem(Term::zero(), Term::zero()));
        let i = Name(0);
        let a = Formula::eq(v(0), v(0));
        assert_eq!(
            all(i, a.clone()),
            Formula::neg(Formula::ex(i, Formula::neg(a.clone())))
        );
        assert!(as_imp(&imp(a.clone(), a.clone())).is_some());
        assert!(as_and(&and(a.clone(), a.clone())).is_some());
        assert!(as_iff(&iff(a.clone(), a)).is_some());
    }

    #[test]
    fn all2_capture_checked() {
        let i = Name(0);
        assert!(all2(i, &v(0), fls()).is_err());
        assert!(all2(i, &v(1), fls()).is_ok());
    }

    #[test]
    fn subst_tm_examples() {
        let i = Name(0);
        assert_eq!(subst_tm(i, &Term::zero(), &v(0)), Term::zero());
        assert_eq!(subst_tm(i, &v(5), &Term::zero()), Term::zero());
        assert_eq!(
            subst_tm(i, &v(1), &Term::eats(v(0), v(0))),
            Term::eats(v(1), v(1))
        );
    }

    #[test]
    fn subst_fm_shadowing_and_capture() {
        let i = Name(0);
        let j = Name(1);
        // bound i shadows
        let a = Formula::ex(i, Formula::mem(v(0), v(1)));
        assert_eq!(subst_fm(&a, i, &Term::zero()), a);
        // capture avoided: EX j . x0 IN x1 with x0 := x1
        let b = Formula::ex(j, Formula::mem(v(0), v(1)));
        let sb = subst_fm(&b, i, &v(1));
        if let FormulaKind::Ex(j2, body) = sb.kind() {
            assert_ne!(*j2, j);
            assert_eq!(*body, Formula::mem(v(1), Term::var(*j2)));
        } else {
            panic!("expected Ex");
        }
        let expected_db = DbFormula::ex(DbFormula::mem(DbTerm::var(Name(1)), DbTerm::ind(0)));
        assert_eq!(trans_fm(&[], &sb), expected_db);
    }

    #[test]
    fn trans_examples_from_coding_table() {
        let x = Name(0);
        let y = Name(1);
        // EX y . x IN y  →  DBEx(DBMem(DBVar x, DBInd 0))
        let f = Formula::ex(y, Formula::mem(v(0), v(1)));
        assert_eq!(
            trans_fm(&[], &f),
            DbFormula::ex(DbFormula::mem(DbTerm::var(x), DbTerm::ind(0)))
        );
        // EX x . EX y . x IN y  →  DBEx(DBEx(DBMem(DBInd 1, DBInd 0)))
        let g = Formula::ex(x, f.clone());
        assert_eq!(
            trans_fm(&[], &g),
            DbFormula::ex(DbFormula::ex(DbFormula::mem(DbTerm::ind(1), DbTerm::ind(0))))
        );
        // trans_tm [k] (Var k) = DBInd 0
        assert_eq!(trans_tm(&[x], &v(0)), DbTerm::ind(0));
    }

    #[test]
    fn alpha_equivalence() {
        let i = Name(0);
        let j = Name(1);
        let a = Formula::ex(i, Formula::eq(v(0), v(0)));
        let b = Formula::ex(j, Formula::eq(v(1), v(1)));
        assert!(alpha_eq(&a, &b));
        let c = Formula::ex(i, Formula::eq(v(0), v(1)));
        let d = Formula::ex(j, Formula::eq(v(1), v(1)));
        assert!(!alpha_eq(&c, &d));
        assert!(alpha_eq(&c, &c));
    }

    #[test]
    fn wf_examples() {
        assert!(!wf_dbtm(&DbTerm::ind(0)));
        assert!(wf_dbtm(&DbTerm::var(Name(3))));
        let f = DbFormula::ex(DbFormula::mem(DbTerm::ind(0), DbTerm::var(Name(0))));
        assert!(wf_dbfm(&f));
        let g = DbFormula::mem(DbTerm::ind(0), DbTerm::var(Name(0)));
        assert!(!wf_dbfm(&g));
    }

    #[test]
    fn untrans_round_trip() {
        let i = Name(0);
        let j = Name(1);
        let f = Formula::ex(i, Formula::ex(j, Formula::mem(v(0), v(1))));
        let db = trans_fm(&[], &f);
        let back = untrans(&db).unwrap();
        assert_eq!(trans_fm(&[], &back), db);
        assert!(untrans(&DbFormula::mem(DbTerm::ind(0), DbTerm::zero())).is_err());
    }

    #[test]
    fn abstraction_examples() {
        let x = Name(0);
        let y = Name(1);
        let f = DbFormula::mem(DbTerm::var(x), DbTerm::var(y));
        assert_eq!(
            abst_dbfm(y, 0, &f),
            DbFormula::mem(DbTerm::var(x), DbTerm::ind(0))
        );
        let g = DbFormula::ex(DbFormula::mem(DbTerm::var(x), DbTerm::ind(0)));
        assert_eq!(
            abst_dbfm(x, 0, &g),
            DbFormula::ex(DbFormula::mem(DbTerm::ind(1), DbTerm::ind(0)))
        );
        assert_eq!(abst_dbtm(Name(2), 0, &DbTerm::zero()), DbTerm::zero());
    }

    #[test]
    fn subst_db_examples() {
        let i = Name(0);
        assert_eq!(
            subst_dbtm(i, &DbTerm::zero(), &DbTerm::var(i)).unwrap(),
            DbTerm::zero()
        );
        assert_eq!(
            subst_dbtm(i, &DbTerm::ind(0), &DbTerm::zero()),
            Err(DbError::IndexBearingReplacement)
        );
    }

    #[test]
    fn quantifier_abstraction_law() {
        let i = Name(2);
        let a = Formula::mem(v(2), Term::eats(v(3), Term::zero()));
        let lhs = trans_fm(&[], &Formula::ex(i, a.clone()));
        let rhs = DbFormula::ex(abst_dbfm(i, 0, &trans_fm(&[], &a)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn text_round_trip() {
        for src in [
            "0 IN 0",
            "(0 <| 0) EQ x3",
            "NEG (x0 IN x1 OR x1 IN x0)",
            "EX x0 . x0 EQ 0",
            "(FLS IMP FLS)",
            "ALL2 x0 x1 . x0 IN x2",
            "x0 SUBS x1",
        ] {
            let f = text::parse_formula(src).unwrap();
            let printed = text::print_formula(&f, false);
            let re = text::parse_formula(&printed).unwrap();
            assert_eq!(f, re, "round trip through core printing for {src}");
            let sugared = text::print_formula(&f, true);
            let re2 = text::parse_formula(&sugared).unwrap();
            assert_eq!(f, re2, "round trip through sugared printing for {src}");
        }
    }
}
