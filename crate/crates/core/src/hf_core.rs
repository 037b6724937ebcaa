//! Canonical hereditarily finite set values.
//!
//! An [`HfSet`] is a duplicate-free collection of child sets kept in ascending
//! Ackermann order, so structural equality coincides with set equality. Nodes
//! are hash-consed through a global interner: equal sets are always the same
//! allocation, which makes equality O(1) and keeps the huge shared DAGs
//! produced by the coding layer compact.

use dashmap::DashMap;
use num_bigint::BigUint;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock, Weak};

#[derive(Debug)]
pub struct HfNode {
    children: Box<[HfSet]>,
    hash: u64,
}

/// A hereditarily finite set. Cheap to clone; immutable; thread-safe.
#[derive(Clone)]
pub struct HfSet(Arc<HfNode>);

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv_step(h: u64, x: u64) -> u64 {
    let mut h = h;
    for b in x.to_le_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn node_hash(children: &[HfSet]) -> u64 {
    let mut h = fnv_step(FNV_OFFSET, children.len() as u64);
    for c in children {
        h = fnv_step(h, c.0.hash);
    }
    h
}

fn interner() -> &'static DashMap<u64, Vec<Weak<HfNode>>> {
    static INTERN: OnceLock<DashMap<u64, Vec<Weak<HfNode>>>> = OnceLock::new();
    INTERN.get_or_init(DashMap::new)
}

fn intern(children: Vec<HfSet>) -> HfSet {
    let hash = node_hash(&children);
    let mut bucket = interner().entry(hash).or_default();
    bucket.retain(|w| w.strong_count() > 0);
    for w in bucket.iter() {
        if let Some(existing) = w.upgrade() {
            if existing.children.len() == children.len()
                && existing
                    .children
                    .iter()
                    .zip(children.iter())
                    .all(|(a, b)| Arc::ptr_eq(&a.0, &b.0))
            {
                return HfSet(existing);
            }
        }
    }
    let node = Arc::new(HfNode {
        children: children.into_boxed_slice(),
        hash,
    });
    bucket.push(Arc::downgrade(&node));
    HfSet(node)
}

impl PartialEq for HfSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}
impl Eq for HfSet {}

impl std::hash::Hash for HfSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order matching the Ackermann encoding f(x) = Σ { 2^f(y) | y ∈ x }.
///
/// Two sets compare as the binary numbers whose set bits sit at the codes of
/// their children, so the comparison walks both child lists from the largest
/// child down to the first difference.
impl Ord for HfSet {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let a = &self.0.children;
        let b = &other.0.children;
        let (mut i, mut j) = (a.len(), b.len());
        while i > 0 && j > 0 {
            let (x, y) = (&a[i - 1], &b[j - 1]);
            if x != y {
                return x.cmp(y);
            }
            i -= 1;
            j -= 1;
        }
        i.cmp(&j)
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Errors raised by the partial operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HfError {
    NotAnOrdinal,
    NotAPair,
    NotATupleCode,
    Absent,
    Ambiguous,
    TooLarge,
}

impl fmt::Display for HfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HfError::NotAnOrdinal => "not an ordinal",
            HfError::NotAPair => "not a pair",
            HfError::NotATupleCode => "not a tuple-of-ordinals code",
            HfError::Absent => "no pair with that key",
            HfError::Ambiguous => "sequence not single-valued at that key",
            HfError::TooLarge => "value too large to materialize",
        };
        f.write_str(s)
    }
}

impl std::error::Error for HfError {}

impl HfSet {
    /// The empty set, 0.
    pub fn empty() -> HfSet {
        intern(Vec::new())
    }

    /// Builds the canonical set with the given children (sorted, deduplicated).
    pub fn from_children<I: IntoIterator<Item = HfSet>>(children: I) -> HfSet {
        let mut v: Vec<HfSet> = children.into_iter().collect();
        v.sort();
        v.dedup();
        intern(v)
    }

    /// x ◁ y = x ∪ {y}, the sole constructor of nonempty sets.
    pub fn eats(&self, y: &HfSet) -> HfSet {
        match self.0.children.binary_search(y) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut v = self.0.children.to_vec();
                v.insert(pos, y.clone());
                intern(v)
            }
        }
    }

    pub fn children(&self) -> &[HfSet] {
        &self.0.children
    }

    pub fn is_empty(&self) -> bool {
        self.0.children.is_empty()
    }

    pub fn card(&self) -> usize {
        self.0.children.len()
    }

    /// Membership: is `x` a child of `self`?
    pub fn mem(&self, x: &HfSet) -> bool {
        self.0.children.binary_search(x).is_ok()
    }

    /// Is every child of `self` a child of `other`?
    pub fn subset(&self, other: &HfSet) -> bool {
        self.0.children.iter().all(|c| other.mem(c))
    }

    pub fn union(&self, other: &HfSet) -> HfSet {
        HfSet::from_children(self.children().iter().chain(other.children()).cloned())
    }

    /// The ordinal n = {0, 1, ..., n-1}.
    pub fn ord_of(n: usize) -> HfSet {
        static ORDS: OnceLock<Mutex<Vec<HfSet>>> = OnceLock::new();
        let cache = ORDS.get_or_init(|| Mutex::new(vec![HfSet::empty()]));
        let mut cache = cache.lock().unwrap();
        while cache.len() <= n {
            let last = cache.last().unwrap().clone();
            cache.push(last.eats(&last));
        }
        cache[n].clone()
    }

    /// Inverse of [`ord_of`](HfSet::ord_of): `n` iff `self = ord_of(n)`.
    pub fn as_ord(&self) -> Result<usize, HfError> {
        let n = self.card();
        if *self == HfSet::ord_of(n) {
            Ok(n)
        } else {
            Err(HfError::NotAnOrdinal)
        }
    }

    pub fn is_ord(&self) -> bool {
        self.as_ord().is_ok()
    }

    /// Kuratowski pair ⟨x, y⟩ = {{x}, {x, y}}.
    pub fn hpair(x: &HfSet, y: &HfSet) -> HfSet {
        let sx = HfSet::from_children([x.clone()]);
        let sxy = HfSet::from_children([x.clone(), y.clone()]);
        HfSet::from_children([sx, sxy])
    }

    /// Decomposes a Kuratowski pair into its components.
    pub fn unpair(&self) -> Result<(HfSet, HfSet), HfError> {
        let cs = self.children();
        match cs.len() {
            1 => {
                // {{x}} is ⟨x, x⟩
                let inner = &cs[0];
                if inner.card() == 1 {
                    let x = inner.children()[0].clone();
                    Ok((x.clone(), x))
                } else {
                    Err(HfError::NotAPair)
                }
            }
            2 => {
                // {x} sorts before {x, y}: a strict subset has a smaller code.
                let (s, p) = (&cs[0], &cs[1]);
                if s.card() != 1 || p.card() != 2 {
                    return Err(HfError::NotAPair);
                }
                let x = &s.children()[0];
                if !p.mem(x) {
                    return Err(HfError::NotAPair);
                }
                let y = p.children().iter().find(|c| *c != x).unwrap();
                Ok((x.clone(), y.clone()))
            }
            _ => Err(HfError::NotAPair),
        }
    }

    pub fn hfst(&self) -> Result<HfSet, HfError> {
        self.unpair().map(|(x, _)| x)
    }

    pub fn hsnd(&self) -> Result<HfSet, HfError> {
        self.unpair().map(|(_, y)| y)
    }

    pub fn is_pair(&self) -> bool {
        self.unpair().is_ok()
    }

    /// HTuple n: the (n+2)-tuple of zeros, ⟨0, ..., 0⟩.
    pub fn htuple(n: usize) -> HfSet {
        let zero = HfSet::empty();
        let mut t = HfSet::hpair(&zero, &zero);
        for _ in 0..n {
            t = HfSet::hpair(&zero, &t);
        }
        t
    }

    /// Kirby set addition x + y = x ∪ { x + u : u ∈ y }.
    pub fn hadd(&self, y: &HfSet) -> HfSet {
        fn go(x: &HfSet, y: &HfSet, memo: &mut HashMap<HfSet, HfSet>) -> HfSet {
            if let Some(r) = memo.get(y) {
                return r.clone();
            }
            let r = HfSet::from_children(
                x.children()
                    .iter()
                    .cloned()
                    .chain(y.children().iter().map(|u| go(x, u, memo))),
            );
            memo.insert(y.clone(), r.clone());
            r
        }
        go(self, y, &mut HashMap::new())
    }

    /// Total node count of the canonical tree: 1 + Σ sizes of children.
    /// Strictly monotone under membership and subset, so it serves as the
    /// induction measure for size recursions. Can be astronomically large for
    /// shared DAGs, hence the big integer result.
    pub fn hf_size(&self) -> BigUint {
        fn go(x: &HfSet, memo: &mut HashMap<HfSet, BigUint>) -> BigUint {
            if let Some(r) = memo.get(x) {
                return r.clone();
            }
            let mut total = BigUint::from(1u32);
            for c in x.children() {
                total += go(c, memo);
            }
            memo.insert(x.clone(), total.clone());
            total
        }
        go(self, &mut HashMap::new())
    }

    /// Tree depth; a cheap well-foundedness witness.
    pub fn depth(&self) -> usize {
        fn go(x: &HfSet, memo: &mut HashMap<HfSet, usize>) -> usize {
            if let Some(&d) = memo.get(x) {
                return d;
            }
            let d = 1 + x.children().iter().map(|c| go(c, memo)).max().unwrap_or(0);
            memo.insert(x.clone(), d);
            d
        }
        go(self, &mut HashMap::new())
    }

    /// Ackermann code f(x) = Σ { 2^f(y) | y ∈ x }.
    ///
    /// Fails with [`HfError::TooLarge`] instead of attempting to materialize
    /// numbers beyond 2^26 bits.
    pub fn ack_encode(&self) -> Result<BigUint, HfError> {
        const BIT_CAP: u64 = 1 << 26;
        fn go(x: &HfSet, memo: &mut HashMap<HfSet, BigUint>) -> Result<BigUint, HfError> {
            if let Some(r) = memo.get(x) {
                return Ok(r.clone());
            }
            let mut total = BigUint::default();
            for c in x.children() {
                let fc = go(c, memo)?;
                if fc >= BigUint::from(BIT_CAP) {
                    return Err(HfError::TooLarge);
                }
                let mut bit = BigUint::from(1u32);
                bit <<= u64::try_from(&fc).unwrap();
                total += bit;
            }
            memo.insert(x.clone(), total.clone());
            Ok(total)
        }
        go(self, &mut HashMap::new())
    }

    /// Inverse of [`ack_encode`](HfSet::ack_encode); enumerates the HF
    /// universe in its canonical total order.
    pub fn ack_decode(n: &BigUint) -> HfSet {
        fn go(n: &BigUint, memo: &mut HashMap<BigUint, HfSet>) -> HfSet {
            if let Some(r) = memo.get(n) {
                return r.clone();
            }
            let mut children = Vec::new();
            for pos in 0..n.bits() {
                if n.bit(pos) {
                    children.push(go(&BigUint::from(pos), memo));
                }
            }
            let r = HfSet::from_children(children);
            memo.insert(n.clone(), r);
            memo[n].clone()
        }
        go(n, &mut HashMap::new())
    }

    pub fn ack_decode_u64(n: u64) -> HfSet {
        HfSet::ack_decode(&BigUint::from(n))
    }

    /// app s k: the unique v with ⟨k, v⟩ ∈ s.
    pub fn seq_app(&self, k: &HfSet) -> Result<HfSet, HfError> {
        let mut found: Option<HfSet> = None;
        for c in self.children() {
            if let Ok((a, b)) = c.unpair() {
                if a == *k {
                    match &found {
                        Some(prev) if *prev != b => return Err(HfError::Ambiguous),
                        _ => found = Some(b),
                    }
                }
            }
        }
        found.ok_or(HfError::Absent)
    }

    /// Is every element of `self` an ordered pair, no key mapped twice?
    pub fn is_hfunction(&self) -> bool {
        let mut seen: HashMap<HfSet, HfSet> = HashMap::new();
        for c in self.children() {
            match c.unpair() {
                Ok((a, b)) => match seen.get(&a) {
                    Some(prev) if *prev != b => return false,
                    _ => {
                        seen.insert(a, b);
                    }
                },
                Err(_) => return false,
            }
        }
        true
    }

    /// LstSeq s k y: k is an ordinal, s is a single-valued set of pairs whose
    /// domain includes {0, ..., k}, and ⟨k, y⟩ ∈ s. Sequences are allowed to
    /// be longer than necessary.
    pub fn is_lstseq(&self, k: &HfSet, y: &HfSet) -> bool {
        let Ok(n) = k.as_ord() else { return false };
        if !self.is_hfunction() {
            return false;
        }
        for i in 0..=n {
            if self.seq_app(&HfSet::ord_of(i)).is_err() {
                return false;
            }
        }
        self.mem(&HfSet::hpair(k, y))
    }

    /// The transitive closure of `self` (excluding `self` itself), in
    /// canonical order.
    pub fn transitive_closure(&self) -> Vec<HfSet> {
        let mut seen: Vec<HfSet> = Vec::new();
        let mut stack: Vec<HfSet> = self.children().to_vec();
        let mut visited: std::collections::HashSet<HfSet> = std::collections::HashSet::new();
        while let Some(x) = stack.pop() {
            if visited.insert(x.clone()) {
                stack.extend(x.children().iter().cloned());
                seen.push(x);
            }
        }
        seen.sort();
        seen
    }

    /// Parses the HF literal grammar: `{}` for 0, `{e1,e2,...}` otherwise.
    /// Accepts arbitrary child order and duplicates; canonicalizes.
    pub fn parse(text: &str) -> Result<HfSet, String> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let set = parse_set(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(format!("trailing input at byte {pos}"));
        }
        Ok(set)
    }
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() && (b[*pos] as char).is_whitespace() {
        *pos += 1;
    }
}

fn parse_set(b: &[u8], pos: &mut usize) -> Result<HfSet, String> {
    skip_ws(b, pos);
    if *pos >= b.len() || b[*pos] != b'{' {
        return Err(format!("expected '{{' at byte {pos}", pos = *pos));
    }
    *pos += 1;
    skip_ws(b, pos);
    let mut children = Vec::new();
    if *pos < b.len() && b[*pos] == b'}' {
        *pos += 1;
        return Ok(HfSet::from_children(children));
    }
    loop {
        children.push(parse_set(b, pos)?);
        skip_ws(b, pos);
        match b.get(*pos) {
            Some(b',') => {
                *pos += 1;
            }
            Some(b'}') => {
                *pos += 1;
                return Ok(HfSet::from_children(children));
            }
            _ => return Err(format!("expected ',' or '}}' at byte {pos}", pos = *pos)),
        }
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.children().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

/// A sequence viewed as a relation together with its final index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqView {
    pub relation: HfSet,
    pub length_ordinal: HfSet,
}

impl SeqView {
    pub fn new(relation: HfSet, length_ordinal: HfSet) -> SeqView {
        SeqView {
            relation,
            length_ordinal,
        }
    }

    /// Checks the invariants: every element is a pair with an ordinal key and
    /// the relation is single-valued.
    pub fn is_wellformed(&self) -> bool {
        self.length_ordinal.is_ord()
            && self.relation.is_hfunction()
            && self
                .relation
                .children()
                .iter()
                .all(|c| c.unpair().map(|(a, _)| a.is_ord()).unwrap_or(false))
    }

    pub fn app(&self, k: &HfSet) -> Result<HfSet, HfError> {
        self.relation.seq_app(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(n: usize) -> HfSet {
        HfSet::ord_of(n)
    }

    #[test]
    fn eats_basics() {
        let zero = HfSet::empty();
        let one = zero.eats(&zero);
        assert_eq!(one, HfSet::from_children([zero.clone()]));
        assert_eq!(one.eats(&zero), one, "idempotent insertion");
        // eats(eats(0,0), eats(0,0)) = {0,{0}} = ordinal 2, by expanding HF2.
        let two = one.eats(&one);
        assert_eq!(two, o(2));
    }

    #[test]
    fn mem_examples() {
        let zero = HfSet::empty();
        assert!(!zero.mem(&zero));
        assert!(o(1).mem(&zero));
        assert!(o(2).mem(&o(1)));
    }

    #[test]
    fn subset_examples() {
        assert!(HfSet::empty().subset(&o(2)));
        assert!(o(1).subset(&o(2)));
        let s = HfSet::from_children([o(1)]);
        assert!(!s.subset(&o(1)), "{{0}} has child {{0}} which is not in {{0}}");
    }

    #[test]
    fn ordinals() {
        assert_eq!(o(0), HfSet::empty());
        assert_eq!(o(2), HfSet::from_children([o(0), o(1)]));
        assert_eq!(o(2).as_ord(), Ok(2));
        let not_ord = HfSet::from_children([o(1)]);
        assert_eq!(not_ord.as_ord(), Err(HfError::NotAnOrdinal));
    }

    #[test]
    fn pair_laws() {
        let a = o(0);
        let b = o(1);
        let p = HfSet::hpair(&a, &b);
        assert_eq!(p.hfst().unwrap(), a);
        assert_eq!(p.hsnd().unwrap(), b);
        // Kuratowski with x = y collapses to {{0}}.
        assert_eq!(
            HfSet::hpair(&a, &a),
            HfSet::from_children([HfSet::from_children([a.clone()])])
        );
        assert_ne!(HfSet::hpair(&a, &b), HfSet::hpair(&b, &a));
        assert_eq!(o(2).unpair(), Err(HfError::NotAPair));
    }

    #[test]
    fn htuple_shape() {
        let zero = HfSet::empty();
        assert_eq!(HfSet::htuple(0), HfSet::hpair(&zero, &zero));
        assert_eq!(HfSet::htuple(1), HfSet::hpair(&zero, &HfSet::htuple(0)));
        // The de Bruijn tag is the 8-tuple of zeros.
        let t6 = HfSet::htuple(6);
        let mut count = 2;
        let mut cur = t6.clone();
        while let Ok((a, b)) = cur.unpair() {
            if a == zero && cur != zero {
                if b == zero {
                    break;
                }
                count += 1;
                cur = b;
            } else {
                break;
            }
        }
        assert_eq!(count, 8);
    }

    #[test]
    fn hadd_examples() {
        let x = HfSet::from_children([o(1)]);
        assert_eq!(x.hadd(&HfSet::empty()), x);
        assert_eq!(o(2).hadd(&o(3)), o(5));
        assert_eq!(HfSet::empty().hadd(&o(1)), o(1), "0 + {{0}} = {{0}}");
    }

    #[test]
    fn hf_size_examples() {
        assert_eq!(HfSet::empty().hf_size(), BigUint::from(1u32));
        assert_eq!(o(1).hf_size(), BigUint::from(2u32));
        assert_eq!(o(2).hf_size(), BigUint::from(4u32));
    }

    #[test]
    fn ack_examples() {
        assert_eq!(HfSet::empty().ack_encode().unwrap(), BigUint::default());
        assert_eq!(HfSet::ack_decode_u64(3), o(2), "3 = 2^0 + 2^1");
        for n in 0..2000u64 {
            let x = HfSet::ack_decode_u64(n);
            assert_eq!(x.ack_encode().unwrap(), BigUint::from(n));
        }
    }

    #[test]
    fn ack_order_matches_codes() {
        let mut prev = HfSet::ack_decode_u64(0);
        for n in 1..500u64 {
            let cur = HfSet::ack_decode_u64(n);
            assert!(prev < cur, "order must follow codes at {n}");
            prev = cur;
        }
    }

    #[test]
    fn seq_app_examples() {
        let p = HfSet::hpair(&o(0), &o(1));
        let s = HfSet::from_children([p]);
        assert_eq!(s.seq_app(&o(0)).unwrap(), o(1));
        assert_eq!(HfSet::empty().seq_app(&o(0)), Err(HfError::Absent));
        let amb = HfSet::from_children([
            HfSet::hpair(&o(0), &o(0)),
            HfSet::hpair(&o(0), &o(1)),
        ]);
        assert_eq!(amb.seq_app(&o(0)), Err(HfError::Ambiguous));
    }

    #[test]
    fn lstseq_examples() {
        let s0 = HfSet::from_children([HfSet::hpair(&o(0), &o(0))]);
        assert!(s0.is_lstseq(&o(0), &o(0)));
        assert!(!s0.is_lstseq(&o(1), &o(0)), "domain misses 1");
        let s = HfSet::from_children([
            HfSet::hpair(&o(0), &o(0)),
            HfSet::hpair(&o(1), &o(1)),
            HfSet::hpair(&o(5), &o(0)),
        ]);
        assert!(s.is_lstseq(&o(1), &o(1)), "extra pairs permitted");
    }

    #[test]
    fn literal_round_trip() {
        let x = HfSet::hpair(&o(2), &o(1));
        let printed = x.to_string();
        assert_eq!(HfSet::parse(&printed).unwrap(), x);
        // arbitrary order and duplicates are canonicalized
        assert_eq!(HfSet::parse("{{},{},{{}}}").unwrap(), o(2));
        assert_eq!(HfSet::parse("{{{}},{}}").unwrap(), o(2));
        assert_eq!(HfSet::parse("{}").unwrap(), HfSet::empty());
    }

    #[test]
    fn ordinal_linearity_small() {
        for m in 0..20 {
            for n in 0..20 {
                let a = o(m);
                let b = o(n);
                // a ∈ b, a = b, b ∈ a: exactly one holds, matching m<n, m=n, m>n
                let flags = [b.mem(&a), a == b, a.mem(&b)];
                assert_eq!(flags.iter().filter(|f| **f).count(), 1);
                assert_eq!(flags[0], m < n);
                assert_eq!(flags[1], m == n);
                assert_eq!(flags[2], m > n);
            }
        }
    }
}
