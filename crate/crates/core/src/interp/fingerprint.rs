//! Canonical fingerprints: equal for interpretations that differ only in
//! the ids of their elements, as long as individual names are preserved.
//!
//! Named elements are ordered by their smallest individual name. Anonymous
//! elements are split into classes by colour refinement and the fingerprint
//! is the smallest encoding over all orders of the anonymous elements that
//! respect the class order. When the number of such orders exceeds
//! [`MAX_ORDERS`], elements inside a class keep their domain order, which
//! keeps fingerprints deterministic but may separate isomorphic inputs.

use std::collections::BTreeMap;
use std::fmt::{self, Write};

use super::Interpretation;

const MAX_ORDERS: usize = 5040;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(Vec<u8>);

impl Fingerprint {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// 64-bit FNV-1a digest of the canonical encoding.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &b in &self.0 {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.digest())
    }
}

pub(super) fn canonical_fingerprint(i: &Interpretation) -> Fingerprint {
    let n = i.size();
    let concepts: Vec<_> = i.concepts.iter().filter(|(_, e)| !e.is_clear()).collect();
    let roles: Vec<_> = i.roles.iter().filter(|(_, r)| !r.is_empty()).collect();

    let mut named: Vec<usize> = Vec::new();
    for &e in i.individuals.values() {
        if !named.contains(&e) {
            named.push(e);
        }
    }
    let anon: Vec<usize> = (0..n).filter(|e| !named.contains(e)).collect();

    // Colour refinement over anonymous elements.
    let mut colour: BTreeMap<usize, usize> = BTreeMap::new();
    let initial: Vec<Vec<u64>> = anon
        .iter()
        .map(|&e| {
            let mut sig = Vec::new();
            for (_, ext) in &concepts {
                sig.push(ext.contains(e) as u64);
            }
            for (_, rel) in &roles {
                sig.push(rel.contains(e, e) as u64);
                for &j in &named {
                    sig.push(rel.contains(e, j) as u64 * 2 + rel.contains(j, e) as u64);
                }
            }
            sig
        })
        .collect();
    assign_ranks(&anon, &initial, &mut colour);
    loop {
        let classes_before = colour.values().collect::<std::collections::BTreeSet<_>>().len();
        let sigs: Vec<Vec<u64>> = anon
            .iter()
            .map(|&e| {
                let mut sig = vec![colour[&e] as u64];
                for (k, (_, rel)) in roles.iter().enumerate() {
                    let mut out: Vec<u64> = anon
                        .iter()
                        .filter(|&&f| f != e && rel.contains(e, f))
                        .map(|f| colour[f] as u64)
                        .collect();
                    let mut inc: Vec<u64> = anon
                        .iter()
                        .filter(|&&f| f != e && rel.contains(f, e))
                        .map(|f| colour[f] as u64)
                        .collect();
                    out.sort_unstable();
                    inc.sort_unstable();
                    sig.push(u64::MAX - k as u64);
                    sig.extend(out);
                    sig.push(u64::MAX);
                    sig.extend(inc);
                }
                sig
            })
            .collect();
        assign_ranks(&anon, &sigs, &mut colour);
        let classes_after = colour.values().collect::<std::collections::BTreeSet<_>>().len();
        if classes_after == classes_before {
            break;
        }
    }

    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in &anon {
        classes.entry(colour[&e]).or_default().push(e);
    }
    let class_list: Vec<Vec<usize>> = classes.into_values().collect();
    let orders: usize = class_list
        .iter()
        .map(|c| (1..=c.len()).product::<usize>())
        .try_fold(1usize, |acc, x| acc.checked_mul(x))
        .unwrap_or(usize::MAX);

    let mut best: Option<Vec<u8>> = None;
    let mut consider = |order: &[usize]| {
        let enc = encode(i, &named, order, &concepts, &roles);
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
    };
    if orders > MAX_ORDERS {
        let order: Vec<usize> = class_list.concat();
        consider(&order);
    } else {
        let mut perms: Vec<Vec<usize>> = class_list.clone();
        let mut order: Vec<usize> = Vec::with_capacity(anon.len());
        permute_classes(&mut perms, 0, &mut order, &mut consider);
    }
    Fingerprint(best.unwrap_or_default())
}

fn assign_ranks(elems: &[usize], sigs: &[Vec<u64>], colour: &mut BTreeMap<usize, usize>) {
    let mut distinct: Vec<&Vec<u64>> = sigs.iter().collect();
    distinct.sort();
    distinct.dedup();
    for (e, sig) in elems.iter().zip(sigs) {
        colour.insert(*e, distinct.binary_search(&sig).unwrap());
    }
}

fn permute_classes(classes: &mut [Vec<usize>], k: usize, order: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if k == classes.len() {
        f(order);
        return;
    }
    let len = classes[k].len();
    heap_permutations(classes, k, len, order, f);
}

fn heap_permutations(classes: &mut [Vec<usize>], k: usize, m: usize, order: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if m <= 1 {
        let base = order.len();
        order.extend_from_slice(&classes[k]);
        permute_classes(classes, k + 1, order, f);
        order.truncate(base);
        return;
    }
    for j in 0..m {
        heap_permutations(classes, k, m - 1, order, f);
        if m.is_multiple_of(2) {
            classes[k].swap(j, m - 1);
        } else {
            classes[k].swap(0, m - 1);
        }
    }
}

fn encode(
    i: &Interpretation,
    named: &[usize],
    anon_order: &[usize],
    concepts: &[(&crate::syntax::Name, &super::ElemSet)],
    roles: &[(&crate::syntax::Name, &super::Relation)],
) -> Vec<u8> {
    let mut pos = vec![0usize; i.size()];
    for (k, &e) in named.iter().chain(anon_order).enumerate() {
        pos[e] = k;
    }
    let mut s = String::new();
    let _ = write!(s, "n{};u{};", i.size(), i.una as u8);
    for (o, &e) in &i.individuals {
        let _ = write!(s, "i{o}={};", pos[e]);
    }
    for (a, ext) in concepts {
        let mut members: Vec<usize> = ext.ones().map(|e| pos[e]).collect();
        members.sort_unstable();
        let _ = write!(s, "c{a}={members:?};");
    }
    for (r, rel) in roles {
        let mut pairs: Vec<(usize, usize)> = rel.pairs().map(|(a, b)| (pos[a], pos[b])).collect();
        pairs.sort_unstable();
        let _ = write!(s, "r{r}={pairs:?};");
    }
    s.into_bytes()
}
