use super::TailRule;
use crate::linalg::{C64, ZERO};

/// `c * ratio^(j - anchor) * prod_k 1 / (j + pole_k)`, used only for
/// `j >= tail_start` where every `j + pole_k >= 1`. With `|ratio| <= 1` the
/// modulus is nonincreasing in `j`.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    c: C64,
    ratio: f64,
    anchor: i64,
    poles: Vec<i64>,
}

impl Term {
    fn at(&self, j: i64) -> C64 {
        let mut v = self.c;
        if self.ratio != 1.0 {
            v *= self.ratio.powi((j - self.anchor) as i32);
        }
        for &a in &self.poles {
            v /= (j + a) as f64;
        }
        v
    }

    fn same_shape(&self, other: &Term) -> bool {
        self.ratio == other.ratio && self.poles == other.poles
    }

    fn rebased(&self, anchor: i64) -> Term {
        let mut t = self.clone();
        if t.ratio != 1.0 && anchor != t.anchor {
            t.c *= t.ratio.powi((anchor - t.anchor) as i32);
        }
        t.anchor = anchor;
        t
    }
}

/// Entry sequence `s(j), j >= 0`: explicit values below `prefix.len()`, a
/// finite sum of monotone terms from there on.
#[derive(Debug, Clone, PartialEq)]
pub struct Seq {
    prefix: Vec<C64>,
    terms: Vec<Term>,
}

impl Seq {
    pub fn zero() -> Seq {
        Seq {
            prefix: Vec::new(),
            terms: Vec::new(),
        }
    }

    pub fn finite(values: Vec<C64>) -> Seq {
        Seq {
            prefix: values,
            terms: Vec::new(),
        }
        .normalized()
    }

    pub fn constant(c: C64) -> Seq {
        Seq::rule(&[], &TailRule::Constant { c })
    }

    pub fn rule(prefix: &[C64], tail: &TailRule) -> Seq {
        let p = prefix.len() as i64;
        let term = match *tail {
            TailRule::Constant { c } => Term {
                c,
                ratio: 1.0,
                anchor: 0,
                poles: Vec::new(),
            },
            TailRule::Harmonic { scale } => Term {
                c: scale,
                ratio: 1.0,
                anchor: 0,
                poles: vec![1],
            },
            TailRule::Geometric { c, ratio } => Term {
                c,
                ratio,
                anchor: p,
                poles: Vec::new(),
            },
        };
        Seq {
            prefix: prefix.to_vec(),
            terms: vec![term],
        }
        .normalized()
    }

    /// First index governed by the terms.
    pub fn tail_start(&self) -> usize {
        self.prefix.len()
    }

    pub fn has_tail(&self) -> bool {
        !self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn at(&self, j: usize) -> C64 {
        if j < self.prefix.len() {
            self.prefix[j]
        } else {
            self.terms.iter().map(|t| t.at(j as i64)).sum()
        }
    }

    fn at_signed(&self, j: i64) -> C64 {
        if j < 0 {
            ZERO
        } else {
            self.at(j as usize)
        }
    }

    /// Upper bound on `sup_{j >= from} |s(j)|`, nonincreasing in `from`;
    /// requires `from >= tail_start()`.
    pub fn tail_bound(&self, from: usize) -> f64 {
        debug_assert!(from >= self.prefix.len());
        self.terms.iter().map(|t| t.at(from as i64).norm()).sum()
    }

    /// `lim_j |s(j)|`.
    pub fn limit_modulus(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.ratio == 1.0 && t.poles.is_empty())
            .map(|t| t.c)
            .sum::<C64>()
            .norm()
    }

    /// Enclosure `(lower, upper)` of `sup_j |s(j)|`; equal bounds when the
    /// tail is a single monotone term.
    pub fn sup_abs(&self) -> (f64, f64) {
        let p = self.prefix.len();
        let head = self.prefix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        match self.terms.len() {
            0 => (head, head),
            1 => {
                let v = head.max(self.terms[0].at(p as i64).norm());
                (v, v)
            }
            _ => {
                let mut lower = head.max(self.limit_modulus());
                let mut j = p;
                let mut stop = p + 64;
                loop {
                    while j < stop {
                        lower = lower.max(self.at(j).norm());
                        j += 1;
                    }
                    let upper = lower.max(self.tail_bound(stop));
                    if upper - lower <= 1e-13 * upper || stop >= p + (1 << 16) {
                        return (lower, upper);
                    }
                    stop = p + 2 * (stop - p);
                }
            }
        }
    }

    fn materialize_to(&mut self, len: usize) {
        while self.prefix.len() < len {
            let j = self.prefix.len();
            let v = self.terms.iter().map(|t| t.at(j as i64)).sum();
            self.prefix.push(v);
        }
    }

    fn normalized(mut self) -> Seq {
        let mut merged: Vec<Term> = Vec::new();
        for t in self.terms.drain(..) {
            if t.c == ZERO {
                continue;
            }
            if let Some(m) = merged.iter_mut().find(|m| m.same_shape(&t)) {
                let anchor = m.anchor.max(t.anchor);
                let (a, b) = (m.rebased(anchor), t.rebased(anchor));
                *m = Term { c: a.c + b.c, ..a };
            } else {
                merged.push(t);
            }
        }
        merged.retain(|t| t.c != ZERO);
        // a zero ratio leaves a single spike; keep it explicit
        let spikes: Vec<Term> = merged.iter().filter(|t| t.ratio == 0.0).cloned().collect();
        merged.retain(|t| t.ratio != 0.0);
        self.terms = merged;
        for s in spikes {
            let p0 = self.prefix.len();
            let end = (s.anchor + 1).max(p0 as i64) as usize;
            self.materialize_to(end);
            for j in p0..end {
                self.prefix[j] += s.at(j as i64);
            }
        }
        if self.terms.is_empty() {
            while self.prefix.last() == Some(&ZERO) {
                self.prefix.pop();
            }
        }
        self
    }

    pub fn add(&self, other: &Seq) -> Seq {
        let len = self.prefix.len().max(other.prefix.len());
        let prefix = (0..len).map(|j| self.at(j) + other.at(j)).collect();
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Seq { prefix, terms }.normalized()
    }

    pub fn scale(&self, s: C64) -> Seq {
        Seq {
            prefix: self.prefix.iter().map(|z| z * s).collect(),
            terms: self
                .terms
                .iter()
                .map(|t| Term { c: t.c * s, ..t.clone() })
                .collect(),
        }
        .normalized()
    }

    pub fn conj(&self) -> Seq {
        Seq {
            prefix: self.prefix.iter().map(|z| z.conj()).collect(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    c: t.c.conj(),
                    ..t.clone()
                })
                .collect(),
        }
    }

    /// `t(j) = s(j + b)`, zero where `j + b < 0`.
    pub fn offset(&self, b: i64) -> Seq {
        let p = self.prefix.len() as i64;
        let new_p = (p - b).max(0);
        let prefix = (0..new_p).map(|j| self.at_signed(j + b)).collect();
        let terms = if self.terms.is_empty() {
            Vec::new()
        } else {
            self.terms
                .iter()
                .map(|t| Term {
                    c: t.c,
                    ratio: t.ratio,
                    anchor: t.anchor - b,
                    poles: t.poles.iter().map(|a| a + b).collect(),
                })
                .collect()
        };
        Seq { prefix, terms }.normalized()
    }

    /// Zero below `start`.
    pub fn masked(&self, start: usize) -> Seq {
        let mut s = self.clone();
        if s.has_tail() {
            s.materialize_to(start);
        }
        for v in s.prefix.iter_mut().take(start) {
            *v = ZERO;
        }
        s.normalized()
    }

    /// Zero from `end` on.
    pub fn truncated(&self, end: usize) -> Seq {
        let mut s = self.clone();
        s.materialize_to(end);
        s.prefix.truncate(end);
        s.terms.clear();
        s.normalized()
    }

    pub fn mul(&self, other: &Seq) -> Seq {
        let len = self.prefix.len().max(other.prefix.len());
        let prefix = (0..len).map(|j| self.at(j) * other.at(j)).collect();
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let anchor = a.anchor.max(b.anchor);
                let (ra, rb) = (a.rebased(anchor), b.rebased(anchor));
                let mut poles: Vec<i64> = ra.poles.iter().chain(&rb.poles).copied().collect();
                poles.sort_unstable();
                terms.push(Term {
                    c: ra.c * rb.c,
                    ratio: ra.ratio * rb.ratio,
                    anchor,
                    poles,
                });
            }
        }
        Seq { prefix, terms }.normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn check(s: &Seq, f: impl Fn(usize) -> C64) {
        for j in 0..200 {
            assert!((s.at(j) - f(j)).norm() <= 1e-15 * (1.0 + f(j).norm()), "j = {j}");
        }
    }

    #[test]
    fn rules() {
        let h = Seq::rule(&[c(5.0)], &TailRule::harmonic(2.0));
        check(&h, |j| if j == 0 { c(5.0) } else { c(2.0 / (j as f64 + 1.0)) });
        let g = Seq::rule(&[c(1.0), c(1.0)], &TailRule::Geometric { c: c(3.0), ratio: 0.5 });
        check(&g, |j| if j < 2 { c(1.0) } else { c(3.0 * 0.5f64.powi(j as i32 - 2)) });
    }

    #[test]
    fn cancellation_merges_terms() {
        let a = Seq::constant(c(1.25));
        let b = Seq::constant(c(1.0));
        let d = a.add(&b.scale(c(-1.0)));
        assert_eq!(d.term_count(), 1);
        assert_eq!(d.sup_abs(), (0.25, 0.25));
        let z = a.add(&a.scale(c(-1.0)));
        assert_eq!(z, Seq::zero());
    }

    #[test]
    fn algebra_matches_pointwise() {
        let a = Seq::rule(&[c(2.0), c(-1.0)], &TailRule::harmonic(1.5));
        let b = Seq::rule(&[c(0.5)], &TailRule::Geometric { c: c(2.0), ratio: -0.5 });
        let s = a.add(&b);
        check(&s, |j| a.at(j) + b.at(j));
        let p = a.mul(&b);
        check(&p, |j| a.at(j) * b.at(j));
        let o = a.offset(3);
        check(&o, |j| a.at(j + 3));
        let o = a.offset(-2);
        check(&o, |j| if j < 2 { ZERO } else { a.at(j - 2) });
        let m = a.masked(5);
        check(&m, |j| if j < 5 { ZERO } else { a.at(j) });
        let t = a.truncated(4);
        check(&t, |j| if j < 4 { a.at(j) } else { ZERO });
    }

    #[test]
    fn harmonic_product_sup_is_exact() {
        let d = Seq::rule(&[], &TailRule::harmonic(0.1));
        let t = Seq::rule(&[], &TailRule::harmonic(1.0));
        let p = d.mul(&t);
        assert_eq!(p.term_count(), 1);
        assert_eq!(p.sup_abs(), (0.1, 0.1));
    }

    #[test]
    fn multi_term_enclosure_brackets_truth() {
        let a = Seq::constant(c(1.0)).add(&Seq::rule(&[], &TailRule::harmonic(-3.0)));
        let (lo, hi) = a.sup_abs();
        let truth = (0..100000).map(|j| a.at(j).norm()).fold(0.0, f64::max);
        assert!(lo <= truth + 1e-15 && truth <= hi + 1e-15, "{lo} {truth} {hi}");
        assert!(hi - lo < 1e-12);
    }
}
