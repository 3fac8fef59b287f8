//! Bitset over every period of an axis with `n` points, laid out row by
//! start point: row `s` holds the periods `[s, s]` .. `[s, n-1]`.

use crate::timecore::Period;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PeriodSet {
    n: usize,
    words: Vec<u64>,
}

impl PeriodSet {
    pub(crate) fn empty(n: usize) -> PeriodSet {
        let bits = n * (n + 1) / 2;
        PeriodSet {
            n,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    fn index(&self, s: usize, e: usize) -> usize {
        // rows before s hold n, n-1, ..., n-s+1 entries
        s * self.n - s * s.saturating_sub(1) / 2 + (e - s)
    }

    pub(crate) fn insert(&mut self, p: Period) {
        let i = self.index(p.start() as usize, p.end() as usize);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn contains(&self, p: &Period) -> bool {
        let (s, e) = (p.start() as usize, p.end() as usize);
        if e >= self.n {
            return false;
        }
        let i = self.index(s, e);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set_range(&mut self, from: usize, to_inclusive: usize) {
        let mut i = from;
        while i <= to_inclusive {
            let w = i / 64;
            let b = i % 64;
            if b == 0 && i + 63 <= to_inclusive {
                self.words[w] = u64::MAX;
                i += 64;
            } else {
                self.words[w] |= 1 << b;
                i += 1;
            }
        }
    }

    /// Adds every subperiod of `p`.
    pub(crate) fn insert_subperiods(&mut self, p: Period) {
        let (a, b) = (p.start() as usize, p.end() as usize);
        for s in a..=b {
            let base = self.index(s, s);
            self.set_range(base, base + (b - s));
        }
    }

    /// Adds every period starting in `starts` and ending no later than `last`.
    pub(crate) fn insert_starting_within(&mut self, starts: Period, last: usize) {
        for s in starts.start() as usize..=starts.end() as usize {
            if s > last {
                break;
            }
            let base = self.index(s, s);
            self.set_range(base, base + (last - s));
        }
    }

    pub(crate) fn union_with(&mut self, other: &PeriodSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub(crate) fn intersect_with(&mut self, other: &PeriodSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = Period> + '_ {
        let n = self.n;
        (0..n).flat_map(move |s| {
            let base = self.index(s, s);
            (s..n).filter_map(move |e| {
                let i = base + (e - s);
                (self.words[i / 64] >> (i % 64) & 1 == 1)
                    .then(|| Period::new(s as u32, e as u32).expect("ordered"))
            })
        })
    }

    pub(crate) fn retain(&mut self, mut keep: impl FnMut(&Period) -> bool) {
        let drop: Vec<Period> = self.iter().filter(|p| !keep(p)).collect();
        for p in drop {
            let i = self.index(p.start() as usize, p.end() as usize);
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    /// Members with no strictly larger member containing them.
    ///
    /// `dom[s][e]` records whether some member starts at or before `s` and
    /// ends at or after `e`; it is filled by a dynamic program over starts
    /// ascending and ends descending.
    pub(crate) fn maximal(&self) -> Vec<Period> {
        let n = self.n;
        let mut dom = PeriodSet::empty(n);
        for s in 0..n {
            for e in (s..n).rev() {
                let p = Period::new(s as u32, e as u32).expect("ordered");
                let here = self.contains(&p)
                    || (s > 0 && dom.contains(&Period::new(s as u32 - 1, e as u32).expect("ordered")))
                    || (e + 1 < n && dom.contains(&Period::new(s as u32, e as u32 + 1).expect("ordered")));
                if here {
                    dom.insert(p);
                }
            }
        }
        self.iter()
            .filter(|p| {
                let (s, e) = (p.start(), p.end());
                let left = s > 0 && dom.contains(&Period::new(s - 1, e).expect("ordered"));
                let right = (e as usize) + 1 < n && dom.contains(&Period::new(s, e + 1).expect("ordered"));
                !left && !right
            })
            .collect()
    }
}
