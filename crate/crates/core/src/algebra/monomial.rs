use std::cmp::Ordering;
use std::fmt;

/// Exponent vector with trailing zeros trimmed, so vectors over a prefix of a
/// variable list compare equal to the same vector over the longer list.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<u16>);

impl MultiIndex {
    pub fn new(mut exps: Vec<u16>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        MultiIndex(exps)
    }

    pub fn zero() -> Self {
        MultiIndex(Vec::new())
    }

    /// Unit vector `e_i`.
    pub fn unit(i: usize) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = 1;
        MultiIndex(v)
    }

    /// Multi-index counting the occurrences of each entry of `indices`.
    pub fn from_indices(indices: &[usize]) -> Self {
        let mut v = Vec::new();
        for &i in indices {
            if v.len() <= i {
                v.resize(i + 1, 0);
            }
            v[i] += 1;
        }
        MultiIndex::new(v)
    }

    /// Sorted list of indices, each repeated by its exponent.
    pub fn to_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            out.extend(std::iter::repeat_n(i, e as usize));
        }
        out
    }

    pub fn get(&self, i: usize) -> u16 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    /// Number of leading slots in use; variables beyond it have exponent 0.
    pub fn span(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (long, short) = if self.0.len() >= other.0.len() { (self, other) } else { (other, self) };
        let mut v = long.0.clone();
        for (a, b) in v.iter_mut().zip(short.0.iter()) {
            *a += *b;
        }
        MultiIndex(v)
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut v = self.0.clone();
        for (a, b) in v.iter_mut().zip(other.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(MultiIndex::new(v))
    }

    pub fn incremented(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        if v.len() <= i {
            v.resize(i + 1, 0);
        }
        v[i] += 1;
        MultiIndex(v)
    }

    pub fn decremented(&self, i: usize) -> Option<Self> {
        if self.get(i) == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[i] -= 1;
        Some(MultiIndex::new(v))
    }

    /// Multi-indices of total degree exactly `d` in `nvars` variables, in
    /// descending graded-lexicographic order.
    pub fn all_of_degree(nvars: usize, d: u32) -> Vec<MultiIndex> {
        fn rec(nvars: usize, pos: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<MultiIndex>) {
            if pos + 1 == nvars {
                cur.push(left as u16);
                out.push(MultiIndex::new(cur.clone()));
                cur.pop();
                return;
            }
            for e in (0..=left).rev() {
                cur.push(e as u16);
                rec(nvars, pos + 1, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if d == 0 {
                out.push(MultiIndex::zero());
            }
            return out;
        }
        rec(nvars, 0, d, &mut Vec::new(), &mut out);
        out
    }

    /// Multi-indices of total degree at most `d`, ascending graded-lex order.
    pub fn all_up_to(nvars: usize, d: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for k in 0..=d {
            let mut layer = Self::all_of_degree(nvars, k);
            layer.reverse();
            out.extend(layer);
        }
        out
    }
}

impl Ord for MultiIndex {
    /// Graded lexicographic: total degree first, then a larger exponent of an
    /// earlier variable is greater.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                match self.get(i).cmp(&other.get(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let x2 = MultiIndex::new(vec![2]);
        let xy = MultiIndex::new(vec![1, 1]);
        let y2 = MultiIndex::new(vec![0, 2]);
        let x = MultiIndex::unit(0);
        assert!(x2 > xy && xy > y2 && y2 > x);
        assert_eq!(MultiIndex::new(vec![1, 0, 0]), MultiIndex::unit(0));
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(MultiIndex::all_of_degree(3, 2).len(), 6);
        assert_eq!(MultiIndex::all_up_to(2, 2).len(), 6);
        let layer = MultiIndex::all_of_degree(2, 2);
        assert!(layer.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn indices_round_trip() {
        let m = MultiIndex::from_indices(&[2, 0, 2]);
        assert_eq!(m.to_indices(), vec![0, 2, 2]);
        assert_eq!(m.checked_div(&MultiIndex::unit(2)), Some(MultiIndex::new(vec![1, 0, 1])));
        assert_eq!(m.checked_div(&MultiIndex::unit(1)), None);
    }
}
