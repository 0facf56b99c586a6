use smallvec::SmallVec;
use std::fmt;

/// A finite sequence of naturals. The empty index is the bottom degree.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index(SmallVec<[u32; 4]>);

impl Index {
    pub fn empty() -> Self {
        Index(SmallVec::new())
    }

    pub fn from_slice(xs: &[u32]) -> Self {
        Index(SmallVec::from_slice(xs))
    }

    pub fn single(i: u32) -> Self {
        Index::from_slice(&[i])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<u32> {
        self.0.first().copied()
    }

    /// `i :: self`
    pub fn cons(&self, i: u32) -> Index {
        let mut v = SmallVec::with_capacity(self.0.len() + 1);
        v.push(i);
        v.extend_from_slice(&self.0);
        Index(v)
    }

    /// Drops the first entry; `None` on the empty index.
    pub fn tail(&self) -> Option<Index> {
        if self.0.is_empty() {
            None
        } else {
            Some(Index::from_slice(&self.0[1..]))
        }
    }

    /// Removes `k` from the front, if `k` is a prefix.
    pub fn strip_prefix(&self, k: &Index) -> Option<Index> {
        if prefix_leq(k, self) {
            Some(Index::from_slice(&self.0[k.len()..]))
        } else {
            None
        }
    }
}

impl From<Vec<u32>> for Index {
    fn from(v: Vec<u32>) -> Self {
        Index(SmallVec::from_vec(v))
    }
}

impl From<&[u32]> for Index {
    fn from(v: &[u32]) -> Self {
        Index::from_slice(v)
    }
}

pub fn concat(l: &Index, k: &Index) -> Index {
    let mut v = l.0.clone();
    v.extend_from_slice(&k.0);
    Index(v)
}

/// `l ⪯ k`: `l` is a prefix of `k`.
pub fn prefix_leq(l: &Index, k: &Index) -> bool {
    l.0.len() <= k.0.len() && k.0[..l.0.len()] == l.0[..]
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ix(v: &[u32]) -> Index {
        Index::from_slice(v)
    }

    #[test]
    fn concat_examples() {
        assert_eq!(concat(&ix(&[1]), &ix(&[2, 3])), ix(&[1, 2, 3]));
        assert_eq!(concat(&ix(&[]), &ix(&[5])), ix(&[5]));
        assert_eq!(concat(&ix(&[3, 2]), &ix(&[])), ix(&[3, 2]));
    }

    #[test]
    fn prefix_examples() {
        assert!(prefix_leq(&ix(&[3]), &ix(&[3, 2])));
        assert!(prefix_leq(&ix(&[]), &ix(&[7, 7])));
        assert!(!prefix_leq(&ix(&[1, 2]), &ix(&[2, 1])));
    }

    #[test]
    fn display() {
        assert_eq!(ix(&[3, 2, 1]).to_string(), "[3 2 1]");
        assert_eq!(ix(&[]).to_string(), "[]");
    }
}
