use super::OclError;

/// The index space of one kernel launch and its work-group decomposition.
///
/// Linear ids use dimension 0 as the fastest-varying axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdRange {
    global: Vec<usize>,
    local: Vec<usize>,
    offset: Vec<usize>,
}

impl NdRange {
    pub fn new(global: &[usize], local: &[usize], offset: &[usize]) -> Result<Self, OclError> {
        let dims = global.len();
        let invalid = |msg: String| OclError::InvalidNdRange(msg);
        if !(1..=3).contains(&dims) {
            return Err(invalid(format!("expected 1 to 3 dimensions, got {dims}")));
        }
        if local.len() != dims || offset.len() != dims {
            return Err(invalid(format!(
                "dimension mismatch: global {dims}, local {}, offset {}",
                local.len(),
                offset.len()
            )));
        }
        for d in 0..dims {
            if global[d] == 0 || local[d] == 0 {
                return Err(invalid(format!("zero extent in dimension {d}")));
            }
            if !global[d].is_multiple_of(local[d]) {
                return Err(invalid(format!(
                    "global size {} not divisible by local size {} in dimension {d}",
                    global[d], local[d]
                )));
            }
        }
        Ok(NdRange { global: global.to_vec(), local: local.to_vec(), offset: offset.to_vec() })
    }

    /// Zero offset.
    pub fn with_local(global: &[usize], local: &[usize]) -> Result<Self, OclError> {
        Self::new(global, local, &vec![0; global.len()])
    }

    pub fn dims(&self) -> usize {
        self.global.len()
    }

    pub fn global_size(&self) -> &[usize] {
        &self.global
    }

    pub fn local_size(&self) -> &[usize] {
        &self.local
    }

    pub fn offset(&self) -> &[usize] {
        &self.offset
    }

    pub fn groups_per_dim(&self) -> Vec<usize> {
        self.global.iter().zip(&self.local).map(|(g, l)| g / l).collect()
    }

    pub fn group_count(&self) -> usize {
        self.groups_per_dim().iter().product()
    }

    pub fn group_size(&self) -> usize {
        self.local.iter().product()
    }

    pub fn item_count(&self) -> usize {
        self.global.iter().product()
    }

    pub fn group_coords(&self, linear: usize) -> [usize; 3] {
        unravel(linear, &self.groups_per_dim())
    }

    pub fn local_coords(&self, linear: usize) -> [usize; 3] {
        unravel(linear, &self.local)
    }

    /// Global id of local item `local` within `group`, offset included.
    pub fn global_id(&self, group: [usize; 3], local: [usize; 3]) -> [usize; 3] {
        let mut id = [0; 3];
        for d in 0..self.dims() {
            id[d] = self.offset[d] + group[d] * self.local[d] + local[d];
        }
        id
    }

    /// Linear index of a global id with the offset removed.
    pub fn global_linear(&self, id: [usize; 3]) -> usize {
        let mut linear = 0;
        let mut stride = 1;
        for ((&i, &off), &g) in id.iter().zip(&self.offset).zip(&self.global).take(self.dims()) {
            linear += (i - off) * stride;
            stride *= g;
        }
        linear
    }
}

fn unravel(mut linear: usize, extents: &[usize]) -> [usize; 3] {
    let mut out = [0; 3];
    for (d, &e) in extents.iter().enumerate() {
        out[d] = linear % e;
        linear /= e;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_examples() {
        let nd = NdRange::new(&[24, 24], &[8, 8], &[0, 0]).unwrap();
        assert_eq!(nd.group_count(), 9);
        assert_eq!(nd.groups_per_dim(), [3, 3]);
        assert!(NdRange::new(&[10], &[4], &[0]).is_err());
        let single = NdRange::new(&[576], &[576], &[0]).unwrap();
        assert_eq!(single.group_count(), 1);
        assert_eq!(single.group_size(), 576);
    }

    #[test]
    fn validation_errors() {
        assert!(NdRange::new(&[0], &[1], &[0]).is_err());
        assert!(NdRange::new(&[4], &[0], &[0]).is_err());
        assert!(NdRange::new(&[4, 4], &[4], &[0, 0]).is_err());
        assert!(NdRange::new(&[1, 1, 1, 1], &[1, 1, 1, 1], &[0, 0, 0, 0]).is_err());
    }

    #[test]
    fn ids_respect_offset() {
        let nd = NdRange::new(&[8, 4], &[4, 2], &[3, 1]).unwrap();
        let g = nd.group_coords(3); // groups per dim = [2, 2]
        assert_eq!(g, [1, 1, 0]);
        let id = nd.global_id(g, [2, 1, 0]);
        assert_eq!(id, [3 + 4 + 2, 1 + 2 + 1, 0]);
        assert_eq!(nd.global_linear(id), 6 + 3 * 8);
    }
}
