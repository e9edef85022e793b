use crate::grid::{GridSpec, VectorField};
use crate::vector::VecN;

/// Indicator of `{u . xi > 0}` on the grid; ties `u . xi = 0` map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiField {
    pub grid: GridSpec,
    pub xi: VecN,
    pub values: Vec<u8>,
    pub mask: Vec<bool>,
}

#[inline]
pub fn chi_at(u: &VectorField, flat: usize, xi: &VecN) -> u8 {
    let mut d = 0.0;
    for k in 0..u.dim() {
        d += u.components[k][flat] * xi[k];
    }
    (d > 0.0) as u8
}

pub fn chi(u: &VectorField, xi: &VecN) -> ChiField {
    let values = (0..u.grid.len())
        .map(|i| if u.mask[i] { chi_at(u, i, xi) } else { 0 })
        .collect();
    ChiField {
        grid: u.grid.clone(),
        xi: *xi,
        values,
        mask: u.mask.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_maps_to_zero() {
        let g = GridSpec::cube(3, 4, 0.0, 1.0).unwrap();
        let u = VectorField::from_fn(&g, |_| Some(VecN::basis(3, 2)));
        assert!(chi(&u, &VecN::basis(3, 2)).values.iter().all(|&c| c == 1));
        assert!(chi(&u, &VecN::basis(3, 0)).values.iter().all(|&c| c == 0));
        assert!(chi(&u, &-VecN::basis(3, 2)).values.iter().all(|&c| c == 0));
    }
}
