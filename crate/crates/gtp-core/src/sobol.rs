//! Unscrambled Sobol low-discrepancy sequences in Gray-code order, with
//! direction numbers from the standard published Joe-Kuo table, embedded
//! here for the first [`MAX_DIMENSION`] dimensions.

use crate::types::{Error, Result};

/// Highest supported dimensionality.
pub const MAX_DIMENSION: usize = 128;

/// Primitive polynomial (full binary encoding) and initial direction values
/// for dimensions 2..=128. Dimension 1 is the van der Corput sequence in
/// base 2 and needs no table entry.
#[rustfmt::skip]
const DIRECTIONS: &[(u32, &[u32])] = &[
    (3,&[1]),
    (7,&[1,3]),
    (11,&[1,3,1]),
    (13,&[1,1,1]),
    (19,&[1,1,3,3]),
    (25,&[1,3,5,13]),
    (37,&[1,1,5,5,17]),
    (41,&[1,1,5,5,5]),
    (47,&[1,1,7,11,19]),
    (55,&[1,1,5,1,1]),
    (59,&[1,1,1,3,11]),
    (61,&[1,3,5,5,31]),
    (67,&[1,3,3,9,7,49]),
    (91,&[1,1,1,15,21,21]),
    (97,&[1,3,1,13,27,49]),
    (103,&[1,1,1,15,7,5]),
    (109,&[1,3,1,15,13,25]),
    (115,&[1,1,5,5,19,61]),
    (131,&[1,3,7,11,23,15,103]),
    (137,&[1,3,7,13,13,15,69]),
    (143,&[1,1,3,13,7,35,63]),
    (145,&[1,3,5,9,1,25,53]),
    (157,&[1,3,1,13,9,35,107]),
    (167,&[1,3,1,5,27,61,31]),
    (171,&[1,1,5,11,19,41,61]),
    (185,&[1,3,5,3,3,13,69]),
    (191,&[1,1,7,13,1,19,1]),
    (193,&[1,3,7,5,13,19,59]),
    (203,&[1,1,3,9,25,29,41]),
    (211,&[1,3,5,13,23,1,55]),
    (213,&[1,3,7,3,13,59,17]),
    (229,&[1,3,1,3,5,53,69]),
    (239,&[1,1,5,5,23,33,13]),
    (241,&[1,1,7,7,1,61,123]),
    (247,&[1,1,7,9,13,61,49]),
    (253,&[1,3,3,5,3,55,33]),
    (285,&[1,3,1,15,31,13,49,245]),
    (299,&[1,3,5,15,31,59,63,97]),
    (301,&[1,3,1,11,11,11,77,249]),
    (333,&[1,3,1,11,27,43,71,9]),
    (351,&[1,1,7,15,21,11,81,45]),
    (355,&[1,3,7,3,25,31,65,79]),
    (357,&[1,3,1,1,19,11,3,205]),
    (361,&[1,1,5,9,19,21,29,157]),
    (369,&[1,3,7,11,1,33,89,185]),
    (391,&[1,3,3,3,15,9,79,71]),
    (397,&[1,3,7,11,15,39,119,27]),
    (425,&[1,1,3,1,11,31,97,225]),
    (451,&[1,1,1,3,23,43,57,177]),
    (463,&[1,3,7,7,17,17,37,71]),
    (487,&[1,3,1,5,27,63,123,213]),
    (501,&[1,1,3,5,11,43,53,133]),
    (529,&[1,3,5,5,29,17,47,173,479]),
    (539,&[1,3,3,11,3,1,109,9,69]),
    (545,&[1,1,1,5,17,39,23,5,343]),
    (557,&[1,3,1,5,25,15,31,103,499]),
    (563,&[1,1,1,11,11,17,63,105,183]),
    (601,&[1,1,5,11,9,29,97,231,363]),
    (607,&[1,1,5,15,19,45,41,7,383]),
    (617,&[1,3,7,7,31,19,83,137,221]),
    (623,&[1,1,1,3,23,15,111,223,83]),
    (631,&[1,1,5,13,31,15,55,25,161]),
    (637,&[1,1,3,13,25,47,39,87,257]),
    (647,&[1,1,1,11,21,53,125,249,293]),
    (661,&[1,1,7,11,11,7,57,79,323]),
    (675,&[1,1,5,5,17,13,81,3,131]),
    (677,&[1,1,7,13,23,7,65,251,475]),
    (687,&[1,3,5,1,9,43,3,149,11]),
    (695,&[1,1,3,13,31,13,13,255,487]),
    (701,&[1,3,3,1,5,63,89,91,127]),
    (719,&[1,1,3,3,1,19,123,127,237]),
    (721,&[1,1,5,7,23,31,37,243,289]),
    (731,&[1,1,5,11,17,53,117,183,491]),
    (757,&[1,1,1,5,1,13,13,209,345]),
    (761,&[1,1,3,15,1,57,115,7,33]),
    (787,&[1,3,1,11,7,43,81,207,175]),
    (789,&[1,3,1,1,15,27,63,255,49]),
    (799,&[1,3,5,3,27,61,105,171,305]),
    (803,&[1,1,5,3,1,3,57,249,149]),
    (817,&[1,1,3,5,5,57,15,13,159]),
    (827,&[1,1,1,11,7,11,105,141,225]),
    (847,&[1,3,3,5,27,59,121,101,271]),
    (859,&[1,3,5,9,11,49,51,59,115]),
    (865,&[1,1,7,1,23,45,125,71,419]),
    (875,&[1,1,3,5,23,5,105,109,75]),
    (877,&[1,1,7,15,7,11,67,121,453]),
    (883,&[1,3,7,3,9,13,31,27,449]),
    (895,&[1,3,1,15,19,39,39,89,15]),
    (901,&[1,1,1,1,1,33,73,145,379]),
    (911,&[1,3,1,15,15,43,29,13,483]),
    (949,&[1,1,7,3,19,27,85,131,431]),
    (953,&[1,3,3,3,5,35,23,195,349]),
    (967,&[1,3,3,7,9,27,39,59,297]),
    (971,&[1,1,3,9,11,17,13,241,157]),
    (973,&[1,3,7,15,25,57,33,189,213]),
    (981,&[1,1,7,1,9,55,73,83,217]),
    (985,&[1,3,3,13,19,27,23,113,249]),
    (995,&[1,3,5,3,23,43,3,253,479]),
    (1001,&[1,1,5,5,11,5,45,117,217]),
    (1019,&[1,3,3,7,29,37,33,123,147]),
    (1033,&[1,3,1,15,5,5,37,227,223,459]),
    (1051,&[1,1,7,5,5,39,63,255,135,487]),
    (1063,&[1,3,1,7,9,7,87,249,217,599]),
    (1069,&[1,1,3,13,9,47,7,225,363,247]),
    (1125,&[1,3,7,13,19,13,9,67,9,737]),
    (1135,&[1,3,5,5,19,59,7,41,319,677]),
    (1153,&[1,1,5,3,31,63,15,43,207,789]),
    (1163,&[1,1,7,9,13,39,3,47,497,169]),
    (1221,&[1,3,1,7,21,17,97,19,415,905]),
    (1239,&[1,3,7,1,3,31,71,111,165,127]),
    (1255,&[1,1,5,11,1,61,83,119,203,847]),
    (1267,&[1,3,3,13,9,61,19,97,47,35]),
    (1279,&[1,1,7,7,15,29,63,95,417,469]),
    (1293,&[1,3,1,9,25,9,71,57,213,385]),
    (1305,&[1,3,5,13,31,47,101,57,39,341]),
    (1315,&[1,1,3,3,31,57,125,173,365,551]),
    (1329,&[1,3,7,1,13,57,67,157,451,707]),
    (1341,&[1,1,1,7,21,13,105,89,429,965]),
    (1347,&[1,1,5,9,17,51,45,119,157,141]),
    (1367,&[1,3,7,7,13,45,91,9,129,741]),
    (1387,&[1,3,7,1,23,57,67,141,151,571]),
    (1413,&[1,1,3,11,17,47,93,107,375,157]),
    (1423,&[1,3,3,5,11,21,43,51,169,915]),
    (1431,&[1,1,5,3,15,55,101,67,455,625]),
    (1441,&[1,3,5,9,1,23,29,47,345,595]),
    (1479,&[1,3,7,7,5,49,29,155,323,589]),
    (1509,&[1,3,3,7,5,41,127,61,261,717]),];

const BITS: usize = 32;

/// Direction numbers `v_1..v_32` for one dimension (1-based dimension
/// index).
fn direction_numbers(dimension: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dimension == 1 {
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = 1u32 << (BITS - 1 - k);
        }
        return v;
    }
    let (poly, m) = DIRECTIONS[dimension - 2];
    let s = (32 - poly.leading_zeros() - 1) as usize;
    let a = (poly ^ (1 << s) ^ 1) >> 1;
    for (k, &mk) in m.iter().enumerate() {
        v[k] = mk << (BITS - 1 - k);
    }
    for k in s..BITS {
        let mut next = v[k - s] ^ (v[k - s] >> s);
        for i in 1..s {
            if (a >> (s - 1 - i)) & 1 == 1 {
                next ^= v[k - i];
            }
        }
        v[k] = next;
    }
    v
}

/// The first `count` points of the `d`-dimensional Sobol sequence after
/// skipping `skip` points, in Gray-code order. The sequence starts at the
/// all-zeros point, so `skip = 1` drops it. All coordinates lie in `[0, 1)`.
pub fn sobol_points(count: usize, d: usize, skip: usize) -> Result<Vec<Vec<f64>>> {
    if d == 0 || d > MAX_DIMENSION {
        return Err(Error::InvalidInput(format!(
            "sobol dimension {d} unsupported (1..={MAX_DIMENSION})"
        )));
    }
    let dirs: Vec<[u32; BITS]> = (1..=d).map(direction_numbers).collect();
    let mut state = vec![0u32; d];
    let mut out = Vec::with_capacity(count);
    let scale = 1.0 / (1u64 << BITS) as f64;
    for index in 0..skip + count {
        if index > 0 {
            let bit = (index as u32 - 1).trailing_ones() as usize;
            for (x, v) in state.iter_mut().zip(&dirs) {
                *x ^= v[bit];
            }
        }
        if index >= skip {
            out.push(state.iter().map(|&x| x as f64 * scale).collect());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_prefix() {
        let pts = sobol_points(3, 1, 1).unwrap();
        assert_eq!(pts, vec![vec![0.5], vec![0.75], vec![0.25]]);
    }

    #[test]
    fn two_dimensional_prefix_matches_reference() {
        // reference values computed with an independent implementation of
        // the same published direction-number table
        let expected = [
            [0.5, 0.5],
            [0.75, 0.25],
            [0.25, 0.75],
            [0.375, 0.375],
            [0.875, 0.875],
            [0.625, 0.125],
            [0.125, 0.625],
            [0.1875, 0.3125],
        ];
        let pts = sobol_points(8, 2, 1).unwrap();
        for (p, e) in pts.iter().zip(expected) {
            assert_eq!(p.as_slice(), e.as_slice());
        }
    }

    #[test]
    fn high_dimensional_prefix_matches_reference() {
        let pts = sobol_points(2, 64, 1).unwrap();
        assert!(pts[0].iter().all(|&v| v == 0.5));
        let expected = [0.75, 0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75, 0.75, 0.75];
        assert_eq!(&pts[1][..10], &expected);
    }

    #[test]
    fn coordinates_stay_in_unit_interval() {
        let pts = sobol_points(512, 7, 0).unwrap();
        for p in &pts {
            assert!(p.iter().all(|&v| (0.0..1.0).contains(&v)));
        }
    }

    #[test]
    fn unsupported_dimension_is_rejected() {
        assert!(sobol_points(1, 0, 0).is_err());
        assert!(sobol_points(1, MAX_DIMENSION + 1, 0).is_err());
        assert!(sobol_points(1, MAX_DIMENSION, 0).is_ok());
    }

    #[test]
    fn deterministic_and_seedless() {
        assert_eq!(sobol_points(16, 5, 3).unwrap(), sobol_points(16, 5, 3).unwrap());
    }
}
