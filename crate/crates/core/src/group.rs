//! Finite groups given by multiplication tables, and their linear
//! orthogonal actions on E^m.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::max_abs;

/// Default entrywise tolerance for identifying group elements.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;

/// Default cap on the order of a generated group.
pub const DEFAULT_MAX_ORDER: usize = 1024;

/// Triples checked for associativity exhaustively up to this order.
const EXHAUSTIVE_ASSOCIATIVITY: usize = 64;
const SAMPLED_TRIPLES: usize = 200_000;

/// An abstract finite group. Elements are indices `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a multiplication table: `table[g][h]` is the index of gh.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        let is_perm = |it: &mut dyn Iterator<Item = usize>| {
            let mut seen = vec![false; order];
            for v in it {
                if v >= order || seen[v] {
                    return false;
                }
                seen[v] = true;
            }
            true
        };
        for (g, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidGroup(format!("row {g} has length {}", row.len())));
            }
            if !is_perm(&mut row.iter().copied()) {
                return Err(Error::InvalidGroup(format!("row {g} is not a permutation")));
            }
        }
        for h in 0..order {
            if !is_perm(&mut table.iter().map(|row| row[h])) {
                return Err(Error::InvalidGroup(format!("column {h} is not a permutation")));
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        // Latin rows guarantee exactly one right inverse per element
        let inverse: Vec<usize> = (0..order)
            .map(|g| table[g].iter().position(|&p| p == identity).unwrap())
            .collect();
        for g in 0..order {
            if table[inverse[g]][g] != identity {
                return Err(Error::InvalidGroup(format!("element {g} has no two-sided inverse")));
            }
        }
        let group = FiniteGroup {
            table,
            identity,
            inverse,
        };
        group.check_associativity()?;
        Ok(group)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.order();
        let check = |a: usize, b: usize, c: usize| {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                Err(Error::InvalidGroup(format!("({a}·{b})·{c} != {a}·({b}·{c})")))
            } else {
                Ok(())
            }
        };
        if n <= EXHAUSTIVE_ASSOCIATIVITY {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            // fixed-seed linear congruential sampling keeps this deterministic
            let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
            let mut next = || {
                state = state
                    .wrapping_mul(6_364_136_223_846_793_005)
                    .wrapping_add(1_442_695_040_888_963_407);
                ((state >> 33) as usize) % n
            };
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (next(), next(), next());
                check(a, b, c)?;
            }
        }
        Ok(())
    }

    /// The cyclic group Z/k with element i the i-th power of a generator.
    pub fn cyclic(k: usize) -> Result<Self> {
        FiniteGroup::new((0..k).map(|i| (0..k).map(|j| (i + j) % k).collect()).collect())
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|g| (0..n).all(|h| self.table[g][h] == self.table[h][g]))
    }
}

/// A finite group acting linearly by orthogonal matrices on E^m.
#[derive(Debug, Clone)]
pub struct OrthogonalAction {
    group: FiniteGroup,
    dim: usize,
    matrices: Vec<DMatrix<f64>>,
}

impl OrthogonalAction {
    /// Builds an action from an already closed list of matrices, deriving the
    /// multiplication table by matching products within `tol`.
    pub fn from_matrices(matrices: Vec<DMatrix<f64>>, tol: f64) -> Result<Self> {
        let dim = check_square_family(&matrices)?;
        for (index, m) in matrices.iter().enumerate() {
            check_orthogonal(index, m, tol)?;
        }
        for i in 0..matrices.len() {
            for j in (i + 1)..matrices.len() {
                let gap = max_abs(&(&matrices[i] - &matrices[j]));
                if gap <= 10.0 * tol {
                    return Err(Error::NumericalAmbiguity { distance: gap, tol });
                }
            }
        }
        let mut table = vec![vec![0; matrices.len()]; matrices.len()];
        for g in 0..matrices.len() {
            for h in 0..matrices.len() {
                let product = &matrices[g] * &matrices[h];
                table[g][h] = match locate(&matrices, &product, tol)? {
                    Some(k) => k,
                    None => {
                        return Err(Error::InvalidGroup(format!(
                            "product of elements {g} and {h} is not in the list"
                        )))
                    }
                };
            }
        }
        let group = FiniteGroup::new(table)?;
        Ok(OrthogonalAction {
            group,
            dim,
            matrices,
        })
    }

    /// The trivial group acting on E^m.
    pub fn trivial(dim: usize) -> Self {
        OrthogonalAction {
            group: FiniteGroup::cyclic(1).expect("trivial group"),
            dim,
            matrices: vec![DMatrix::identity(dim, dim)],
        }
    }

    /// C₂ acting on E¹ by x ↦ −x.
    pub fn reflection_line() -> Self {
        close_group(&[DMatrix::from_element(1, 1, -1.0)], DEFAULT_GROUP_TOL, 2)
            .expect("reflection generates C2")
    }

    /// C_k acting on E² by rotations through multiples of 2π/k.
    pub fn rotations(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("rotation order must be positive".into()));
        }
        close_group(&[rotation(2.0 * PI / k as f64)], DEFAULT_GROUP_TOL, k)
    }

    /// The dihedral group of order 2k acting on E², generated by reflections
    /// in two lines at angle π/k.
    pub fn dihedral(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("dihedral order must be positive".into()));
        }
        close_group(
            &[reflection(0.0), reflection(PI / k as f64)],
            DEFAULT_GROUP_TOL,
            2 * k,
        )
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &DMatrix<f64> {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    /// Applies element `g` to a point.
    pub fn act(&self, g: usize, point: &[f64]) -> Vec<f64> {
        let m = &self.matrices[g];
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| m[(r, c)] * point[c]).sum())
            .collect()
    }

    /// max over pairs of ‖M(gh) − M(g)M(h)‖ (entrywise).
    pub fn homomorphism_defect(&self) -> f64 {
        let n = self.order();
        let mut worst = 0.0_f64;
        for g in 0..n {
            for h in 0..n {
                let product = &self.matrices[g] * &self.matrices[h];
                worst = worst.max(max_abs(&(product - &self.matrices[self.group.mul(g, h)])));
            }
        }
        worst
    }

    /// max over elements of ‖MᵀM − I‖ (entrywise).
    pub fn orthogonality_defect(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| max_abs(&(m.transpose() * m - DMatrix::identity(self.dim, self.dim))))
            .fold(0.0, f64::max)
    }
}

/// Rotation of E² by `angle`.
pub fn rotation(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Reflection of E² in the line through the origin at `angle`.
pub fn reflection(angle: f64) -> DMatrix<f64> {
    let (s, c) = (2.0 * angle).sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, s, s, -c])
}

fn check_square_family(matrices: &[DMatrix<f64>]) -> Result<usize> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::InvalidGroup("no matrices given".into()))?;
    let dim = first.nrows();
    for m in matrices {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.nrows(),
            });
        }
    }
    Ok(dim)
}

fn check_orthogonal(index: usize, m: &DMatrix<f64>, tol: f64) -> Result<()> {
    let n = m.nrows();
    let defect = max_abs(&(m.transpose() * m - DMatrix::identity(n, n)));
    if defect > tol {
        return Err(Error::NotOrthogonal { index, defect });
    }
    Ok(())
}

/// Index of the element matching `target` within `tol`; an error if the
/// nearest element sits in the ambiguity band (tol, 10·tol].
fn locate(elements: &[DMatrix<f64>], target: &DMatrix<f64>, tol: f64) -> Result<Option<usize>> {
    let mut best: Option<(usize, f64)> = None;
    for (k, e) in elements.iter().enumerate() {
        let gap = max_abs(&(e - target));
        if best.is_none_or(|(_, b)| gap < b) {
            best = Some((k, gap));
        }
    }
    match best {
        Some((k, gap)) if gap <= tol => Ok(Some(k)),
        Some((_, gap)) if gap <= 10.0 * tol => Err(Error::NumericalAmbiguity { distance: gap, tol }),
        _ => Ok(None),
    }
}

/// Closes a set of orthogonal generators under multiplication.
///
/// Matrices agreeing entrywise within `tol` are identified. The identity is
/// always element 0.
pub fn close_group(
    generators: &[DMatrix<f64>],
    tol: f64,
    max_order: usize,
) -> Result<OrthogonalAction> {
    let dim = check_square_family(generators)?;
    for (index, g) in generators.iter().enumerate() {
        check_orthogonal(index, g, tol)?;
    }
    let mut elements = vec![DMatrix::identity(dim, dim)];
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for g in generators {
            let product = g * &current;
            if locate(&elements, &product, tol)?.is_none() {
                if elements.len() == max_order {
                    return Err(Error::OrderExceeded { max_order });
                }
                elements.push(product);
            }
        }
    }
    OrthogonalAction::from_matrices(elements, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_generates_order_two() {
        let a = OrthogonalAction::reflection_line();
        assert_eq!(a.order(), 2);
        assert_eq!(a.group().identity(), 0);
        assert_eq!(a.matrix(1)[(0, 0)], -1.0);
    }

    #[test]
    fn quarter_turn_generates_c4() {
        let a = OrthogonalAction::rotations(4).unwrap();
        assert_eq!(a.order(), 4);
        assert!(a.group().is_abelian());
        // element 1 is the generator; its powers cycle through all elements
        let g = a.group();
        let mut x = g.identity();
        let mut seen = vec![];
        for _ in 0..4 {
            x = g.mul(1, x);
            seen.push(x);
        }
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2, 3]);
    }

    #[test]
    fn two_reflections_generate_d3() {
        let a = OrthogonalAction::dihedral(3).unwrap();
        assert_eq!(a.order(), 6);
        assert!(!a.group().is_abelian());
        assert!(a.homomorphism_defect() < 1e-12);
        assert!(a.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn inverse_and_identity_axioms() {
        let a = OrthogonalAction::dihedral(4).unwrap();
        let g = a.group();
        for x in 0..g.order() {
            assert_eq!(g.mul(x, g.inverse(x)), g.identity());
            assert_eq!(g.mul(g.inverse(x), x), g.identity());
        }
    }

    #[test]
    fn non_orthogonal_generator_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            close_group(&[m], 1e-8, 16),
            Err(Error::NotOrthogonal { index: 0, .. })
        ));
    }

    #[test]
    fn irrational_rotation_exceeds_the_cap() {
        assert_eq!(
            close_group(&[rotation(1.0)], 1e-8, 50).unwrap_err(),
            Error::OrderExceeded { max_order: 50 }
        );
    }

    #[test]
    fn near_duplicate_products_are_ambiguous() {
        // rotation by 2π/k + ε: after k steps the product lands ~kε from I
        let eps = 1e-9;
        let r = rotation(2.0 * PI / 4.0 + eps);
        assert!(matches!(
            close_group(&[r], 1e-9, 64),
            Err(Error::NumericalAmbiguity { .. })
        ));
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroup::new(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(FiniteGroup::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        // identity need not be element 0
        assert_eq!(FiniteGroup::new(vec![vec![1, 0], vec![0, 1]]).unwrap().identity(), 1);
        assert!(FiniteGroup::new(vec![]).is_err());
        // Latin square with identity 0 that is not associative
        let quasi = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::new(quasi), Err(Error::InvalidGroup(_))));
        let c5 = FiniteGroup::cyclic(5).unwrap();
        assert_eq!(c5.inverse(2), 3);
    }

    #[test]
    fn large_cyclic_group_uses_sampled_associativity() {
        let g = FiniteGroup::cyclic(100).unwrap();
        assert_eq!(g.order(), 100);
    }

    #[test]
    fn incomplete_matrix_list_is_rejected() {
        let half_turn = rotation(PI);
        let quarter = rotation(PI / 2.0);
        assert!(matches!(
            OrthogonalAction::from_matrices(vec![DMatrix::identity(2, 2), quarter, half_turn], 1e-8),
            Err(Error::InvalidGroup(_))
        ));
    }
}
